#pragma once

// CSV tables and self-contained SVG figures generated from persisted results.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "mcmc_lab/error.hpp"
#include "mcmc_lab/experiments.hpp"

namespace mcmc_lab {

namespace detail {

inline std::string fmt_g(double v, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline std::string fmt_px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Plot frame: fixed 640x420 viewBox with a 60px left and 50px bottom margin.
struct Frame {
  double x0, x1, y0, y1;
  static constexpr double left = 60, right = 620, top = 30, bottom = 370;

  double px(double x) const { return left + (x - x0) / (x1 - x0) * (right - left); }
  double py(double y) const { return bottom - (y - y0) / (y1 - y0) * (bottom - top); }
};

inline Frame make_frame(double xmin, double xmax, double ymin, double ymax) {
  if (!(xmax > xmin)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (!(ymax > ymin)) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  return {xmin, xmax, ymin, ymax};
}

inline std::string svg_open(const std::string& title) {
  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 420\" width=\"640\" height=\"420\">\n"
    << "<rect x=\"0\" y=\"0\" width=\"640\" height=\"420\" fill=\"white\"/>\n"
    << "<text x=\"340\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">"
    << title << "</text>\n";
  return s.str();
}

inline std::string svg_axes(const Frame& f, const std::string& xlabel, const std::string& ylabel) {
  std::ostringstream s;
  s << "<g stroke=\"black\" stroke-width=\"1\">\n"
    << "<line x1=\"" << f.left << "\" y1=\"" << f.bottom << "\" x2=\"" << f.right << "\" y2=\"" << f.bottom
    << "\"/>\n"
    << "<line x1=\"" << f.left << "\" y1=\"" << f.bottom << "\" x2=\"" << f.left << "\" y2=\"" << f.top
    << "\"/>\n</g>\n<g font-family=\"sans-serif\" font-size=\"10\">\n";
  constexpr int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / ticks;
    const double yv = f.y0 + (f.y1 - f.y0) * i / ticks;
    s << "<line x1=\"" << fmt_px(f.px(xv)) << "\" y1=\"" << f.bottom << "\" x2=\"" << fmt_px(f.px(xv))
      << "\" y2=\"" << f.bottom + 5 << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << fmt_px(f.px(xv)) << "\" y=\"" << f.bottom + 18 << "\" text-anchor=\"middle\">"
      << fmt_g(xv, 4) << "</text>\n"
      << "<line x1=\"" << f.left - 5 << "\" y1=\"" << fmt_px(f.py(yv)) << "\" x2=\"" << f.left
      << "\" y2=\"" << fmt_px(f.py(yv)) << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << f.left - 8 << "\" y=\"" << fmt_px(f.py(yv) + 3) << "\" text-anchor=\"end\">"
      << fmt_g(yv, 4) << "</text>\n";
  }
  s << "<text x=\"" << 0.5 * (f.left + f.right) << "\" y=\"405\" text-anchor=\"middle\" font-size=\"12\">"
    << xlabel << "</text>\n"
    << "<text x=\"14\" y=\"" << 0.5 * (f.top + f.bottom)
    << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 "
    << 0.5 * (f.top + f.bottom) << ")\">" << ylabel << "</text>\n</g>\n";
  return s.str();
}

inline void require_writable_parent(const std::filesystem::path& path) {
  const auto parent = path.parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent)) {
    throw SimulationError("cannot write " + path.string() + ": directory does not exist");
  }
}

inline std::vector<const SweepRow*> usable_rows(const SweepResult& result) {
  std::vector<const SweepRow*> rows;
  for (const auto& r : result.rows) {
    if (r.ok()) rows.push_back(&r);
  }
  if (rows.empty()) throw SimulationError("result has no usable rows to report");
  return rows;
}

}  // namespace detail

/// One row per usable grid point; doubles printed with 17 significant digits.
inline void emit_csv(const SweepResult& result, const std::filesystem::path& path) {
  const auto rows = detail::usable_rows(result);
  detail::require_writable_parent(path);
  std::ostringstream s;
  s << "grid_index,grid_value,mean_acceptance_rate,mean_esjd\n";
  for (const auto* r : rows) {
    s << r->grid_index << ',' << detail::fmt_g(r->grid_value) << ','
      << detail::fmt_g(r->mean_acceptance_rate) << ',' << detail::fmt_g(r->mean_esjd) << '\n';
  }
  write_text_file(path, s.str());
}

/// ESJD against acceptance rate: one polyline vertex per CSV row, the optimum marked.
inline void emit_svg_curve(const SweepResult& result, const std::filesystem::path& path) {
  const auto rows = detail::usable_rows(result);
  detail::require_writable_parent(path);
  double ymax = 0.0;
  for (const auto* r : rows) ymax = std::max(ymax, r->mean_esjd);
  const auto f = detail::make_frame(0.0, 1.0, 0.0, ymax * 1.05);
  const bool pt = result.config.is_object() && result.config.value("mode", "rwm") == "pt";

  std::ostringstream s;
  s << detail::svg_open(pt ? "Temperature ESJD vs swap acceptance rate" : "ESJD vs acceptance rate")
    << detail::svg_axes(f, pt ? "swap acceptance rate" : "acceptance rate", "ESJD")
    << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    s << (i ? " " : "") << detail::fmt_px(f.px(rows[i]->mean_acceptance_rate)) << ','
      << detail::fmt_px(f.py(rows[i]->mean_esjd));
  }
  s << "\"/>\n";
  const auto& o = result.optimum;
  s << "<circle cx=\"" << detail::fmt_px(f.px(o.acceptance_rate_at_max_esjd)) << "\" cy=\""
    << detail::fmt_px(f.py(o.max_esjd)) << "\" r=\"4\" fill=\"#d62728\"/>\n"
    << "<line x1=\"" << detail::fmt_px(f.px(0.234)) << "\" y1=\"" << f.top << "\" x2=\""
    << detail::fmt_px(f.px(0.234)) << "\" y2=\"" << f.bottom
    << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n</svg>\n";
  write_text_file(path, s.str());
}

struct Histogram {
  double lo = 0.0;
  double width = 0.0;
  std::vector<double> density;  ///< normalized so that sum(density) * width = 1

  double center(std::size_t bin) const { return lo + (static_cast<double>(bin) + 0.5) * width; }
  std::size_t mode_bin() const {
    return static_cast<std::size_t>(std::max_element(density.begin(), density.end()) - density.begin());
  }
};

inline Histogram make_histogram(std::span<const double> values, std::size_t bins) {
  if (values.empty()) throw SimulationError("histogram of an empty trace");
  if (bins == 0) throw ConfigError("histogram needs at least one bin");
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  Histogram h;
  h.lo = *mn;
  const double span = *mx > *mn ? *mx - *mn : 1.0;
  h.width = span / static_cast<double>(bins);
  std::vector<double> counts(bins, 0.0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - h.lo) / h.width);
    counts[std::min(b, bins - 1)] += 1.0;
  }
  const double norm = 1.0 / (static_cast<double>(values.size()) * h.width);
  h.density.reserve(bins);
  for (double c : counts) h.density.push_back(c * norm);
  return h;
}

inline void emit_histogram(std::span<const double> trace, std::size_t bins,
                           const std::filesystem::path& path) {
  const auto h = make_histogram(trace, bins);
  detail::require_writable_parent(path);
  const double ymax = *std::max_element(h.density.begin(), h.density.end());
  const auto f = detail::make_frame(h.lo, h.lo + h.width * static_cast<double>(bins), 0.0, ymax * 1.05);
  std::ostringstream s;
  s << detail::svg_open("Histogram of the first component") << detail::svg_axes(f, "x1", "density")
    << "<g fill=\"#1f77b4\" stroke=\"white\" stroke-width=\"0.5\">\n";
  for (std::size_t b = 0; b < bins; ++b) {
    const double x0 = f.px(h.lo + h.width * static_cast<double>(b));
    const double x1 = f.px(h.lo + h.width * static_cast<double>(b + 1));
    const double y = f.py(h.density[b]);
    s << "<rect x=\"" << detail::fmt_px(x0) << "\" y=\"" << detail::fmt_px(y) << "\" width=\""
      << detail::fmt_px(x1 - x0) << "\" height=\"" << detail::fmt_px(f.bottom - y) << "\"/>\n";
  }
  s << "</g>\n</svg>\n";
  write_text_file(path, s.str());
}

inline constexpr std::size_t kMaxTracePoints = 10000;

/// Stride used to thin a trace to at most kMaxTracePoints vertices.
inline std::size_t trace_stride(std::size_t n) {
  return std::max<std::size_t>(1, (n + kMaxTracePoints - 1) / kMaxTracePoints);
}

inline void emit_traceplot(std::span<const double> trace, const std::filesystem::path& path) {
  if (trace.empty()) throw SimulationError("traceplot of an empty trace");
  detail::require_writable_parent(path);
  const std::size_t stride = trace_stride(trace.size());
  const auto [mn, mx] = std::minmax_element(trace.begin(), trace.end());
  const auto f = detail::make_frame(0.0, static_cast<double>(trace.size() - 1), *mn, *mx);
  std::ostringstream s;
  s << detail::svg_open("Traceplot of the first component") << detail::svg_axes(f, "iteration", "x1")
    << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"0.6\" points=\"";
  for (std::size_t i = 0, k = 0; i < trace.size(); i += stride, ++k) {
    s << (k ? " " : "") << detail::fmt_px(f.px(static_cast<double>(i))) << ','
      << detail::fmt_px(f.py(trace[i]));
  }
  s << "\"/>\n</svg>\n";
  write_text_file(path, s.str());
}

}  // namespace mcmc_lab
