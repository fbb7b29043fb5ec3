// Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails. Every sweep runs at default settings (40-point
// grids, seeds 0..4, 1e5 RWM / 2e4 PT iterations) and is saved to --out-dir.
//
//   mcmc_lab_acceptance [--out-dir DIR] [--only 1,7,12] [--threads N]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcmc_lab/mcmc_lab.hpp"

using namespace mcmc_lab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Suite {
  fs::path out_dir;
  std::size_t workers = default_worker_count();
  std::map<std::string, SweepResult> cache;

  const SweepResult& sweep(const std::string& name, const json& config) {
    auto it = cache.find(name);
    if (it != cache.end()) return it->second;
    const auto start = std::chrono::steady_clock::now();
    auto result = run_sweep(sweep_config_from_json(config), {workers});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::fprintf(stderr, "  [sweep %-28s %7.1fs] optimum %.4f\n", name.c_str(), secs,
                 result.optimum.acceptance_rate_at_max_esjd);
    persist(result, out_dir / (name + ".json"));
    return cache.emplace(name, std::move(result)).first->second;
  }

  double rwm_opt(const std::string& name, const json& target, const std::string& proposal = "gaussian") {
    return sweep(name, {{"mode", "rwm"}, {"target", target}, {"proposal", {{"kind", proposal}}}})
        .optimum.acceptance_rate_at_max_esjd;
  }

  double pt_opt(const std::string& name, const json& target) {
    return sweep(name, {{"mode", "pt"}, {"target", target}}).optimum.acceptance_rate_at_max_esjd;
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string in_window(const std::string& label, double v, double lo, double hi, bool& ok) {
  const bool pass = v >= lo && v <= hi;
  ok = ok && pass;
  return label + " " + fmt(v) + (pass ? " in [" : " NOT in [") + fmt(lo) + ", " + fmt(hi) + "]";
}

std::string at_least(const std::string& label, double v, double lo, bool& ok) {
  const bool pass = v >= lo;
  ok = ok && pass;
  return label + " " + fmt(v) + (pass ? " >= " : " NOT >= ") + fmt(lo);
}

std::string at_most(const std::string& label, double v, double hi, bool& ok) {
  const bool pass = v <= hi;
  ok = ok && pass;
  return label + " " + fmt(v) + (pass ? " <= " : " NOT <= ") + fmt(hi);
}

json iid(const json& component, int d) { return {{"family", "iid_product"}, {"dimension", d}, {"component", component}}; }
const json kBeta{{"kind", "beta"}, {"a", 3}, {"b", 2}};
const json kGamma{{"kind", "gamma"}, {"shape", 3}, {"scale", 2}};
json gaussian(int d) { return {{"family", "std_gaussian"}, {"dimension", d}}; }
json cube(int d) { return {{"family", "hypercube"}, {"dimension", d}}; }
json carpet(int d, double m, bool inhom = false) {
  return {{"family", "rough_carpet"}, {"dimension", d}, {"modes", {-m, 0.0, m}}, {"inhomogeneous", inhom}};
}
json mixture(int d, double eps, bool inhom = false) {
  return {{"family", "three_mixture"}, {"dimension", d}, {"epsilon", eps}, {"inhomogeneous", inhom}};
}

const std::vector<std::pair<std::string, json>>& pt_sweeps() {
  static const std::vector<std::pair<std::string, json>> list{
      {"pt_gaussian_d20", gaussian(20)}, {"pt_carpet10_d20", carpet(20, 10)}, {"pt_carpet10_d30", carpet(30, 10)},
      {"pt_mixture15_d20", mixture(20, 15)}, {"pt_mixture15_d30", mixture(30, 15)}};
  return list;
}

Outcome c1(Suite& s) {
  bool ok = true;
  auto d = in_window("d=50 optimum", s.rwm_opt("rwm_beta_d50", iid(kBeta, 50)), 0.19, 0.29, ok);
  d += "; " + at_least("d=2 optimum", s.rwm_opt("rwm_beta_d2", iid(kBeta, 2)), 0.32, ok);
  return {ok, d};
}

Outcome c2(Suite& s) {
  bool ok = true;
  auto d = in_window("d=50 optimum", s.rwm_opt("rwm_gamma_d50", iid(kGamma, 50)), 0.19, 0.29, ok);
  return {ok, d};
}

Outcome c3(Suite& s) {
  bool ok = true;
  auto d = in_window("laplace d=50", s.rwm_opt("rwm_gaussian_laplace_d50", gaussian(50), "laplace"), 0.19, 0.29, ok);
  d += "; " + at_least("laplace d=2", s.rwm_opt("rwm_gaussian_laplace_d2", gaussian(2), "laplace"), 0.33, ok);
  d += "; " + in_window("uniform d=50", s.rwm_opt("rwm_gaussian_uniform_d50", gaussian(50), "uniform"), 0.19, 0.29, ok);
  return {ok, d};
}

Outcome c4(Suite& s) {
  bool ok = true;
  const double d100 = s.rwm_opt("rwm_hypercube_d100", cube(100));
  auto d = in_window("d=100 optimum", d100, 0.10, 0.17, ok);
  const bool below = d100 < 0.20;
  ok = ok && below;
  d += below ? " and < 0.20" : " and NOT < 0.20";
  d += "; " + at_least("d=2 optimum", s.rwm_opt("rwm_hypercube_d2", cube(2)), 0.35, ok);
  return {ok, d};
}

Outcome c5(Suite& s) {
  bool ok = true;
  auto d = in_window("homogeneous d=50", s.rwm_opt("rwm_carpet5_d50", carpet(50, 5)), 0.19, 0.28, ok);
  const double i20 = s.rwm_opt("rwm_carpet5_inhom_d20", carpet(20, 5, true));
  const double i50 = s.rwm_opt("rwm_carpet5_inhom_d50", carpet(50, 5, true));
  const bool increasing = i20 < i50;
  ok = ok && increasing;
  d += "; inhomogeneous d=20 " + fmt(i20) + (increasing ? " < " : " NOT < ") + "d=50 " + fmt(i50);
  d += "; " + in_window("inhomogeneous d=50", i50, 0.19, 0.29, ok);
  return {ok, d};
}

Outcome c6(Suite& s) {
  bool ok = true;
  std::string d;
  double h20 = 0;
  for (int dim : {20, 30, 50}) {
    const double v = s.rwm_opt("rwm_mixture5_d" + std::to_string(dim), mixture(dim, 5));
    if (dim == 20) h20 = v;
    d += in_window("d=" + std::to_string(dim), v, 0.18, 0.30, ok) + "; ";
  }
  const double i20 = s.rwm_opt("rwm_mixture5_inhom_d20", mixture(20, 5, true));
  d += in_window("inhomogeneous d=20", i20, 0.12, 0.23, ok);
  const bool below = i20 < h20;
  ok = ok && below;
  d += below ? " and < homogeneous d=20" : " and NOT < homogeneous d=20";
  return {ok, d};
}

Outcome c7(Suite& s) {
  bool ok = true;
  auto d = in_window("d=20 optimum swap rate", s.pt_opt("pt_gaussian_d20", gaussian(20)), 0.15, 0.32, ok);
  return {ok, d};
}

Outcome c8(Suite& s) {
  bool ok = true;
  const double d20 = s.pt_opt("pt_carpet10_d20", carpet(20, 10));
  const double d30 = s.pt_opt("pt_carpet10_d30", carpet(30, 10));
  auto d = at_most("d=20 optimum swap rate", d20, 0.12, ok);
  d += "; " + at_most("d=30 optimum swap rate", d30, d20, ok) + " (d=20)";
  return {ok, d};
}

Outcome c9(Suite& s) {
  bool ok = true;
  auto d = in_window("d=20 optimum swap rate", s.pt_opt("pt_mixture15_d20", mixture(20, 15)), 0.17, 0.33, ok);
  d += "; " + in_window("d=30 optimum swap rate", s.pt_opt("pt_mixture15_d30", mixture(30, 15)), 0.16, 0.32, ok);
  return {ok, d};
}

// Every ladder built by the PT sweeps, re-estimated with fresh streams at the
// builder's sample size; the terminal beta_min rung is exempt.
Outcome c10(Suite& s) {
  std::size_t rungs = 0, ladders = 0, outside = 0;
  double worst = 0;
  std::string worst_at;
  for (std::size_t w = 0; w < pt_sweeps().size(); ++w) {
    const auto& [name, target_json] = pt_sweeps()[w];
    const auto& result = s.sweep(name, {{"mode", "pt"}, {"target", target_json}});
    const auto cfg = sweep_config_from_json(result.config);
    const auto target = make_target(cfg.target);
    std::vector<std::vector<double>> devs(result.ladders.size());
    parallel_for(result.ladders.size(), s.workers, [&](std::size_t i) {
      const auto& ladder = result.ladders[i];
      if (!ladder) return;
      for (std::size_t r = 0; r + 2 < ladder->size(); ++r) {
        auto rng = derive_stream(cfg.base_seed, {Label{std::string("revalidate")}, Label{static_cast<std::int64_t>(w)},
                                                 Label{static_cast<std::int64_t>(i)}, Label{static_cast<std::int64_t>(r)}});
        const double a = estimate_swap_acceptance(target, ladder->betas[r + 1], ladder->betas[r], cfg.ladder.n_samples, rng);
        devs[i].push_back(a - ladder->target_swap_rate);
      }
    });
    for (std::size_t i = 0; i < devs.size(); ++i) {
      if (!result.ladders[i]) continue;
      ++ladders;
      for (std::size_t r = 0; r < devs[i].size(); ++r) {
        ++rungs;
        const double dev = std::abs(devs[i][r]);
        if (dev > 0.02) ++outside;
        if (dev > worst) {
          worst = dev;
          worst_at = name + " s=" + fmt(result.ladders[i]->target_swap_rate) + " rung " + std::to_string(r);
        }
      }
    }
  }
  std::ostringstream d;
  d << ladders << " ladders, " << rungs << " calibrated rungs re-estimated; " << outside
    << " outside target +/- 0.02; worst deviation " << fmt(worst) << " (" << worst_at << ")";
  return {outside == 0 && rungs > 0, d.str()};
}

Outcome c11(Suite&) {
  const auto start = std::chrono::steady_clock::now();
  const std::string cmd = std::string(MCMC_LAB_PROPERTY_TESTS_PATH) + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool passed = status == 0;
  const bool fast = secs < 60.0;
  std::ostringstream d;
  d << "property suite " << (passed ? "passed" : "FAILED") << " in " << fmt(secs) << "s"
    << (fast ? " (< 60s)" : " (NOT < 60s)");
  return {passed && fast, d.str()};
}

Outcome c12(Suite& s) {
  const auto target = make_target(mixture(20, 15));
  const std::int64_t n = 100000;
  auto mode_of = [](double x0) { return x0 > 7.5 ? 0 : (x0 < -7.5 ? 2 : 1); };

  auto rwm_rng = derive_stream(0, {Label{std::string("mixing")}, Label{std::string("rwm")}});
  std::array<std::int64_t, 3> rwm_counts{};
  run_rwm(target, ProposalSpec::from_ell(ProposalKind::gaussian, 2.38, 20), n, rwm_rng, target.central_point(),
          RwmOptions{0, 0}, [&](std::span<const double> x) { ++rwm_counts[mode_of(x[0])]; });
  const double rwm_outer = static_cast<double>(rwm_counts[0] + rwm_counts[2]) / static_cast<double>(n + 1);

  auto ladder_rng = derive_stream(0, {Label{std::string("mixing")}, Label{std::string("ladder")}});
  const auto ladder = build_ladder(target, 0.234, LadderParams{}, ladder_rng);
  auto pilot_rng = derive_stream(0, {Label{std::string("mixing")}, Label{std::string("pilot")}});
  const double cold = tune_scale(target, ProposalKind::gaussian, 0.234, 10000, pilot_rng);
  auto pt_rng = derive_stream(0, {Label{std::string("mixing")}, Label{std::string("pt")}});
  PTOptions opt;
  opt.burn_in = 0;
  opt.trace_every = 1;
  const auto st = run_pt(target, ladder, inverse_sqrt_beta_scales(ladder, cold), n, pt_rng, opt);
  std::array<double, 3> occ{};
  for (double x : st.cold_chain_trace) occ[mode_of(x)] += 1.0 / static_cast<double>(st.cold_chain_trace.size());

  json trace = {{"schema_version", kSchemaVersion}, {"kind", "pt_run"}, {"ladder", to_json(ladder)},
                {"cold_scale", cold}, {"trace", st.cold_chain_trace}};
  write_text_file(s.out_dir / "mixing_pt_run.json", dump_canonical(trace));

  const bool rwm_ok = rwm_outer < 1e-3;
  const bool pt_ok = occ[0] >= 0.05 && occ[1] >= 0.05 && occ[2] >= 0.05;
  std::ostringstream d;
  d << "RWM outer-mode occupancy " << fmt(rwm_outer) << (rwm_ok ? " < 0.001" : " NOT < 0.001") << "; PT ("
    << ladder.size() << " chains) occupancy +15/0/-15 = " << fmt(occ[0]) << "/" << fmt(occ[1]) << "/"
    << fmt(occ[2]) << (pt_ok ? " all >= 0.05" : " NOT all >= 0.05");
  return {rwm_ok && pt_ok, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string out_dir = "acceptance_results";
  std::vector<int> only;
  std::optional<std::size_t> threads;
  app.add_option("--out-dir", out_dir, "Where sweep results are saved");
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  app.add_option("--threads", threads, "Worker threads");
  CLI11_PARSE(app, argc, argv);

  Suite suite;
  suite.out_dir = out_dir;
  if (threads) suite.workers = *threads;
  fs::create_directories(suite.out_dir);

  const std::vector<std::pair<std::string, std::function<Outcome(Suite&)>>> criteria{
      {"RWM Beta(3,2) product", c1},
      {"RWM Gamma(3,2) product", c2},
      {"RWM Gaussian target, Laplace and uniform proposals", c3},
      {"RWM hypercube", c4},
      {"RWM rough carpet, homogeneous and inhomogeneous", c5},
      {"RWM three-mixture, homogeneous and inhomogeneous", c6},
      {"PT Gaussian d=20", c7},
      {"PT rough carpet, modes +/-10", c8},
      {"PT three-mixture, means +/-15", c9},
      {"Ladder revalidation", c10},
      {"Property suite", c11},
      {"Multimodal mixing contrast", c12}};
  const std::set<int> selected(only.begin(), only.end());

  int failures = 0;
  json summary = json::array();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second(suite);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s  C%-2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
    summary.push_back({{"criterion", id}, {"name", criteria[i].first}, {"pass", o.pass}, {"detail", o.detail}});
  }
  write_text_file(suite.out_dir / "summary.json", dump_canonical(summary));
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
