#pragma once

// One-dimensional base distributions: validated parameter sets, exact
// samplers, log densities, moments and closed-form tempering.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <variant>

#include "mcmc_lab/error.hpp"
#include "mcmc_lab/rng.hpp"

namespace mcmc_lab {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct UniformDist {
  double lo;
  double hi;
  bool operator==(const UniformDist&) const = default;
};
struct GaussianDist {
  double mean;
  double sd;
  bool operator==(const GaussianDist&) const = default;
};
struct GammaDist {
  double shape;
  double scale;
  bool operator==(const GammaDist&) const = default;
};
struct BetaDist {
  double a;
  double b;
  bool operator==(const BetaDist&) const = default;
};
/// Double exponential parameterized by its standard deviation.
struct LaplaceDist {
  double location;
  double sd;
  bool operator==(const LaplaceDist&) const = default;
};

/// Gamma draw by Marsaglia and Tsang; shapes below 1 use the u^(1/k) boost.
inline double sample_gamma(double shape, double scale, RngStream& rng) {
  if (shape < 1.0) {
    const double g = sample_gamma(shape + 1.0, 1.0, rng);
    return scale * g * std::pow(rng.uniform_open(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return scale * d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return scale * d * v;
  }
}

inline double sample_beta(double a, double b, RngStream& rng) {
  const double x = sample_gamma(a, 1.0, rng);
  const double y = sample_gamma(b, 1.0, rng);
  return x / (x + y);
}

inline double sample_laplace(double location, double sd, RngStream& rng) {
  const double b = sd / std::numbers::sqrt2;
  const double e = b * rng.exponential();
  return (rng() >> 63) ? location + e : location - e;
}

class BaseDistSpec {
 public:
  using Params = std::variant<UniformDist, GaussianDist, GammaDist, BetaDist, LaplaceDist>;

  static BaseDistSpec uniform(double lo, double hi) {
    require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "uniform requires lo < hi");
    return BaseDistSpec(UniformDist{lo, hi});
  }
  static BaseDistSpec gaussian(double mean, double sd) {
    require(std::isfinite(mean) && sd > 0 && std::isfinite(sd), "gaussian requires sd > 0");
    return BaseDistSpec(GaussianDist{mean, sd});
  }
  static BaseDistSpec gamma(double shape, double scale) {
    require(shape > 0 && scale > 0 && std::isfinite(shape) && std::isfinite(scale),
            "gamma requires shape > 0 and scale > 0");
    return BaseDistSpec(GammaDist{shape, scale});
  }
  static BaseDistSpec beta(double a, double b) {
    require(a > 0 && b > 0 && std::isfinite(a) && std::isfinite(b), "beta requires a > 0 and b > 0");
    return BaseDistSpec(BetaDist{a, b});
  }
  static BaseDistSpec laplace(double location, double sd) {
    require(std::isfinite(location) && sd > 0 && std::isfinite(sd), "laplace requires sd > 0");
    return BaseDistSpec(LaplaceDist{location, sd});
  }

  const Params& params() const noexcept { return params_; }

  std::string_view kind() const noexcept {
    static constexpr std::string_view names[] = {"uniform", "gaussian", "gamma", "beta", "laplace"};
    return names[params_.index()];
  }

  double sample(RngStream& rng) const {
    struct Visitor {
      RngStream& rng;
      double operator()(const UniformDist& p) const { return p.lo + (p.hi - p.lo) * rng.uniform(); }
      double operator()(const GaussianDist& p) const { return p.mean + p.sd * rng.normal(); }
      double operator()(const GammaDist& p) const { return sample_gamma(p.shape, p.scale, rng); }
      double operator()(const BetaDist& p) const { return sample_beta(p.a, p.b, rng); }
      double operator()(const LaplaceDist& p) const { return sample_laplace(p.location, p.sd, rng); }
    };
    return std::visit(Visitor{rng}, params_);
  }

  /// Normalized log density; -inf outside the support.
  double log_pdf(double x) const noexcept {
    switch (params_.index()) {
      case 0: {
        const auto& p = std::get<UniformDist>(params_);
        return (x >= p.lo && x <= p.hi) ? log_norm_ : kNegInf;
      }
      case 1: {
        const auto& p = std::get<GaussianDist>(params_);
        const double z = (x - p.mean) / p.sd;
        return log_norm_ - 0.5 * z * z;
      }
      case 2: {
        const auto& p = std::get<GammaDist>(params_);
        if (x <= 0.0) return kNegInf;
        return log_norm_ + (p.shape - 1.0) * std::log(x) - x / p.scale;
      }
      case 3: {
        const auto& p = std::get<BetaDist>(params_);
        if (x <= 0.0 || x >= 1.0) return kNegInf;
        return log_norm_ + (p.a - 1.0) * std::log(x) + (p.b - 1.0) * std::log1p(-x);
      }
      default: {
        const auto& p = std::get<LaplaceDist>(params_);
        return log_norm_ - std::abs(x - p.location) * (std::numbers::sqrt2 / p.sd);
      }
    }
  }

  double mean() const noexcept {
    struct Visitor {
      double operator()(const UniformDist& p) const { return 0.5 * (p.lo + p.hi); }
      double operator()(const GaussianDist& p) const { return p.mean; }
      double operator()(const GammaDist& p) const { return p.shape * p.scale; }
      double operator()(const BetaDist& p) const { return p.a / (p.a + p.b); }
      double operator()(const LaplaceDist& p) const { return p.location; }
    };
    return std::visit(Visitor{}, params_);
  }

  double variance() const noexcept {
    struct Visitor {
      double operator()(const UniformDist& p) const { return (p.hi - p.lo) * (p.hi - p.lo) / 12.0; }
      double operator()(const GaussianDist& p) const { return p.sd * p.sd; }
      double operator()(const GammaDist& p) const { return p.shape * p.scale * p.scale; }
      double operator()(const BetaDist& p) const {
        const double s = p.a + p.b;
        return p.a * p.b / (s * s * (s + 1.0));
      }
      double operator()(const LaplaceDist& p) const { return p.sd * p.sd; }
    };
    return std::visit(Visitor{}, params_);
  }

  /// The distribution with density proportional to pdf^beta, 0 < beta <= 1.
  /// Every base family is closed under powers.
  BaseDistSpec tempered(double beta) const {
    require(beta > 0.0 && beta <= 1.0, "tempering exponent must lie in (0, 1]");
    struct Visitor {
      double beta;
      BaseDistSpec operator()(const UniformDist& p) const { return uniform(p.lo, p.hi); }
      BaseDistSpec operator()(const GaussianDist& p) const {
        return gaussian(p.mean, p.sd / std::sqrt(beta));
      }
      BaseDistSpec operator()(const GammaDist& p) const {
        return gamma(beta * (p.shape - 1.0) + 1.0, p.scale / beta);
      }
      BaseDistSpec operator()(const BetaDist& p) const {
        return BaseDistSpec::beta(beta * (p.a - 1.0) + 1.0, beta * (p.b - 1.0) + 1.0);
      }
      BaseDistSpec operator()(const LaplaceDist& p) const { return laplace(p.location, p.sd / beta); }
    };
    return std::visit(Visitor{beta}, params_);
  }

  bool operator==(const BaseDistSpec& other) const { return params_ == other.params_; }

 private:
  explicit BaseDistSpec(Params p) : params_(p), log_norm_(compute_log_norm(p)) {}

  static void require(bool ok, const char* message) {
    if (!ok) throw ConfigError(message);
  }

  static double compute_log_norm(const Params& params) {
    struct Visitor {
      double operator()(const UniformDist& p) const { return -std::log(p.hi - p.lo); }
      double operator()(const GaussianDist& p) const {
        return -std::log(p.sd) - 0.5 * std::log(2.0 * std::numbers::pi);
      }
      double operator()(const GammaDist& p) const {
        return -std::lgamma(p.shape) - p.shape * std::log(p.scale);
      }
      double operator()(const BetaDist& p) const {
        return std::lgamma(p.a + p.b) - std::lgamma(p.a) - std::lgamma(p.b);
      }
      double operator()(const LaplaceDist& p) const {
        return -std::log(std::numbers::sqrt2 * p.sd);
      }
    };
    return std::visit(Visitor{}, params);
  }

  Params params_;
  double log_norm_;
};

inline double sample(const BaseDistSpec& dist, RngStream& rng) { return dist.sample(rng); }

}  // namespace mcmc_lab
