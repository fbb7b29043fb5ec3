#pragma once

// Target densities: log-density evaluation, tempering by a power beta, and
// direct sampling from the tempered density.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mcmc_lab/distributions.hpp"
#include "mcmc_lab/error.hpp"
#include "mcmc_lab/rng.hpp"

namespace mcmc_lab {

/// Product of identical one-dimensional components.
struct IidProduct {
  BaseDistSpec component;
  bool operator==(const IidProduct&) const = default;
};

/// Uniform density on [lo, hi]^d.
struct Hypercube {
  double lo = 0.0;
  double hi = 1.0;
  bool operator==(const Hypercube&) const = default;
};

/// prod_i C_i f(C_i x_i) with f a three-component unit-variance Gaussian mixture.
/// An empty scaling vector means C_i = 1 for all i.
struct RoughCarpet {
  std::array<double, 3> means{-5.0, 0.0, 5.0};
  std::array<double, 3> weights{0.5, 0.3, 0.2};
  std::vector<double> scaling;
  bool operator==(const RoughCarpet&) const = default;
};

/// sum_k w_k N(x | mu_k, diag(C)). An empty covariance diagonal means identity.
struct ThreeMixture {
  std::array<double, 3> weights{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  std::array<std::vector<double>, 3> means;
  std::vector<double> covariance_diagonal;
  bool operator==(const ThreeMixture&) const = default;
};

struct StdGaussian {
  bool operator==(const StdGaussian&) const = default;
};

namespace detail {

inline double log_sum_exp3(double a, double b, double c) noexcept {
  const double m = std::max({a, b, c});
  if (m == kNegInf) return kNegInf;
  return m + std::log(std::exp(a - m) + std::exp(b - m) + std::exp(c - m));
}

inline void check_weights(const std::array<double, 3>& w) {
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("mixture weights must be non-negative");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("mixture weights must sum to 1");
}

// Index drawn with probability proportional to exp(log_w[k]).
inline std::size_t pick_component(const std::array<double, 3>& log_w, RngStream& rng) {
  const double m = std::max({log_w[0], log_w[1], log_w[2]});
  const std::array<double, 3> p{std::exp(log_w[0] - m), std::exp(log_w[1] - m),
                                std::exp(log_w[2] - m)};
  double u = rng.uniform() * (p[0] + p[1] + p[2]);
  for (std::size_t k = 0; k < 2; ++k) {
    if (u < p[k]) return k;
    u -= p[k];
  }
  return p[2] > 0.0 ? 2 : (p[1] > 0.0 ? 1 : 0);
}

}  // namespace detail

/// Immutable target density on R^d. Safe to share across threads.
class TargetDensity {
 public:
  using Family = std::variant<IidProduct, Hypercube, RoughCarpet, ThreeMixture, StdGaussian>;

  TargetDensity(Family family, std::size_t dimension)
      : family_(std::move(family)), dimension_(dimension) {
    if (dimension_ == 0) throw ConfigError("target dimension must be positive");
    validate_and_precompute();
  }

  std::size_t dimension() const noexcept { return dimension_; }
  const Family& family() const noexcept { return family_; }

  std::string_view family_name() const noexcept {
    static constexpr std::string_view names[] = {"iid_product", "hypercube", "rough_carpet",
                                                 "three_mixture", "std_gaussian"};
    return names[family_.index()];
  }

  /// Per-coordinate scaling factors C (carpet) or covariance diagonal (mixture);
  /// empty for homogeneous targets.
  std::span<const double> scaling_factors() const noexcept {
    if (const auto* c = std::get_if<RoughCarpet>(&family_)) return c->scaling;
    if (const auto* m = std::get_if<ThreeMixture>(&family_)) return m->covariance_diagonal;
    return {};
  }

  /// log pi(x) including closed-form normalizing constants; -inf outside the support.
  double log_density(std::span<const double> x) const {
    check_dimension(x.size());
    switch (family_.index()) {
      case 0: {
        const auto& comp = std::get<IidProduct>(family_).component;
        double total = 0.0;
        for (double xi : x) {
          const double l = comp.log_pdf(xi);
          if (l == kNegInf) return kNegInf;
          total += l;
        }
        return total;
      }
      case 1: {
        const auto& cube = std::get<Hypercube>(family_);
        for (double xi : x) {
          if (xi < cube.lo || xi > cube.hi) return kNegInf;
        }
        return log_norm_;
      }
      case 2: return carpet_log_density(std::get<RoughCarpet>(family_), x);
      case 3: return mixture_log_density(std::get<ThreeMixture>(family_), x);
      default: {
        double ss = 0.0;
        for (double xi : x) ss += xi * xi;
        return log_norm_ - 0.5 * ss;
      }
    }
  }

  /// beta * log pi(x); -inf stays -inf.
  double tempered_log_density(std::span<const double> x, double beta) const {
    check_beta(beta);
    const double l = log_density(x);
    return l == kNegInf ? l : beta * l;
  }

  /// Draw from the density proportional to pi^beta.
  ///
  /// Exact for the Gaussian, iid-product and hypercube families. The carpet and
  /// the three-mixture use the well-separated-mode scheme: pick component k with
  /// probability proportional to w_k^beta, then draw from that Gaussian with its
  /// variance divided by beta (per coordinate for the carpet).
  void direct_tempered_sample(double beta, RngStream& rng, std::span<double> out) const {
    check_beta(beta);
    check_dimension(out.size());
    switch (family_.index()) {
      case 0: {
        const auto tempered = std::get<IidProduct>(family_).component.tempered(beta);
        for (double& xi : out) xi = tempered.sample(rng);
        return;
      }
      case 1: {
        const auto& cube = std::get<Hypercube>(family_);
        for (double& xi : out) xi = cube.lo + (cube.hi - cube.lo) * rng.uniform();
        return;
      }
      case 2: {
        const auto& carpet = std::get<RoughCarpet>(family_);
        std::array<double, 3> log_w{};
        for (std::size_t k = 0; k < 3; ++k) log_w[k] = beta * std::log(carpet.weights[k]);
        const double sd = 1.0 / std::sqrt(beta);
        for (std::size_t i = 0; i < dimension_; ++i) {
          const std::size_t k = detail::pick_component(log_w, rng);
          const double y = carpet.means[k] + sd * rng.normal();
          out[i] = carpet.scaling.empty() ? y : y / carpet.scaling[i];
        }
        return;
      }
      case 3: {
        const auto& mix = std::get<ThreeMixture>(family_);
        std::array<double, 3> log_w{};
        for (std::size_t k = 0; k < 3; ++k) log_w[k] = beta * std::log(mix.weights[k]);
        const std::size_t k = detail::pick_component(log_w, rng);
        for (std::size_t i = 0; i < dimension_; ++i) {
          const double var = mix.covariance_diagonal.empty() ? 1.0 : mix.covariance_diagonal[i];
          out[i] = mix.means[k][i] + std::sqrt(var / beta) * rng.normal();
        }
        return;
      }
      default: {
        const double sd = 1.0 / std::sqrt(beta);
        for (double& xi : out) xi = sd * rng.normal();
        return;
      }
    }
  }

  std::vector<double> direct_tempered_sample(double beta, RngStream& rng) const {
    std::vector<double> out(dimension_);
    direct_tempered_sample(beta, rng, out);
    return out;
  }

  /// Deterministic starting point inside the support: component mean for iid
  /// products, the cube midpoint, the weighted mean of means for mixtures.
  std::vector<double> central_point() const {
    std::vector<double> x(dimension_, 0.0);
    switch (family_.index()) {
      case 0:
        std::fill(x.begin(), x.end(), std::get<IidProduct>(family_).component.mean());
        break;
      case 1: {
        const auto& cube = std::get<Hypercube>(family_);
        std::fill(x.begin(), x.end(), 0.5 * (cube.lo + cube.hi));
        break;
      }
      case 2: {
        const auto& carpet = std::get<RoughCarpet>(family_);
        const double m = std::inner_product(carpet.means.begin(), carpet.means.end(),
                                            carpet.weights.begin(), 0.0);
        for (std::size_t i = 0; i < dimension_; ++i) {
          x[i] = carpet.scaling.empty() ? m : m / carpet.scaling[i];
        }
        break;
      }
      case 3: {
        const auto& mix = std::get<ThreeMixture>(family_);
        for (std::size_t k = 0; k < 3; ++k) {
          for (std::size_t i = 0; i < dimension_; ++i) x[i] += mix.weights[k] * mix.means[k][i];
        }
        break;
      }
      default:
        break;
    }
    return x;
  }

  bool operator==(const TargetDensity& other) const {
    return dimension_ == other.dimension_ && family_ == other.family_;
  }

 private:
  void check_dimension(std::size_t n) const {
    if (n != dimension_) {
      throw ConfigError("point has dimension " + std::to_string(n) + ", target expects " +
                        std::to_string(dimension_));
    }
  }

  static void check_beta(double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("inverse temperature must lie in (0, 1]");
  }

  static void check_positive(std::span<const double> v, const char* what) {
    for (double c : v) {
      if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError(std::string(what) + " must be positive");
    }
  }

  void validate_and_precompute() {
    constexpr double log_2pi = 1.8378770664093454835606594728112;  // ln(2 pi)
    switch (family_.index()) {
      case 0:
        break;
      case 1: {
        const auto& cube = std::get<Hypercube>(family_);
        if (!(cube.lo < cube.hi) || !std::isfinite(cube.lo) || !std::isfinite(cube.hi)) {
          throw ConfigError("hypercube requires lo < hi");
        }
        log_norm_ = -static_cast<double>(dimension_) * std::log(cube.hi - cube.lo);
        break;
      }
      case 2: {
        const auto& carpet = std::get<RoughCarpet>(family_);
        detail::check_weights(carpet.weights);
        if (!carpet.scaling.empty()) {
          if (carpet.scaling.size() != dimension_) {
            throw ConfigError("carpet scaling vector length must equal the dimension");
          }
          check_positive(carpet.scaling, "scaling factors");
        }
        for (std::size_t k = 0; k < 3; ++k) {
          carpet_log_w_[k] = std::log(carpet.weights[k]) - 0.5 * log_2pi;
        }
        log_norm_ = 0.0;
        for (double c : carpet.scaling) log_norm_ += std::log(c);
        break;
      }
      case 3: {
        auto& mix = std::get<ThreeMixture>(family_);
        detail::check_weights(mix.weights);
        for (const auto& mu : mix.means) {
          if (mu.size() != dimension_) throw ConfigError("mixture means must have the target dimension");
        }
        if (!mix.covariance_diagonal.empty()) {
          if (mix.covariance_diagonal.size() != dimension_) {
            throw ConfigError("covariance diagonal length must equal the dimension");
          }
          check_positive(mix.covariance_diagonal, "covariance diagonal");
        }
        double log_det = 0.0;
        inv_var_.assign(dimension_, 1.0);
        for (std::size_t i = 0; i < mix.covariance_diagonal.size(); ++i) {
          log_det += std::log(mix.covariance_diagonal[i]);
          inv_var_[i] = 1.0 / mix.covariance_diagonal[i];
        }
        log_norm_ = -0.5 * (static_cast<double>(dimension_) * log_2pi + log_det);
        for (std::size_t k = 0; k < 3; ++k) mixture_log_w_[k] = std::log(mix.weights[k]);
        break;
      }
      default:
        log_norm_ = -0.5 * static_cast<double>(dimension_) * log_2pi;
        break;
    }
  }

  double carpet_component(const RoughCarpet& c, double y) const noexcept {
    const double d0 = y - c.means[0], d1 = y - c.means[1], d2 = y - c.means[2];
    return detail::log_sum_exp3(carpet_log_w_[0] - 0.5 * d0 * d0, carpet_log_w_[1] - 0.5 * d1 * d1,
                                carpet_log_w_[2] - 0.5 * d2 * d2);
  }

  double carpet_log_density(const RoughCarpet& c, std::span<const double> x) const noexcept {
    double total = log_norm_;
    if (c.scaling.empty()) {
      for (double xi : x) total += carpet_component(c, xi);
    } else {
      for (std::size_t i = 0; i < x.size(); ++i) total += carpet_component(c, c.scaling[i] * x[i]);
    }
    return total;
  }

  double mixture_log_density(const ThreeMixture& m, std::span<const double> x) const noexcept {
    std::array<double, 3> q{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double w = inv_var_[i];
      const double d0 = x[i] - m.means[0][i], d1 = x[i] - m.means[1][i], d2 = x[i] - m.means[2][i];
      q[0] += d0 * d0 * w;
      q[1] += d1 * d1 * w;
      q[2] += d2 * d2 * w;
    }
    return log_norm_ + detail::log_sum_exp3(mixture_log_w_[0] - 0.5 * q[0],
                                            mixture_log_w_[1] - 0.5 * q[1],
                                            mixture_log_w_[2] - 0.5 * q[2]);
  }

  Family family_;
  std::size_t dimension_;
  double log_norm_ = 0.0;
  std::array<double, 3> carpet_log_w_{};
  std::array<double, 3> mixture_log_w_{};
  std::vector<double> inv_var_;
};

inline double log_density(const TargetDensity& target, std::span<const double> x) {
  return target.log_density(x);
}

inline double tempered_log_density(const TargetDensity& target, std::span<const double> x,
                                   double beta) {
  return target.tempered_log_density(x, beta);
}

inline std::vector<double> direct_tempered_sample(const TargetDensity& target, double beta,
                                                  RngStream& rng) {
  return target.direct_tempered_sample(beta, rng);
}

/// Means (eps, 0, ..., 0), 0, (-eps, 0, ..., 0) in d dimensions.
inline std::array<std::vector<double>, 3> separated_means(double epsilon, std::size_t dimension) {
  std::array<std::vector<double>, 3> means;
  for (auto& m : means) m.assign(dimension, 0.0);
  if (dimension > 0) {
    means[0][0] = epsilon;
    means[2][0] = -epsilon;
  }
  return means;
}

/// C_i ~ Uniform(0, 2) i.i.d., drawn from a stream owned by `scaling_seed`.
inline std::vector<double> draw_scaling_factors(std::uint64_t scaling_seed, std::size_t dimension) {
  auto rng = derive_stream(scaling_seed, {Label{std::string("scaling_factors")}});
  std::vector<double> c(dimension);
  for (double& ci : c) ci = 2.0 * rng.uniform_open();
  return c;
}

}  // namespace mcmc_lab
