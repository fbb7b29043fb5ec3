#pragma once

// Symmetric increment proposals Q(eps) = Q(-eps) with i.i.d. components.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcmc_lab/distributions.hpp"
#include "mcmc_lab/error.hpp"
#include "mcmc_lab/rng.hpp"

namespace mcmc_lab {

enum class ProposalKind { gaussian, laplace, uniform };

inline std::string_view to_string(ProposalKind kind) noexcept {
  switch (kind) {
    case ProposalKind::gaussian: return "gaussian";
    case ProposalKind::laplace: return "laplace";
    default: return "uniform";
  }
}

inline ProposalKind proposal_kind_from_string(std::string_view name) {
  if (name == "gaussian") return ProposalKind::gaussian;
  if (name == "laplace") return ProposalKind::laplace;
  if (name == "uniform") return ProposalKind::uniform;
  throw ConfigError("unknown proposal kind '" + std::string(name) + "'");
}

/// Increment proposal with one scalar scale.
///
/// gaussian: N(0, scale^2) per component.
/// laplace:  double exponential with per-component standard deviation `scale`.
/// uniform:  Uniform[-scale/2, scale/2] per component (`scale` is the interval length).
class ProposalSpec {
 public:
  static ProposalSpec from_scale(ProposalKind kind, double scale, std::size_t dimension) {
    return ProposalSpec(kind, scale, dimension);
  }

  /// scale = ell / sqrt(d).
  static ProposalSpec from_ell(ProposalKind kind, double ell, std::size_t dimension) {
    if (dimension == 0) throw ConfigError("proposal dimension must be positive");
    return ProposalSpec(kind, ell_to_scale(ell, dimension), dimension);
  }

  static double ell_to_scale(double ell, std::size_t dimension) {
    return ell / std::sqrt(static_cast<double>(dimension));
  }

  ProposalKind kind() const noexcept { return kind_; }
  double scale() const noexcept { return scale_; }
  std::size_t dimension() const noexcept { return dimension_; }

  void sample_increment(RngStream& rng, std::span<double> out) const {
    check_dimension(out.size());
    switch (kind_) {
      case ProposalKind::gaussian:
        for (double& e : out) e = scale_ * rng.normal();
        break;
      case ProposalKind::laplace:
        for (double& e : out) e = sample_laplace(0.0, scale_, rng);
        break;
      case ProposalKind::uniform:
        for (double& e : out) e = scale_ * (rng.uniform() - 0.5);
        break;
    }
  }

  std::vector<double> sample_increment(RngStream& rng) const {
    std::vector<double> out(dimension_);
    sample_increment(rng, out);
    return out;
  }

  /// log Q(eps) without the normalizing constant; -inf outside the support.
  double increment_log_density(std::span<const double> eps) const {
    check_dimension(eps.size());
    double total = 0.0;
    switch (kind_) {
      case ProposalKind::gaussian: {
        const double inv = 1.0 / (scale_ * scale_);
        for (double e : eps) total -= 0.5 * e * e * inv;
        return total;
      }
      case ProposalKind::laplace: {
        const double inv_b = std::numbers::sqrt2 / scale_;
        for (double e : eps) total -= std::abs(e) * inv_b;
        return total;
      }
      default: {
        const double half = 0.5 * scale_;
        for (double e : eps) {
          if (std::abs(e) > half) return kNegInf;
        }
        return 0.0;
      }
    }
  }

 private:
  ProposalSpec(ProposalKind kind, double scale, std::size_t dimension)
      : kind_(kind), scale_(scale), dimension_(dimension) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("proposal scale must be positive");
    if (dimension == 0) throw ConfigError("proposal dimension must be positive");
  }

  void check_dimension(std::size_t n) const {
    if (n != dimension_) {
      throw ConfigError("increment has dimension " + std::to_string(n) + ", proposal expects " +
                        std::to_string(dimension_));
    }
  }

  ProposalKind kind_;
  double scale_;
  std::size_t dimension_;
};

inline std::vector<double> sample_increment(const ProposalSpec& spec, RngStream& rng) {
  return spec.sample_increment(rng);
}

inline double increment_log_density(const ProposalSpec& spec, std::span<const double> eps) {
  return spec.increment_log_density(eps);
}

}  // namespace mcmc_lab
