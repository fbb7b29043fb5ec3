#pragma once

// Parallel tempering: swap moves between adjacent inverse temperatures,
// temperature-space ESJD, and the swap-rate-calibrated ladder builder.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mcmc_lab/error.hpp"
#include "mcmc_lab/proposals.hpp"
#include "mcmc_lab/rng.hpp"
#include "mcmc_lab/rwm.hpp"
#include "mcmc_lab/targets.hpp"

namespace mcmc_lab {

/// Log of the swap acceptance ratio for exchanging x_j (at beta_j) and x_k
/// (at beta_k): (beta_j - beta_k) * (log f(x_k) - log f(x_j)). The log
/// densities are untempered.
inline double swap_log_ratio(double beta_j, double beta_k, double log_f_xj, double log_f_xk) {
  if (!std::isfinite(log_f_xj) || !std::isfinite(log_f_xk)) {
    throw std::logic_error("swap_log_ratio: chain state outside the support");
  }
  return (beta_j - beta_k) * (log_f_xk - log_f_xj);
}

inline double swap_probability(double log_ratio) noexcept {
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

/// Mean of min(1, exp(r)) over n_samples independent pairs x ~ pi^beta_lo,
/// y ~ pi^beta_hi drawn with the target's direct tempered sampler.
inline double estimate_swap_acceptance(const TargetDensity& target, double beta_lo, double beta_hi,
                                       std::int64_t n_samples, RngStream& rng) {
  if (!(beta_lo > 0.0 && beta_lo <= beta_hi && beta_hi <= 1.0)) {
    throw ConfigError("estimate_swap_acceptance requires 0 < beta_lo <= beta_hi <= 1");
  }
  if (n_samples < 1) throw ConfigError("estimate_swap_acceptance requires n_samples >= 1");
  if (beta_lo == beta_hi) return 1.0;
  std::vector<double> x(target.dimension()), y(target.dimension());
  double total = 0.0;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    target.direct_tempered_sample(beta_lo, rng, x);
    target.direct_tempered_sample(beta_hi, rng, y);
    const double r = swap_log_ratio(beta_hi, beta_lo, target.log_density(y), target.log_density(x));
    total += swap_probability(r);
  }
  return total / static_cast<double>(n_samples);
}

struct LadderParams {
  double beta_min = 0.01;
  std::int64_t n_samples = 3000;
  double tol = 0.005;
  double rho_init = 0.5;
  std::int64_t max_inner = 500;
  bool operator==(const LadderParams&) const = default;
};

/// Calibration record for betas[i], i >= 1.
struct RungInfo {
  double estimated_swap_acceptance = 0.0;
  std::int64_t inner_iterations = 0;
  bool operator==(const RungInfo&) const = default;
};

struct TemperatureLadder {
  std::vector<double> betas;
  double target_swap_rate = 0.0;
  /// rungs[i] describes the pair (betas[i], betas[i + 1]).
  std::vector<RungInfo> rungs;
  bool operator==(const TemperatureLadder&) const = default;

  std::size_t size() const noexcept { return betas.size(); }
};

/// Thrown when the inner calibration loop exceeds max_inner.
class LadderInfeasible : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

/// Builds 1 = beta_0 > beta_1 > ... > beta_K = beta_min.
///
/// For each new rung: rho_1 = rho_init, candidate beta* = beta_curr / (1 + e^rho_n).
/// The mean swap probability a between beta* and beta_curr is estimated from
/// n_samples direct draws; |a - s| <= tol accepts the candidate, otherwise
/// rho_{n+1} = rho_n + n^-0.25 (a - s). A calibrated candidate at or below
/// beta_min ends the ladder with beta_min itself as the last rung, which is
/// exempt from the swap-rate tolerance.
inline TemperatureLadder build_ladder(const TargetDensity& target, double s,
                                      const LadderParams& params, RngStream& rng) {
  if (!(s > 0.0 && s < 1.0)) throw ConfigError("target swap rate must lie in (0, 1)");
  if (!(params.beta_min > 0.0 && params.beta_min < 1.0)) throw ConfigError("beta_min must lie in (0, 1)");
  if (params.n_samples < 1 || params.max_inner < 1 || !(params.tol > 0.0)) {
    throw ConfigError("invalid ladder builder parameters");
  }

  TemperatureLadder ladder;
  ladder.target_swap_rate = s;
  ladder.betas.push_back(1.0);
  double beta_curr = 1.0;

  for (;;) {
    double rho = params.rho_init;
    double candidate = 0.0;
    double a = 0.0;
    std::int64_t n = 1;
    bool calibrated = false;
    for (; n <= params.max_inner; ++n) {
      candidate = beta_curr / (1.0 + std::exp(rho));
      if (!(candidate > 0.0)) break;
      a = estimate_swap_acceptance(target, candidate, beta_curr, params.n_samples, rng);
      if (std::abs(a - s) <= params.tol) {
        calibrated = true;
        break;
      }
      // Swap acceptance falls as the gap widens, so a candidate already below
      // beta_min that swaps at least as often as s would calibrate below it too.
      if (candidate <= params.beta_min && a > s) {
        calibrated = true;
        break;
      }
      rho += std::pow(static_cast<double>(n), -0.25) * (a - s);
    }
    if (!calibrated) {
      std::ostringstream msg;
      msg << "ladder builder did not reach swap rate " << s << " +/- " << params.tol
          << " below beta=" << beta_curr << " within " << params.max_inner
          << " iterations (last estimate " << a << ") for target " << target.family_name()
          << " d=" << target.dimension();
      throw LadderInfeasible(msg.str());
    }
    if (candidate <= params.beta_min) {
      const double last =
          estimate_swap_acceptance(target, params.beta_min, beta_curr, params.n_samples, rng);
      ladder.betas.push_back(params.beta_min);
      ladder.rungs.push_back({last, 0});
      return ladder;
    }
    ladder.betas.push_back(candidate);
    ladder.rungs.push_back({a, n});
    beta_curr = candidate;
  }
}

/// Geometric ladder baseline: 1, r, r^2, ..., beta_min with n_rungs >= 2 betas.
inline TemperatureLadder geometric_ladder(double beta_min, std::size_t n_betas) {
  if (n_betas < 2 || !(beta_min > 0.0 && beta_min < 1.0)) throw ConfigError("invalid geometric ladder");
  TemperatureLadder ladder;
  const double ratio = std::pow(beta_min, 1.0 / static_cast<double>(n_betas - 1));
  for (std::size_t i = 0; i + 1 < n_betas; ++i) ladder.betas.push_back(std::pow(ratio, static_cast<double>(i)));
  ladder.betas.push_back(beta_min);
  ladder.rungs.resize(n_betas - 1);
  return ladder;
}

struct SwapRecord {
  std::size_t pair = 0;      ///< lower index of the adjacent pair (pair, pair + 1)
  double beta_gap = 0.0;     ///< beta_pair - beta_{pair+1}
  double probability = 0.0;  ///< min(1, exp(r))
  bool accepted = false;
};

struct PTStats {
  double temperature_esjd = 0.0;
  double mean_swap_acceptance = 0.0;
  std::int64_t swap_attempts = 0;
  std::int64_t swaps_accepted = 0;
  std::vector<double> per_pair_acceptance;
  std::vector<std::int64_t> per_pair_attempts;
  /// Within-temperature RWM acceptance per chain.
  std::vector<double> within_acceptance;
  /// Within-temperature ESJD per chain (swap moves excluded).
  std::vector<double> within_esjd;
  std::vector<double> cold_chain_trace;
  bool operator==(const PTStats&) const = default;
};

struct PTOptions {
  std::int64_t swap_interval = 20;
  std::int64_t burn_in = 1000;
  std::int64_t trace_every = 0;
  ProposalKind proposal = ProposalKind::gaussian;
  /// Initial state of every chain; the target's central point when empty.
  std::vector<double> init;
};

struct NoSwapObserver {
  void operator()(const SwapRecord&) const noexcept {}
};

/// Within-chain scales sigma_beta = sigma_1 / sqrt(beta).
inline std::vector<double> inverse_sqrt_beta_scales(const TemperatureLadder& ladder, double cold_scale) {
  std::vector<double> scales;
  scales.reserve(ladder.size());
  for (double b : ladder.betas) scales.push_back(cold_scale / std::sqrt(b));
  return scales;
}

/// Attempts to exchange the states of chains j and j + 1 (with their cached
/// log densities). Returns the swap probability and whether it happened.
/// A rejected attempt touches nothing.
inline std::pair<double, bool> attempt_swap(std::vector<std::vector<double>>& states,
                                            std::vector<double>& log_f, std::span<const double> betas,
                                            std::size_t j, RngStream& rng) {
  const double r = swap_log_ratio(betas[j], betas[j + 1], log_f[j], log_f[j + 1]);
  const double p = swap_probability(r);
  const bool accepted = rng.uniform() < p;
  if (accepted) {
    states[j].swap(states[j + 1]);
    std::swap(log_f[j], log_f[j + 1]);
  }
  return {p, accepted};
}

/// Parallel tempering run.
///
/// Every iteration advances each chain by one RWM step on pi^beta_k. Every
/// swap_interval-th iteration also attempts one swap on a uniformly chosen
/// adjacent pair. Statistics cover the n_iters iterations that follow
/// options.burn_in. `observer` sees every counted swap attempt.
template <class Observer = NoSwapObserver>
PTStats run_pt(const TargetDensity& target, const TemperatureLadder& ladder,
               const std::vector<double>& within_scales, std::int64_t n_iters, RngStream& rng,
               const PTOptions& options = {}, Observer&& observer = {}) {
  const std::size_t n_chains = ladder.size();
  if (n_chains < 2) throw ConfigError("run_pt requires a ladder of at least two betas");
  if (within_scales.size() != n_chains) {
    throw ConfigError("run_pt: within_scales length " + std::to_string(within_scales.size()) +
                      " does not match ladder length " + std::to_string(n_chains));
  }
  if (options.swap_interval < 1 || n_iters < options.swap_interval) {
    throw ConfigError("run_pt requires n_iters >= swap_interval >= 1");
  }
  if (ladder.betas.front() != 1.0) throw ConfigError("ladder must start at beta = 1");
  for (std::size_t k = 1; k < n_chains; ++k) {
    // Equal neighbours are allowed here (all-ones ladders are a useful check).
    if (!(ladder.betas[k] <= ladder.betas[k - 1] && ladder.betas[k] > 0.0)) {
      throw ConfigError("ladder betas must be non-increasing and positive");
    }
  }

  const std::size_t d = target.dimension();
  std::vector<ProposalSpec> proposals;
  proposals.reserve(n_chains);
  for (double scale : within_scales) proposals.push_back(ProposalSpec::from_scale(options.proposal, scale, d));

  const std::vector<double> start = options.init.empty() ? target.central_point() : options.init;
  if (start.size() != d) throw ConfigError("run_pt: init has the wrong dimension");
  std::vector<std::vector<double>> states(n_chains, start);
  const double log_f0 = target.log_density(start);
  if (log_f0 == kNegInf) throw SimulationError("run_pt: initial state lies outside the support");
  std::vector<double> log_f(n_chains, log_f0);
  std::vector<double> buffer(d);

  PTStats stats;
  stats.per_pair_acceptance.assign(n_chains - 1, 0.0);
  stats.per_pair_attempts.assign(n_chains - 1, 0);
  std::vector<std::int64_t> pair_accepts(n_chains - 1, 0);
  std::vector<std::int64_t> within_accepts(n_chains, 0);
  std::vector<double> within_sq(n_chains, 0.0);
  double sum_sq = 0.0;

  const std::int64_t total = options.burn_in + n_iters;
  for (std::int64_t t = 0; t < total; ++t) {
    const bool counted = t >= options.burn_in;
    for (std::size_t k = 0; k < n_chains; ++k) {
      const auto o = metropolis_step(std::span<double>(states[k]), log_f[k], target, ladder.betas[k],
                                     proposals[k], rng, std::span<double>(buffer));
      if (counted && o.accepted) {
        ++within_accepts[k];
        within_sq[k] += o.sq_jump;
      }
    }
    if ((t + 1) % options.swap_interval == 0) {
      const auto j = static_cast<std::size_t>(rng.below(n_chains - 1));
      const auto [p, accepted] = attempt_swap(states, log_f, ladder.betas, j, rng);
      if (counted) {
        const double gap = ladder.betas[j] - ladder.betas[j + 1];
        ++stats.swap_attempts;
        ++stats.per_pair_attempts[j];
        if (accepted) {
          ++stats.swaps_accepted;
          ++pair_accepts[j];
          sum_sq += gap * gap;
        }
        observer(SwapRecord{j, gap, p, accepted});
      }
    }
    if (counted && options.trace_every > 0 && (t - options.burn_in + 1) % options.trace_every == 0) {
      stats.cold_chain_trace.push_back(states[0][0]);
    }
  }

  if (stats.swap_attempts > 0) {
    stats.temperature_esjd = sum_sq / static_cast<double>(stats.swap_attempts);
    stats.mean_swap_acceptance =
        static_cast<double>(stats.swaps_accepted) / static_cast<double>(stats.swap_attempts);
  }
  for (std::size_t j = 0; j + 1 < n_chains; ++j) {
    if (stats.per_pair_attempts[j] > 0) {
      stats.per_pair_acceptance[j] =
          static_cast<double>(pair_accepts[j]) / static_cast<double>(stats.per_pair_attempts[j]);
    }
  }
  stats.within_acceptance.reserve(n_chains);
  stats.within_esjd.reserve(n_chains);
  for (std::size_t k = 0; k < n_chains; ++k) {
    stats.within_acceptance.push_back(static_cast<double>(within_accepts[k]) / static_cast<double>(n_iters));
    stats.within_esjd.push_back(within_sq[k] / static_cast<double>(n_iters));
  }
  return stats;
}

}  // namespace mcmc_lab
