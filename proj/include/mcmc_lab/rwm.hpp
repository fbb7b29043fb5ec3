#pragma once

// Random-walk Metropolis kernel, chain runner, and pilot scale tuning.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcmc_lab/distributions.hpp"
#include "mcmc_lab/error.hpp"
#include "mcmc_lab/proposals.hpp"
#include "mcmc_lab/rng.hpp"
#include "mcmc_lab/targets.hpp"

namespace mcmc_lab {

/// min(1, exp(log_pi_proposed - log_pi_current)).
///
/// The current state must be inside the support; a chain sitting at -inf is
/// a programming error.
inline double accept_probability(double log_pi_current, double log_pi_proposed) {
  if (!(log_pi_current > kNegInf) || std::isnan(log_pi_current)) {
    throw std::logic_error("accept_probability: current state lies outside the support");
  }
  if (log_pi_proposed == kNegInf) return 0.0;
  const double diff = log_pi_proposed - log_pi_current;
  return diff >= 0.0 ? 1.0 : std::exp(diff);
}

struct StepOutcome {
  bool accepted = false;
  double sq_jump = 0.0;
};

/// One Metropolis step against pi^beta, in place.
///
/// `log_f` caches the untempered log density of `state` and is updated on
/// acceptance. `buffer` is scratch space of the state's length. A rejected step
/// leaves `state` and `log_f` untouched; sq_jump is ||next - state||^2.
template <class Target>
StepOutcome metropolis_step(std::span<double> state, double& log_f, const Target& target,
                            double beta, const ProposalSpec& proposal, RngStream& rng,
                            std::span<double> buffer) {
  proposal.sample_increment(rng, buffer);
  for (std::size_t i = 0; i < state.size(); ++i) buffer[i] += state[i];
  const double log_f_new = target.log_density(buffer);
  const double current = beta == 1.0 ? log_f : beta * log_f;
  const double proposed = log_f_new == kNegInf ? kNegInf : (beta == 1.0 ? log_f_new : beta * log_f_new);
  const double alpha = accept_probability(current, proposed);
  // u < alpha; alpha == 1 always accepts since u < 1.
  if (!(rng.uniform() < alpha)) return {};
  double sq = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double d = buffer[i] - state[i];
    sq += d * d;
    state[i] = buffer[i];
  }
  log_f = log_f_new;
  return {true, sq};
}

struct RwmStep {
  std::vector<double> next;
  bool accepted = false;
  double sq_jump = 0.0;
};

/// Value-returning form of a single step against the untempered target.
template <class Target>
RwmStep rwm_step(std::span<const double> state, const Target& target,
                 const ProposalSpec& proposal, RngStream& rng) {
  RwmStep out{std::vector<double>(state.begin(), state.end())};
  double log_f = target.log_density(state);
  if (log_f == kNegInf) throw SimulationError("rwm_step: state lies outside the support");
  std::vector<double> buffer(state.size());
  const auto o = metropolis_step(std::span<double>(out.next), log_f, target, 1.0, proposal, rng,
                                 std::span<double>(buffer));
  out.accepted = o.accepted;
  out.sq_jump = o.sq_jump;
  return out;
}

struct ChainStats {
  double esjd = 0.0;
  double acceptance_rate = 0.0;
  std::int64_t n_iters = 0;
  std::int64_t accepted_count = 0;
  std::vector<double> trace_first_component;
  std::vector<double> final_state;
  bool operator==(const ChainStats&) const = default;
};

struct RwmOptions {
  std::int64_t burn_in = 1000;
  /// Record the first coordinate every `trace_every` counted steps; 0 disables.
  std::int64_t trace_every = 0;
};

struct NoObserver {
  void operator()(std::span<const double>) const noexcept {}
};

/// Runs n_iters counted transitions after `options.burn_in` discarded ones.
///
/// esjd = (1/n_iters) * sum of squared jumps over counted transitions and
/// acceptance_rate = accepted_count / n_iters. `observer` sees the state after
/// every counted transition (and the initial counted state first).
template <class Target, class Observer = NoObserver>
ChainStats run_rwm(const Target& target, const ProposalSpec& proposal, std::int64_t n_iters,
                   RngStream& rng, std::vector<double> init, const RwmOptions& options = {},
                   Observer&& observer = {}) {
  if (n_iters < 2) throw ConfigError("run_rwm requires n_iters >= 2");
  if (options.burn_in < 0) throw ConfigError("burn_in must be non-negative");
  if (init.size() != target.dimension() || proposal.dimension() != target.dimension()) {
    throw ConfigError("run_rwm: dimension mismatch between target, proposal and init");
  }
  double log_f = target.log_density(init);
  if (log_f == kNegInf) throw SimulationError("run_rwm: initial state lies outside the support");

  std::vector<double> buffer(init.size());
  std::span<double> state(init);
  for (std::int64_t t = 0; t < options.burn_in; ++t) {
    metropolis_step(state, log_f, target, 1.0, proposal, rng, std::span<double>(buffer));
  }

  ChainStats stats;
  stats.n_iters = n_iters;
  if (options.trace_every > 0) {
    stats.trace_first_component.reserve(static_cast<std::size_t>(n_iters / options.trace_every + 1));
  }
  observer(std::span<const double>(state));
  double sum_sq = 0.0;
  for (std::int64_t t = 0; t < n_iters; ++t) {
    const auto o = metropolis_step(state, log_f, target, 1.0, proposal, rng, std::span<double>(buffer));
    if (o.accepted) {
      ++stats.accepted_count;
      sum_sq += o.sq_jump;
    }
    observer(std::span<const double>(state));
    if (options.trace_every > 0 && (t + 1) % options.trace_every == 0) {
      stats.trace_first_component.push_back(state[0]);
    }
  }
  stats.esjd = sum_sq / static_cast<double>(n_iters);
  stats.acceptance_rate = static_cast<double>(stats.accepted_count) / static_cast<double>(n_iters);
  stats.final_state = std::move(init);
  return stats;
}

/// Bisection on log(scale) for a proposal whose acceptance on pi^beta is near
/// `target_rate`. Each probe is a fresh `pilot_iters`-step chain from the
/// central point; acceptance is treated as decreasing in the scale.
template <class Target>
double tune_scale(const Target& target, ProposalKind kind, double target_rate,
                  std::int64_t pilot_iters, RngStream& rng, double beta = 1.0,
                  int bisection_steps = 24) {
  if (!(target_rate > 0.0 && target_rate < 1.0)) throw ConfigError("target rate must lie in (0, 1)");
  const auto start = target.central_point();
  double lo = std::log(1e-4), hi = std::log(1e4);
  std::vector<double> state, buffer(start.size());
  for (int step = 0; step < bisection_steps; ++step) {
    const double mid = 0.5 * (lo + hi);
    const auto proposal = ProposalSpec::from_scale(kind, std::exp(mid), target.dimension());
    state = start;
    double log_f = target.log_density(state);
    std::int64_t accepted = 0;
    for (std::int64_t t = 0; t < pilot_iters; ++t) {
      accepted += metropolis_step(std::span<double>(state), log_f, target, beta, proposal, rng,
                                  std::span<double>(buffer)).accepted;
    }
    const double rate = static_cast<double>(accepted) / static_cast<double>(pilot_iters);
    (rate > target_rate ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

}  // namespace mcmc_lab
