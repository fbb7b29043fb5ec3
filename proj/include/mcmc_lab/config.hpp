#pragma once

// JSON config records for targets, proposals and sweeps.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcmc_lab/distributions.hpp"
#include "mcmc_lab/error.hpp"
#include "mcmc_lab/proposals.hpp"
#include "mcmc_lab/targets.hpp"
#include "mcmc_lab/tempering.hpp"

namespace mcmc_lab {

using json = nlohmann::json;

namespace detail {

inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                                const char* where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  std::set<std::string> names(allowed.begin(), allowed.end());
  for (const auto& item : j.items()) {
    if (!names.count(item.key())) {
      throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid value for '") + key + "': " + e.what());
  }
}

template <class T>
T get_required(const json& j, const char* key, const char* where) {
  if (!j.contains(key)) throw ConfigError(std::string("missing '") + key + "' in " + where);
  return get_or<T>(j, key, T{});
}

}  // namespace detail

inline BaseDistSpec base_dist_from_json(const json& j) {
  const auto kind = detail::get_required<std::string>(j, "kind", "component");
  if (kind == "uniform") {
    detail::reject_unknown_keys(j, {"kind", "lo", "hi"}, "uniform component");
    return BaseDistSpec::uniform(detail::get_or(j, "lo", 0.0), detail::get_or(j, "hi", 1.0));
  }
  if (kind == "gaussian") {
    detail::reject_unknown_keys(j, {"kind", "mean", "sd"}, "gaussian component");
    return BaseDistSpec::gaussian(detail::get_or(j, "mean", 0.0), detail::get_or(j, "sd", 1.0));
  }
  if (kind == "gamma") {
    detail::reject_unknown_keys(j, {"kind", "shape", "scale"}, "gamma component");
    return BaseDistSpec::gamma(detail::get_required<double>(j, "shape", "gamma component"),
                               detail::get_required<double>(j, "scale", "gamma component"));
  }
  if (kind == "beta") {
    detail::reject_unknown_keys(j, {"kind", "a", "b"}, "beta component");
    return BaseDistSpec::beta(detail::get_required<double>(j, "a", "beta component"),
                              detail::get_required<double>(j, "b", "beta component"));
  }
  if (kind == "laplace") {
    detail::reject_unknown_keys(j, {"kind", "location", "sd"}, "laplace component");
    return BaseDistSpec::laplace(detail::get_or(j, "location", 0.0), detail::get_or(j, "sd", 1.0));
  }
  throw ConfigError("unknown component distribution '" + kind + "'");
}

inline json to_json(const BaseDistSpec& dist) {
  struct Visitor {
    json operator()(const UniformDist& p) const { return {{"kind", "uniform"}, {"lo", p.lo}, {"hi", p.hi}}; }
    json operator()(const GaussianDist& p) const {
      return {{"kind", "gaussian"}, {"mean", p.mean}, {"sd", p.sd}};
    }
    json operator()(const GammaDist& p) const {
      return {{"kind", "gamma"}, {"shape", p.shape}, {"scale", p.scale}};
    }
    json operator()(const BetaDist& p) const { return {{"kind", "beta"}, {"a", p.a}, {"b", p.b}}; }
    json operator()(const LaplaceDist& p) const {
      return {{"kind", "laplace"}, {"location", p.location}, {"sd", p.sd}};
    }
  };
  return std::visit(Visitor{}, dist.params());
}

/// Declarative target description as it appears in config files.
struct TargetSpec {
  std::string family;
  std::size_t dimension = 0;
  std::optional<BaseDistSpec> component;             // iid_product
  double lo = 0.0, hi = 1.0;                         // hypercube
  std::array<double, 3> modes{-5.0, 0.0, 5.0};       // rough_carpet
  std::optional<std::array<double, 3>> weights;      // rough_carpet, three_mixture
  double epsilon = 5.0;                              // three_mixture
  std::optional<std::array<std::vector<double>, 3>> means;  // three_mixture, explicit
  bool inhomogeneous = false;
  std::uint64_t scaling_seed = 0;
  std::vector<double> scaling_factors;  // explicit C; overrides the seeded draw

  bool operator==(const TargetSpec&) const = default;
};

inline TargetSpec target_spec_from_json(const json& j) {
  detail::reject_unknown_keys(j, {"family", "dimension", "component", "lo", "hi", "modes", "weights",
                                  "epsilon", "means", "inhomogeneous", "scaling_seed",
                                  "scaling_factors"},
                              "target");
  TargetSpec spec;
  spec.family = detail::get_required<std::string>(j, "family", "target");
  if (spec.family == "gaussian") spec.family = "std_gaussian";
  const auto dim = detail::get_required<std::int64_t>(j, "dimension", "target");
  if (dim <= 0) throw ConfigError("target dimension must be positive");
  spec.dimension = static_cast<std::size_t>(dim);
  if (j.contains("component")) spec.component = base_dist_from_json(j.at("component"));
  spec.lo = detail::get_or(j, "lo", 0.0);
  spec.hi = detail::get_or(j, "hi", 1.0);
  spec.modes = detail::get_or(j, "modes", spec.modes);
  if (j.contains("weights")) spec.weights = detail::get_or(j, "weights", std::array<double, 3>{});
  spec.epsilon = detail::get_or(j, "epsilon", 5.0);
  if (j.contains("means")) {
    spec.means = detail::get_or(j, "means", std::array<std::vector<double>, 3>{});
  }
  spec.inhomogeneous = detail::get_or(j, "inhomogeneous", false);
  spec.scaling_seed = detail::get_or<std::uint64_t>(j, "scaling_seed", 0);
  spec.scaling_factors = detail::get_or(j, "scaling_factors", std::vector<double>{});
  return spec;
}

inline json to_json(const TargetSpec& spec) {
  json j{{"family", spec.family}, {"dimension", spec.dimension}};
  if (spec.family == "iid_product" && spec.component) j["component"] = to_json(*spec.component);
  if (spec.family == "hypercube") {
    j["lo"] = spec.lo;
    j["hi"] = spec.hi;
  }
  if (spec.family == "rough_carpet") j["modes"] = spec.modes;
  if (spec.family == "three_mixture") {
    if (spec.means) {
      j["means"] = *spec.means;
    } else {
      j["epsilon"] = spec.epsilon;
    }
  }
  if (spec.weights) j["weights"] = *spec.weights;
  if (spec.family == "rough_carpet" || spec.family == "three_mixture") {
    j["inhomogeneous"] = spec.inhomogeneous;
    if (spec.inhomogeneous) j["scaling_seed"] = spec.scaling_seed;
    if (!spec.scaling_factors.empty()) j["scaling_factors"] = spec.scaling_factors;
  }
  return j;
}

/// Builds the target. Inhomogeneous carpets and mixtures get C_i ~ Uniform[0, 2]
/// drawn once from `scaling_seed` unless explicit factors are given.
inline TargetDensity make_target(const TargetSpec& spec) {
  if (spec.dimension == 0) throw ConfigError("target dimension must be positive");
  auto scaling = [&]() -> std::vector<double> {
    if (!spec.scaling_factors.empty()) return spec.scaling_factors;
    if (spec.inhomogeneous) return draw_scaling_factors(spec.scaling_seed, spec.dimension);
    return {};
  };
  if (spec.family == "iid_product") {
    if (!spec.component) throw ConfigError("iid_product target requires a 'component'");
    return TargetDensity(IidProduct{*spec.component}, spec.dimension);
  }
  if (spec.family == "std_gaussian") return TargetDensity(StdGaussian{}, spec.dimension);
  if (spec.family == "hypercube") return TargetDensity(Hypercube{spec.lo, spec.hi}, spec.dimension);
  if (spec.family == "rough_carpet") {
    RoughCarpet carpet;
    carpet.means = spec.modes;
    if (spec.weights) carpet.weights = *spec.weights;
    carpet.scaling = scaling();
    return TargetDensity(std::move(carpet), spec.dimension);
  }
  if (spec.family == "three_mixture") {
    ThreeMixture mix;
    if (spec.weights) mix.weights = *spec.weights;
    mix.means = spec.means ? *spec.means : separated_means(spec.epsilon, spec.dimension);
    mix.covariance_diagonal = scaling();
    return TargetDensity(std::move(mix), spec.dimension);
  }
  throw ConfigError("unknown target family '" + spec.family + "'");
}

inline TargetDensity make_target(const json& j) { return make_target(target_spec_from_json(j)); }

/// {kind, scale | ell, dimension}; exactly one of scale or ell.
inline ProposalSpec proposal_from_json(const json& j, std::size_t target_dimension) {
  detail::reject_unknown_keys(j, {"kind", "scale", "ell", "dimension"}, "proposal");
  const auto kind = proposal_kind_from_string(detail::get_or<std::string>(j, "kind", "gaussian"));
  const auto dim = static_cast<std::size_t>(
      detail::get_or<std::int64_t>(j, "dimension", static_cast<std::int64_t>(target_dimension)));
  if (dim != target_dimension) throw ConfigError("proposal dimension does not match the target");
  const bool has_scale = j.contains("scale"), has_ell = j.contains("ell");
  if (has_scale == has_ell) throw ConfigError("proposal needs exactly one of 'scale' or 'ell'");
  if (has_ell) return ProposalSpec::from_ell(kind, detail::get_or(j, "ell", 0.0), dim);
  return ProposalSpec::from_scale(kind, detail::get_or(j, "scale", 0.0), dim);
}

inline json to_json(const LadderParams& p) {
  return {{"beta_min", p.beta_min}, {"n_samples", p.n_samples}, {"tol", p.tol},
          {"rho_init", p.rho_init}, {"max_inner", p.max_inner}};
}

inline LadderParams ladder_params_from_json(const json& j) {
  detail::reject_unknown_keys(j, {"beta_min", "n_samples", "tol", "rho_init", "max_inner"}, "ladder");
  LadderParams p;
  p.beta_min = detail::get_or(j, "beta_min", p.beta_min);
  p.n_samples = detail::get_or(j, "n_samples", p.n_samples);
  p.tol = detail::get_or(j, "tol", p.tol);
  p.rho_init = detail::get_or(j, "rho_init", p.rho_init);
  p.max_inner = detail::get_or(j, "max_inner", p.max_inner);
  return p;
}

inline json to_json(const TemperatureLadder& ladder) {
  json rungs = json::array();
  for (const auto& r : ladder.rungs) {
    rungs.push_back({{"estimated_swap_acceptance", r.estimated_swap_acceptance},
                     {"inner_iterations", r.inner_iterations}});
  }
  return {{"betas", ladder.betas}, {"target_swap_rate", ladder.target_swap_rate}, {"rungs", rungs}};
}

inline TemperatureLadder ladder_from_json(const json& j) {
  detail::reject_unknown_keys(j, {"betas", "target_swap_rate", "rungs"}, "ladder");
  TemperatureLadder ladder;
  ladder.betas = detail::get_required<std::vector<double>>(j, "betas", "ladder");
  ladder.target_swap_rate = detail::get_or(j, "target_swap_rate", 0.0);
  if (j.contains("rungs")) {
    for (const auto& r : j.at("rungs")) {
      ladder.rungs.push_back({detail::get_or(r, "estimated_swap_acceptance", 0.0),
                              detail::get_or<std::int64_t>(r, "inner_iterations", 0)});
    }
  }
  if (ladder.betas.empty() || ladder.betas.front() != 1.0) throw ConfigError("ladder must start at 1");
  for (std::size_t i = 1; i < ladder.betas.size(); ++i) {
    if (!(ladder.betas[i] < ladder.betas[i - 1] && ladder.betas[i] > 0.0)) {
      throw ConfigError("ladder betas must be strictly decreasing and positive");
    }
  }
  return ladder;
}

}  // namespace mcmc_lab
