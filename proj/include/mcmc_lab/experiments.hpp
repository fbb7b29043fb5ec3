#pragma once

// Sweep orchestration: scale (RWM) and target-swap-rate (PT) grids, seed
// averaging, optimum extraction and JSON persistence.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcmc_lab/config.hpp"
#include "mcmc_lab/error.hpp"
#include "mcmc_lab/parallel.hpp"
#include "mcmc_lab/proposals.hpp"
#include "mcmc_lab/rng.hpp"
#include "mcmc_lab/rwm.hpp"
#include "mcmc_lab/targets.hpp"
#include "mcmc_lab/tempering.hpp"

namespace mcmc_lab {

inline constexpr int kSchemaVersion = 1;

enum class SweepMode { rwm, pt };

/// Geometric ell grid over [ell_min, ell_max] mapped to scale = ell / sqrt(d).
inline std::vector<double> default_scale_grid(std::size_t dimension, double ell_min = 0.1,
                                              double ell_max = 10.0, std::size_t points = 40) {
  if (points == 0 || !(ell_min > 0.0) || !(ell_max >= ell_min)) throw ConfigError("invalid ell grid");
  std::vector<double> grid;
  grid.reserve(points);
  const double a = std::log(ell_min), b = std::log(ell_max);
  for (std::size_t k = 0; k < points; ++k) {
    const double t = points == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(points - 1);
    const double ell = k + 1 == points ? ell_max : (k == 0 ? ell_min : std::exp(a + t * (b - a)));
    grid.push_back(ProposalSpec::ell_to_scale(ell, dimension));
  }
  return grid;
}

/// `points` equally spaced target swap rates over [lo, hi].
inline std::vector<double> default_swap_rate_grid(double lo = 0.02, double hi = 0.8,
                                                  std::size_t points = 40) {
  std::vector<double> grid;
  for (std::size_t k = 0; k < points; ++k) {
    grid.push_back(points == 1 ? lo
                               : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1));
  }
  return grid;
}

struct SweepConfig {
  SweepMode mode = SweepMode::rwm;
  TargetSpec target;
  ProposalKind proposal = ProposalKind::gaussian;
  std::vector<double> scale_grid;
  std::vector<std::int64_t> seeds{0, 1, 2, 3, 4};
  std::int64_t n_iters = 100000;
  std::int64_t burn_in = 1000;
  std::uint64_t base_seed = 0;
  // PT only.
  std::int64_t swap_interval = 20;
  std::vector<double> swap_rate_grid;
  LadderParams ladder;
  double pilot_target_rate = 0.234;
  std::int64_t pilot_iters = 10000;

  bool operator==(const SweepConfig&) const = default;
};

namespace detail {

inline void check_grid(const std::vector<double>& grid, const char* name, double upper) {
  if (grid.empty()) throw ConfigError(std::string(name) + " must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !(grid[i] < upper)) {
      throw ConfigError(std::string(name) + " values must be positive" +
                        (std::isfinite(upper) ? " and below 1" : ""));
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw ConfigError(std::string(name) + " must be strictly increasing");
    }
  }
}

}  // namespace detail

inline void validate(const SweepConfig& cfg) {
  if (cfg.seeds.empty()) throw ConfigError("seeds must not be empty");
  if (cfg.burn_in < 0) throw ConfigError("burn_in must be non-negative");
  if (cfg.mode == SweepMode::rwm) {
    if (cfg.n_iters < 2) throw ConfigError("n_iters must be at least 2");
    detail::check_grid(cfg.scale_grid, "scale_grid", std::numeric_limits<double>::infinity());
  } else {
    if (cfg.swap_interval < 1 || cfg.n_iters < cfg.swap_interval) {
      throw ConfigError("PT requires n_iters >= swap_interval >= 1");
    }
    detail::check_grid(cfg.swap_rate_grid, "swap_rate_grid", 1.0);
  }
}

/// Parses a sweep config. `mode_hint` supplies the mode when the file omits it.
inline SweepConfig sweep_config_from_json(const json& j, std::optional<SweepMode> mode_hint = {}) {
  detail::reject_unknown_keys(j, {"mode", "target", "proposal", "scale_grid", "ell_grid", "seeds",
                                  "n_iters", "burn_in", "base_seed", "swap_interval",
                                  "swap_rate_grid", "ladder", "pilot"},
                              "sweep config");
  SweepConfig cfg;
  if (j.contains("mode")) {
    const auto m = detail::get_or<std::string>(j, "mode", "rwm");
    if (m == "rwm") cfg.mode = SweepMode::rwm;
    else if (m == "pt") cfg.mode = SweepMode::pt;
    else throw ConfigError("mode must be 'rwm' or 'pt'");
  } else if (mode_hint) {
    cfg.mode = *mode_hint;
  }
  if (!j.contains("target")) throw ConfigError("sweep config requires a 'target'");
  cfg.target = target_spec_from_json(j.at("target"));
  if (j.contains("proposal")) {
    const auto& p = j.at("proposal");
    detail::reject_unknown_keys(p, {"kind"}, "sweep proposal");
    cfg.proposal = proposal_kind_from_string(detail::get_or<std::string>(p, "kind", "gaussian"));
  }
  cfg.seeds = detail::get_or(j, "seeds", cfg.seeds);
  cfg.n_iters = detail::get_or<std::int64_t>(j, "n_iters", cfg.mode == SweepMode::rwm ? 100000 : 20000);
  cfg.burn_in = detail::get_or(j, "burn_in", cfg.burn_in);
  cfg.base_seed = detail::get_or(j, "base_seed", cfg.base_seed);
  if (cfg.mode == SweepMode::rwm) {
    if (j.contains("scale_grid") && j.contains("ell_grid")) {
      throw ConfigError("give at most one of 'scale_grid' and 'ell_grid'");
    }
    if (j.contains("scale_grid")) {
      cfg.scale_grid = detail::get_or(j, "scale_grid", std::vector<double>{});
    } else if (j.contains("ell_grid")) {
      const auto& g = j.at("ell_grid");
      detail::reject_unknown_keys(g, {"min", "max", "points"}, "ell_grid");
      cfg.scale_grid = default_scale_grid(cfg.target.dimension, detail::get_or(g, "min", 0.1),
                                          detail::get_or(g, "max", 10.0),
                                          detail::get_or<std::size_t>(g, "points", 40));
    } else {
      cfg.scale_grid = default_scale_grid(cfg.target.dimension);
    }
  } else {
    cfg.swap_interval = detail::get_or(j, "swap_interval", cfg.swap_interval);
    cfg.swap_rate_grid = detail::get_or(j, "swap_rate_grid", default_swap_rate_grid());
    if (j.contains("ladder")) cfg.ladder = ladder_params_from_json(j.at("ladder"));
    if (j.contains("pilot")) {
      const auto& p = j.at("pilot");
      detail::reject_unknown_keys(p, {"target_rate", "iters"}, "pilot");
      cfg.pilot_target_rate = detail::get_or(p, "target_rate", cfg.pilot_target_rate);
      cfg.pilot_iters = detail::get_or(p, "iters", cfg.pilot_iters);
    }
  }
  validate(cfg);
  return cfg;
}

/// Canonical, fully resolved echo of a config (grids expanded, defaults explicit).
inline json to_json(const SweepConfig& cfg) {
  json j{{"mode", cfg.mode == SweepMode::rwm ? "rwm" : "pt"},
         {"target", to_json(cfg.target)},
         {"proposal", {{"kind", to_string(cfg.proposal)}}},
         {"seeds", cfg.seeds},
         {"n_iters", cfg.n_iters},
         {"burn_in", cfg.burn_in},
         {"base_seed", cfg.base_seed}};
  if (cfg.mode == SweepMode::rwm) {
    j["scale_grid"] = cfg.scale_grid;
  } else {
    j["swap_interval"] = cfg.swap_interval;
    j["swap_rate_grid"] = cfg.swap_rate_grid;
    j["ladder"] = to_json(cfg.ladder);
    j["pilot"] = {{"target_rate", cfg.pilot_target_rate}, {"iters", cfg.pilot_iters}};
  }
  return j;
}

struct SeedOutcome {
  std::int64_t seed = 0;
  double acceptance_rate = 0.0;
  double esjd = 0.0;
  bool operator==(const SeedOutcome&) const = default;
};

struct SweepRow {
  std::size_t grid_index = 0;
  double grid_value = 0.0;
  std::vector<SeedOutcome> per_seed;
  double mean_acceptance_rate = 0.0;
  double mean_esjd = 0.0;
  /// Non-empty when the grid point could not be run (PT: infeasible ladder).
  std::string error;
  bool operator==(const SweepRow&) const = default;
  bool ok() const noexcept { return error.empty(); }
};

struct Optimum {
  double acceptance_rate_at_max_esjd = 0.0;
  double max_esjd = 0.0;
  std::size_t grid_index = 0;
  bool operator==(const Optimum&) const = default;
};

struct SweepResult {
  int schema_version = kSchemaVersion;
  json config;
  std::vector<SweepRow> rows;
  Optimum optimum;
  std::vector<double> scaling_factors;
  /// PT only: one entry per row, empty when the ladder could not be built.
  std::vector<std::optional<TemperatureLadder>> ladders;
  /// PT only: cold-chain within-temperature scale from the pilot tuning.
  std::optional<double> cold_scale;
  /// Wall-clock metadata, omitted in deterministic mode.
  json run_info;
  bool operator==(const SweepResult&) const = default;
};

/// Argmax of seed-averaged ESJD over rows without errors; ties go to the
/// smaller grid index.
inline Optimum find_optimum(std::span<const SweepRow> rows) {
  std::optional<Optimum> best;
  for (const auto& row : rows) {
    if (!row.ok()) continue;
    if (!best || row.mean_esjd > best->max_esjd) {
      best = Optimum{row.mean_acceptance_rate, row.mean_esjd, row.grid_index};
    }
  }
  if (!best) throw SimulationError("find_optimum: no usable rows");
  return *best;
}

namespace detail {

inline void finalize_row(SweepRow& row) {
  double acc = 0.0, esjd = 0.0;
  for (const auto& s : row.per_seed) {
    acc += s.acceptance_rate;
    esjd += s.esjd;
  }
  const auto n = static_cast<double>(row.per_seed.size());
  row.mean_acceptance_rate = acc / n;
  row.mean_esjd = esjd / n;
}

}  // namespace detail

struct ExecutionOptions {
  std::size_t workers = default_worker_count();
};

inline SweepResult sweep_rwm(const SweepConfig& cfg, const ExecutionOptions& exec = {}) {
  if (cfg.mode != SweepMode::rwm) throw ConfigError("sweep_rwm requires mode 'rwm'");
  validate(cfg);
  const TargetDensity target = make_target(cfg.target);
  const auto init = target.central_point();
  const std::size_t n_seeds = cfg.seeds.size();

  SweepResult result;
  result.config = to_json(cfg);
  result.scaling_factors.assign(target.scaling_factors().begin(), target.scaling_factors().end());
  result.rows.resize(cfg.scale_grid.size());
  for (std::size_t i = 0; i < cfg.scale_grid.size(); ++i) {
    result.rows[i].grid_index = i;
    result.rows[i].grid_value = cfg.scale_grid[i];
    result.rows[i].per_seed.resize(n_seeds);
  }

  parallel_for(cfg.scale_grid.size() * n_seeds, exec.workers, [&](std::size_t task) {
    const std::size_t i = task / n_seeds, s = task % n_seeds;
    const auto seed = cfg.seeds[s];
    try {
      auto rng = derive_stream(cfg.base_seed, {Label{std::string("rwm")},
                                               Label{static_cast<std::int64_t>(i)}, Label{seed}});
      const auto proposal = ProposalSpec::from_scale(cfg.proposal, cfg.scale_grid[i], target.dimension());
      const auto stats = run_rwm(target, proposal, cfg.n_iters, rng, init, RwmOptions{cfg.burn_in, 0});
      result.rows[i].per_seed[s] = {seed, stats.acceptance_rate, stats.esjd};
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "RWM sweep failed at grid point " << i << " (scale " << cfg.scale_grid[i] << "), seed "
          << seed << ": " << e.what();
      throw SimulationError(msg.str());
    }
  });

  for (auto& row : result.rows) detail::finalize_row(row);
  result.optimum = find_optimum(result.rows);
  return result;
}

inline SweepResult sweep_pt(const SweepConfig& cfg, const ExecutionOptions& exec = {}) {
  if (cfg.mode != SweepMode::pt) throw ConfigError("sweep_pt requires mode 'pt'");
  validate(cfg);
  const TargetDensity target = make_target(cfg.target);
  const std::size_t n_rates = cfg.swap_rate_grid.size();
  const std::size_t n_seeds = cfg.seeds.size();

  SweepResult result;
  result.config = to_json(cfg);
  result.scaling_factors.assign(target.scaling_factors().begin(), target.scaling_factors().end());

  auto pilot_rng = derive_stream(cfg.base_seed, {Label{std::string("pilot")}});
  const double cold_scale =
      tune_scale(target, cfg.proposal, cfg.pilot_target_rate, cfg.pilot_iters, pilot_rng);
  result.cold_scale = cold_scale;

  result.rows.resize(n_rates);
  result.ladders.resize(n_rates);
  parallel_for(n_rates, exec.workers, [&](std::size_t i) {
    auto& row = result.rows[i];
    row.grid_index = i;
    row.grid_value = cfg.swap_rate_grid[i];
    auto rng = derive_stream(cfg.base_seed, {Label{std::string("ladder")}, Label{static_cast<std::int64_t>(i)}});
    try {
      result.ladders[i] = build_ladder(target, cfg.swap_rate_grid[i], cfg.ladder, rng);
      row.per_seed.resize(n_seeds);
    } catch (const LadderInfeasible& e) {
      row.error = e.what();
    }
  });

  parallel_for(n_rates * n_seeds, exec.workers, [&](std::size_t task) {
    const std::size_t i = task / n_seeds, s = task % n_seeds;
    if (!result.ladders[i]) return;
    const auto seed = cfg.seeds[s];
    const auto& ladder = *result.ladders[i];
    try {
      auto rng = derive_stream(cfg.base_seed, {Label{std::string("pt")},
                                               Label{static_cast<std::int64_t>(i)}, Label{seed}});
      PTOptions options;
      options.swap_interval = cfg.swap_interval;
      options.burn_in = cfg.burn_in;
      options.proposal = cfg.proposal;
      const auto stats = run_pt(target, ladder, inverse_sqrt_beta_scales(ladder, cold_scale),
                                cfg.n_iters, rng, options);
      result.rows[i].per_seed[s] = {seed, stats.mean_swap_acceptance, stats.temperature_esjd};
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "PT sweep failed at grid point " << i << " (swap rate " << cfg.swap_rate_grid[i]
          << "), seed " << seed << ": " << e.what();
      throw SimulationError(msg.str());
    }
  });

  for (auto& row : result.rows) {
    if (row.ok()) detail::finalize_row(row);
  }
  result.optimum = find_optimum(result.rows);
  return result;
}

inline SweepResult run_sweep(const SweepConfig& cfg, const ExecutionOptions& exec = {}) {
  return cfg.mode == SweepMode::rwm ? sweep_rwm(cfg, exec) : sweep_pt(cfg, exec);
}

// ---------------------------------------------------------------------------
// Persistence

inline json to_json(const SweepResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json seeds = json::array();
    for (const auto& s : row.per_seed) {
      seeds.push_back({{"seed", s.seed}, {"acceptance_rate", s.acceptance_rate}, {"esjd", s.esjd}});
    }
    json jr{{"grid_index", row.grid_index},
            {"grid_value", row.grid_value},
            {"per_seed", seeds},
            {"mean_acceptance_rate", row.mean_acceptance_rate},
            {"mean_esjd", row.mean_esjd}};
    if (!row.ok()) jr["error"] = row.error;
    rows.push_back(std::move(jr));
  }
  json j{{"schema_version", r.schema_version},
         {"config", r.config},
         {"rows", rows},
         {"optimum",
          {{"acceptance_rate_at_max_esjd", r.optimum.acceptance_rate_at_max_esjd},
           {"max_esjd", r.optimum.max_esjd},
           {"grid_index", r.optimum.grid_index}}}};
  if (!r.scaling_factors.empty()) j["scaling_factors"] = r.scaling_factors;
  if (!r.ladders.empty()) {
    json ladders = json::array();
    for (const auto& l : r.ladders) ladders.push_back(l ? to_json(*l) : json(nullptr));
    j["ladder"] = ladders;
  }
  if (r.cold_scale) j["cold_scale"] = *r.cold_scale;
  if (!r.run_info.is_null()) j["run_info"] = r.run_info;
  return j;
}

inline SweepResult sweep_result_from_json(const json& j) {
  try {
    if (!j.is_object() || !j.contains("schema_version")) {
      throw ConfigError("result file has no schema_version");
    }
    const int version = j.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
      throw ConfigError("unsupported schema_version " + std::to_string(version) + " (expected " +
                        std::to_string(kSchemaVersion) + ")");
    }
    detail::reject_unknown_keys(j, {"schema_version", "config", "rows", "optimum", "scaling_factors",
                                    "ladder", "cold_scale", "run_info"},
                                "result file");
    SweepResult r;
    r.schema_version = version;
    r.config = j.at("config");
    for (const auto& jr : j.at("rows")) {
      SweepRow row;
      row.grid_index = jr.at("grid_index").get<std::size_t>();
      row.grid_value = jr.at("grid_value").get<double>();
      for (const auto& s : jr.at("per_seed")) {
        row.per_seed.push_back({s.at("seed").get<std::int64_t>(), s.at("acceptance_rate").get<double>(),
                                s.at("esjd").get<double>()});
      }
      row.mean_acceptance_rate = jr.at("mean_acceptance_rate").get<double>();
      row.mean_esjd = jr.at("mean_esjd").get<double>();
      row.error = detail::get_or<std::string>(jr, "error", "");
      r.rows.push_back(std::move(row));
    }
    const auto& o = j.at("optimum");
    r.optimum = {o.at("acceptance_rate_at_max_esjd").get<double>(), o.at("max_esjd").get<double>(),
                 o.at("grid_index").get<std::size_t>()};
    r.scaling_factors = detail::get_or(j, "scaling_factors", std::vector<double>{});
    if (j.contains("ladder")) {
      for (const auto& l : j.at("ladder")) {
        r.ladders.push_back(l.is_null() ? std::nullopt : std::optional(ladder_from_json(l)));
      }
    }
    if (j.contains("cold_scale")) r.cold_scale = j.at("cold_scale").get<double>();
    if (j.contains("run_info")) r.run_info = j.at("run_info");
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed result file: ") + e.what());
  }
}

inline std::string dump_canonical(const json& j) { return j.dump(2) + "\n"; }

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SimulationError("cannot write " + path.string());
  out << text;
  if (!out) throw SimulationError("failed writing " + path.string());
}

/// Writes the result as canonical JSON (sorted keys, shortest round-trip doubles).
inline void persist(const SweepResult& result, const std::filesystem::path& path) {
  write_text_file(path, dump_canonical(to_json(result)));
}

inline SweepResult load(const std::filesystem::path& path) {
  return sweep_result_from_json(read_json_file(path));
}

}  // namespace mcmc_lab
