#pragma once

// Command-line front end: rwm-sweep, pt-sweep, build-ladder, run-once, plot.
//
// Exit codes: 0 success, 1 configuration error, 2 simulation error.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcmc_lab/config.hpp"
#include "mcmc_lab/error.hpp"
#include "mcmc_lab/experiments.hpp"
#include "mcmc_lab/parallel.hpp"
#include "mcmc_lab/report.hpp"
#include "mcmc_lab/rwm.hpp"
#include "mcmc_lab/tempering.hpp"

namespace mcmc_lab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

struct Command {
  std::string subcommand;
  std::string config_path;
  std::string input_path;
  std::filesystem::path out_dir = ".";
  std::optional<std::int64_t> dimension;
  std::optional<std::int64_t> iters;
  std::optional<std::int64_t> seeds;
  std::optional<std::size_t> threads;
  bool deterministic = false;
  // build-ladder / run-once
  std::string target_family;
  std::optional<double> swap_rate;
  std::optional<double> beta_min;
  std::optional<std::int64_t> n_samples;
  std::optional<double> scale;
  std::optional<double> ell;
  std::int64_t trace_every = 1;
  std::uint64_t seed = 0;
  // plot
  std::size_t bins = 60;
};

namespace detail {

inline json apply_overrides(json cfg, const Command& cmd) {
  if (cmd.dimension) {
    if (!cfg.contains("target")) cfg["target"] = json::object();
    cfg["target"]["dimension"] = *cmd.dimension;
  }
  if (cmd.iters) cfg["n_iters"] = *cmd.iters;
  if (cmd.seeds) {
    if (*cmd.seeds <= 0) throw ConfigError("--seeds must be positive");
    std::vector<std::int64_t> s(static_cast<std::size_t>(*cmd.seeds));
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<std::int64_t>(i);
    cfg["seeds"] = s;
  }
  return cfg;
}

inline json load_config(const Command& cmd) {
  if (cmd.config_path.empty()) throw ConfigError("--config is required");
  return apply_overrides(read_json_file(cmd.config_path), cmd);
}

inline json run_info(std::chrono::steady_clock::time_point start, std::size_t workers) {
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return {{"generated_at", stamp}, {"elapsed_seconds", elapsed}, {"workers", workers}};
}

inline std::size_t workers(const Command& cmd) { return cmd.threads.value_or(default_worker_count()); }

inline void ensure_out_dir(const Command& cmd) { std::filesystem::create_directories(cmd.out_dir); }

inline int do_sweep(const Command& cmd, SweepMode mode, std::ostream& log) {
  const auto cfg = sweep_config_from_json(load_config(cmd), mode);
  if (cfg.mode != mode) throw ConfigError("config mode does not match the subcommand");
  ensure_out_dir(cmd);
  const auto start = std::chrono::steady_clock::now();
  auto result = run_sweep(cfg, {workers(cmd)});
  if (!cmd.deterministic) result.run_info = run_info(start, workers(cmd));
  const auto path = cmd.out_dir / "result.json";
  persist(result, path);
  log << "wrote " << path.string() << "\n"
      << "optimum: acceptance rate " << result.optimum.acceptance_rate_at_max_esjd << ", ESJD "
      << result.optimum.max_esjd << " (grid index " << result.optimum.grid_index << ")\n";
  return kExitOk;
}

inline TargetSpec target_for_ladder(const Command& cmd, json* cfg_out) {
  if (!cmd.config_path.empty()) {
    auto cfg = load_config(cmd);
    if (cfg_out) *cfg_out = cfg;
    if (!cfg.contains("target")) throw ConfigError("config has no 'target'");
    return target_spec_from_json(cfg.at("target"));
  }
  if (cmd.target_family.empty() || !cmd.dimension) {
    throw ConfigError("build-ladder needs --config or both --target and --dim");
  }
  return target_spec_from_json({{"family", cmd.target_family}, {"dimension", *cmd.dimension}});
}

inline LadderParams ladder_params(const Command& cmd, const json& cfg) {
  LadderParams p = cfg.contains("ladder") ? ladder_params_from_json(cfg.at("ladder")) : LadderParams{};
  if (cmd.beta_min) p.beta_min = *cmd.beta_min;
  if (cmd.n_samples) p.n_samples = *cmd.n_samples;
  return p;
}

inline int do_build_ladder(const Command& cmd, std::ostream& log) {
  json cfg = json::object();
  const auto spec = target_for_ladder(cmd, &cfg);
  const auto target = make_target(spec);
  const double s = cmd.swap_rate.value_or(0.234);
  const auto params = ladder_params(cmd, cfg);
  ensure_out_dir(cmd);
  auto rng = derive_stream(cmd.seed, {Label{std::string("ladder")}});
  const auto ladder = build_ladder(target, s, params, rng);
  json out = to_json(ladder);
  out["schema_version"] = kSchemaVersion;
  out["target"] = to_json(spec);
  out["params"] = to_json(params);
  const auto path = cmd.out_dir / "ladder.json";
  write_text_file(path, dump_canonical(out));
  log << "wrote " << path.string() << " (" << ladder.size() << " inverse temperatures)\n";
  return kExitOk;
}

inline json stats_json(const ChainStats& st) {
  return {{"esjd", st.esjd},
          {"acceptance_rate", st.acceptance_rate},
          {"n_iters", st.n_iters},
          {"accepted_count", st.accepted_count},
          {"final_state", st.final_state}};
}

inline int do_run_once(const Command& cmd, std::ostream& log) {
  const json cfg = load_config(cmd);
  if (!cfg.contains("target")) throw ConfigError("config has no 'target'");
  const auto spec = target_spec_from_json(cfg.at("target"));
  const auto target = make_target(spec);
  const bool pt = cfg.value("mode", "rwm") == "pt";
  const auto n_iters = cfg.value<std::int64_t>("n_iters", pt ? 20000 : 100000);
  const auto burn_in = cfg.value<std::int64_t>("burn_in", 1000);
  json proposal_cfg = cfg.value("proposal", json::object());
  if (cmd.scale) {
    proposal_cfg.erase("ell");
    proposal_cfg["scale"] = *cmd.scale;
  }
  if (cmd.ell) {
    proposal_cfg.erase("scale");
    proposal_cfg["ell"] = *cmd.ell;
  }
  ensure_out_dir(cmd);
  json out{{"schema_version", kSchemaVersion}, {"target", to_json(spec)}, {"n_iters", n_iters},
           {"burn_in", burn_in}, {"seed", cmd.seed}};
  auto rng = derive_stream(cmd.seed, {Label{std::string("run-once")}});
  if (!pt) {
    if (!proposal_cfg.contains("scale") && !proposal_cfg.contains("ell")) proposal_cfg["ell"] = 2.38;
    const auto proposal = proposal_from_json(proposal_cfg, target.dimension());
    const auto st = run_rwm(target, proposal, n_iters, rng, target.central_point(),
                            RwmOptions{burn_in, cmd.trace_every});
    out["kind"] = "rwm_run";
    out["proposal"] = {{"kind", to_string(proposal.kind())}, {"scale", proposal.scale()}};
    out["stats"] = stats_json(st);
    out["trace"] = st.trace_first_component;
    log << "acceptance rate " << st.acceptance_rate << ", ESJD " << st.esjd << "\n";
  } else {
    const auto kind =
        proposal_kind_from_string(proposal_cfg.value("kind", std::string("gaussian")));
    const auto params = ladder_params(cmd, cfg);
    const double s = cmd.swap_rate.value_or(0.234);
    auto ladder_rng = derive_stream(cmd.seed, {Label{std::string("run-once")}, Label{std::string("ladder")}});
    const auto ladder = build_ladder(target, s, params, ladder_rng);
    auto pilot_rng = derive_stream(cmd.seed, {Label{std::string("run-once")}, Label{std::string("pilot")}});
    const double cold = cmd.scale.value_or(tune_scale(target, kind, 0.234, 10000, pilot_rng));
    PTOptions options;
    options.swap_interval = cfg.value<std::int64_t>("swap_interval", 20);
    options.burn_in = burn_in;
    options.trace_every = cmd.trace_every;
    options.proposal = kind;
    const auto st = run_pt(target, ladder, inverse_sqrt_beta_scales(ladder, cold), n_iters, rng, options);
    out["kind"] = "pt_run";
    out["ladder"] = to_json(ladder);
    out["cold_scale"] = cold;
    out["stats"] = {{"temperature_esjd", st.temperature_esjd},
                    {"mean_swap_acceptance", st.mean_swap_acceptance},
                    {"swap_attempts", st.swap_attempts},
                    {"per_pair_acceptance", st.per_pair_acceptance},
                    {"within_acceptance", st.within_acceptance}};
    out["trace"] = st.cold_chain_trace;
    log << "swap acceptance " << st.mean_swap_acceptance << ", temperature ESJD " << st.temperature_esjd
        << " with " << ladder.size() << " chains\n";
  }
  const auto path = cmd.out_dir / "run.json";
  write_text_file(path, dump_canonical(out));
  log << "wrote " << path.string() << "\n";
  return kExitOk;
}

inline int do_plot(const Command& cmd, std::ostream& log) {
  if (cmd.input_path.empty()) throw ConfigError("plot needs --input");
  const json input = read_json_file(cmd.input_path);
  ensure_out_dir(cmd);
  const auto stem = std::filesystem::path(cmd.input_path).stem().string();
  if (input.contains("rows")) {
    const auto result = sweep_result_from_json(input);
    emit_csv(result, cmd.out_dir / (stem + ".csv"));
    emit_svg_curve(result, cmd.out_dir / (stem + "_esjd.svg"));
    log << "wrote " << (cmd.out_dir / (stem + ".csv")).string() << " and "
        << (cmd.out_dir / (stem + "_esjd.svg")).string() << "\n";
    return kExitOk;
  }
  if (input.contains("trace")) {
    const auto trace = input.at("trace").get<std::vector<double>>();
    emit_histogram(trace, cmd.bins, cmd.out_dir / (stem + "_histogram.svg"));
    emit_traceplot(trace, cmd.out_dir / (stem + "_trace.svg"));
    log << "wrote " << (cmd.out_dir / (stem + "_histogram.svg")).string() << " and "
        << (cmd.out_dir / (stem + "_trace.svg")).string() << "\n";
    return kExitOk;
  }
  throw ConfigError("input has neither sweep rows nor a trace");
}

}  // namespace detail

/// Runs a parsed command, translating exceptions into exit codes.
inline int execute(const Command& cmd, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  try {
    if (cmd.subcommand == "rwm-sweep") return detail::do_sweep(cmd, SweepMode::rwm, log);
    if (cmd.subcommand == "pt-sweep") return detail::do_sweep(cmd, SweepMode::pt, log);
    if (cmd.subcommand == "build-ladder") return detail::do_build_ladder(cmd, log);
    if (cmd.subcommand == "run-once") return detail::do_run_once(cmd, log);
    if (cmd.subcommand == "plot") return detail::do_plot(cmd, log);
    err << "error: unknown subcommand '" << cmd.subcommand << "'\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const json::exception& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "simulation error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

/// Parses argv and executes. Returns the process exit code.
inline int main(int argc, char** argv) {
  CLI::App app{"Random-walk Metropolis and parallel tempering scaling laboratory"};
  app.require_subcommand(1);
  Command cmd;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out-dir,-o", cmd.out_dir, "Output directory (created if absent)");
    sub->add_option("--dim", cmd.dimension, "Override the target dimension");
    sub->add_option("--threads", cmd.threads, "Worker threads (default: MCMC_LAB_THREADS or all cores)");
  };
  auto add_sweep = [&](CLI::App* sub) {
    sub->add_option("--config,-c", cmd.config_path, "Sweep config (JSON)")->required();
    add_common(sub);
    sub->add_option("--iters", cmd.iters, "Override iterations per run");
    sub->add_option("--seeds", cmd.seeds, "Use seeds 0..N-1");
    sub->add_flag("--deterministic", cmd.deterministic, "Omit timestamps for byte-identical output");
  };

  auto* rwm = app.add_subcommand("rwm-sweep", "ESJD vs acceptance rate over a proposal scale grid");
  add_sweep(rwm);
  auto* pt = app.add_subcommand("pt-sweep", "Temperature ESJD vs swap rate over calibrated ladders");
  add_sweep(pt);

  auto* ladder = app.add_subcommand("build-ladder", "Build a swap-rate-calibrated temperature ladder");
  ladder->add_option("--config,-c", cmd.config_path, "Config with a 'target' (and optional 'ladder')");
  ladder->add_option("--target", cmd.target_family, "Target family (e.g. gaussian)");
  ladder->add_option("--swap-rate", cmd.swap_rate, "Target adjacent swap acceptance (default 0.234)");
  ladder->add_option("--beta-min", cmd.beta_min, "Smallest inverse temperature (default 0.01)");
  ladder->add_option("--n-samples", cmd.n_samples, "Direct samples per estimate (default 3000)");
  ladder->add_option("--seed", cmd.seed, "Base seed");
  add_common(ladder);

  auto* once = app.add_subcommand("run-once", "Run a single RWM or PT chain and keep its trace");
  once->add_option("--config,-c", cmd.config_path, "Config with 'target' and 'proposal'")->required();
  once->add_option("--scale", cmd.scale, "Proposal scale (cold-chain scale for PT)");
  once->add_option("--ell", cmd.ell, "Proposal ell; scale = ell / sqrt(d)");
  once->add_option("--swap-rate", cmd.swap_rate, "PT ladder swap rate (default 0.234)");
  once->add_option("--trace-every", cmd.trace_every, "Trace thinning (default 1)");
  once->add_option("--iters", cmd.iters, "Override iterations");
  once->add_option("--seed", cmd.seed, "Base seed");
  add_common(once);

  auto* plot = app.add_subcommand("plot", "CSV and SVG figures from a result or run JSON");
  plot->add_option("--input,-i", cmd.input_path, "result.json or run.json")->required();
  plot->add_option("--bins", cmd.bins, "Histogram bins (default 60)");
  plot->add_option("--out-dir,-o", cmd.out_dir, "Output directory (created if absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  for (auto* sub : {rwm, pt, ladder, once, plot}) {
    if (sub->parsed()) cmd.subcommand = sub->get_name();
  }
  return execute(cmd);
}

}  // namespace mcmc_lab::cli
