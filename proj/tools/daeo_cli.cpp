/**
 * @file daeo_cli.cpp
 * @brief Command-line driver: solve, convergence and bench subcommands.
 *
 * Exit codes: 0 success, 2 usage error, 3 solver failure, 4 event
 * inconsistency.
 */
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fmt/format.h"
#include "json.hpp"

#include "daeo/errors.hpp"
#include "daeo/io.hpp"
#include "daeo/problem.hpp"
#include "daeo/solver.hpp"
#include "daeo/studies.hpp"
#include "exit_codes.hpp"

namespace {

using nlohmann::json;

struct CommonOptions {
  std::string problem = "simple";
  std::vector<double> dt;
  std::optional<double> t_end;
  std::vector<std::string> modes;
  std::optional<int> reopt_period;
  std::string config;
  std::string out;
  std::string format = "csv";
  int reps = 5;
  int warmup = 1;
};

void add_common(CLI::App *cmd, CommonOptions &o, bool dt_list, bool mode_list) {
  cmd->add_option("--problem", o.problem, "Problem name")->capture_default_str();
  if (dt_list) {
    cmd->add_option("--dt", o.dt, "Step sizes (comma separated or repeated)")
        ->delimiter(',');
  } else {
    cmd->add_option("--dt", o.dt, "Step size")->expected(1);
  }
  cmd->add_option("--t-end", o.t_end, "End of the integration window");
  auto *mode = cmd->add_option("--mode", o.modes, "events | no-events | always-opt")
                   ->check(CLI::IsMember({"events", "no-events", "always-opt"}));
  if (mode_list) {
    mode->delimiter(',');
  } else {
    mode->expected(1);
  }
  cmd->add_option("--reopt-period", o.reopt_period,
                  "Global search every N steps (0 = only at t0)");
  cmd->add_option("--config", o.config, "key = value file with SolverConfig fields")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "Output path (default: stdout)");
  cmd->add_option("--format", o.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

daeo::ProblemSpec load_problem(const CommonOptions &o) {
  daeo::ProblemSpec spec = daeo::builtin_problem(o.problem);
  if (o.t_end) {
    spec.t_end = *o.t_end;
  }
  return spec;
}

daeo::SolverConfig load_config(const CommonOptions &o) {
  daeo::SolverConfig cfg;
  if (!o.config.empty()) {
    cfg = daeo::load_config_file(o.config, cfg);
  }
  if (!o.dt.empty()) {
    cfg.dt = o.dt.front();
  }
  if (!o.modes.empty()) {
    cfg.mode = daeo::parse_mode(o.modes.front());
  }
  if (o.reopt_period) {
    cfg.reopt_period = *o.reopt_period;
  }
  return cfg;
}

void emit(const std::string &path, const std::string &text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(path);
  if (!os) {
    throw daeo::UsageError(fmt::format("cannot open '{}' for writing", path));
  }
  os << text;
}

std::string sidecar_path(const std::string &out) {
  std::filesystem::path p(out);
  if (p.extension() == ".json") {
    return out + ".sidecar.json";
  }
  return p.replace_extension(".json").string();
}

std::string optional_number(const std::optional<double> &v) {
  return v ? fmt::format("{:.4f}", *v) : std::string("n/a");
}

json optional_json(const std::optional<double> &v) { return v ? json(*v) : json(nullptr); }

int cmd_solve(const CommonOptions &o) {
  const daeo::ProblemSpec spec = load_problem(o);
  const daeo::SolverConfig cfg = load_config(o);
  const daeo::Trajectory traj = daeo::solve(spec, cfg);
  if (o.format == "json") {
    emit(o.out, daeo::sidecar_json(spec, cfg, traj, true) + "\n");
    return 0;
  }
  std::ostringstream csv;
  daeo::write_csv(csv, daeo::to_table(spec, traj));
  emit(o.out, csv.str());
  if (!o.out.empty()) {
    emit(sidecar_path(o.out), daeo::sidecar_json(spec, cfg, traj) + "\n");
  }
  return 0;
}

int cmd_convergence(const CommonOptions &o) {
  const daeo::ProblemSpec spec = load_problem(o);
  daeo::SolverConfig cfg = load_config(o);
  const std::vector<double> dts = o.dt.empty() ? daeo::halving_ladder(0.25, 7) : o.dt;
  cfg.dt = *std::min_element(dts.begin(), dts.end());
  daeo::validate(cfg, spec.t0, spec.t_end);
  const daeo::ConvergenceStudy study = daeo::convergence_study(spec, cfg, dts);

  if (o.format == "json") {
    json doc;
    doc["problem"] = spec.name;
    doc["reference"] = study.reference_kind;
    json rows = json::array();
    for (const auto &r : study.rows) {
      rows.push_back({{"dt", r.dt},
                      {"error_with_events", r.err_with},
                      {"error_without", r.err_without},
                      {"tau_error", optional_json(r.tau_error)}});
    }
    doc["rows"] = rows;
    doc["slope_with_events"] = optional_json(study.slope_with);
    doc["slope_without"] = optional_json(study.slope_without);
    doc["slope_tau"] = optional_json(study.slope_tau);
    emit(o.out, doc.dump(2) + "\n");
    return 0;
  }
  std::string text = "dt,error_with_events,error_without,tau_error\n";
  for (const auto &r : study.rows) {
    text += fmt::format("{:.17g},{:.17g},{:.17g},{}\n", r.dt, r.err_with, r.err_without,
                        r.tau_error ? fmt::format("{:.17g}", *r.tau_error) : "n/a");
  }
  text += fmt::format("# reference: {}\n", study.reference_kind);
  text += fmt::format("# slope_with_events: {}\n", optional_number(study.slope_with));
  text += fmt::format("# slope_without: {}\n", optional_number(study.slope_without));
  text += fmt::format("# slope_tau: {}\n", optional_number(study.slope_tau));
  emit(o.out, text);
  return 0;
}

int cmd_bench(const CommonOptions &o) {
  const daeo::ProblemSpec spec = load_problem(o);
  daeo::SolverConfig cfg = load_config(o);
  const std::vector<double> dts = o.dt.empty() ? std::vector<double>{2.5e-3} : o.dt;
  std::vector<daeo::SolverMode> modes;
  for (const auto &m : o.modes) {
    modes.push_back(daeo::parse_mode(m));
  }
  if (modes.empty()) {
    modes = {daeo::SolverMode::TrackingNoEvents, daeo::SolverMode::TrackingWithEvents,
             daeo::SolverMode::AlwaysGlobalOptimize};
  }
  for (double dt : dts) {
    cfg.dt = dt;
    daeo::validate(cfg, spec.t0, spec.t_end);
  }
  const auto rows = daeo::bench_study(spec, cfg, dts, modes, {o.warmup, o.reps});

  if (o.format == "json") {
    json doc;
    doc["problem"] = spec.name;
    json arr = json::array();
    for (const auto &r : rows) {
      arr.push_back({{"dt", r.dt},
                     {"mode", daeo::to_string(r.mode)},
                     {"reps", r.reps},
                     {"ms_min", r.ms_min},
                     {"ms_median", r.ms_median},
                     {"steps", r.steps},
                     {"global_searches", r.global_searches},
                     {"events", r.events}});
    }
    doc["rows"] = arr;
    emit(o.out, doc.dump(2) + "\n");
    return 0;
  }
  std::string text = "dt,mode,reps,ms_min,ms_median,steps,global_searches,events\n";
  for (const auto &r : rows) {
    text += fmt::format("{:.17g},{},{},{:.4f},{:.4f},{},{},{}\n", r.dt, daeo::to_string(r.mode),
                        r.reps, r.ms_min, r.ms_median, r.steps, r.global_searches, r.events);
  }
  emit(o.out, text);
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Solver for ODEs with an embedded global optimization problem"};
  app.require_subcommand(1);
  CommonOptions opts;

  auto *solve = app.add_subcommand("solve", "Integrate one problem and write the trajectory");
  add_common(solve, opts, false, false);
  auto *conv = app.add_subcommand("convergence", "Endpoint and event-time errors over a dt list");
  add_common(conv, opts, true, false);
  auto *bench = app.add_subcommand("bench", "Wall time per (dt, mode)");
  add_common(bench, opts, true, true);
  bench->add_option("--reps", opts.reps, "Timed repetitions")->capture_default_str();
  bench->add_option("--warmup", opts.warmup, "Untimed warmup runs")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? daeo::cli::kExitOk : daeo::cli::kExitUsage;
  }

  try {
    if (solve->parsed()) {
      return cmd_solve(opts);
    }
    if (conv->parsed()) {
      return cmd_convergence(opts);
    }
    return cmd_bench(opts);
  } catch (const daeo::UsageError &e) {
    fmt::print(stderr, "usage error: {}\n", e.what());
    return daeo::cli::exit_code(e);
  } catch (const daeo::Error &e) {
    if (e.time()) {
      fmt::print(stderr, "solver failure at t = {:.17g}: {}\n", *e.time(), e.what());
    } else {
      fmt::print(stderr, "solver failure: {}\n", e.what());
    }
    return daeo::cli::exit_code(e);
  } catch (const std::exception &e) {
    fmt::print(stderr, "internal error: {}\n", e.what());
    return daeo::cli::exit_code(e);
  }
}
