#include "daeo/problem.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "fmt/format.h"
#include "fmt/ranges.h"

#include "daeo/errors.hpp"

namespace daeo {

namespace {

ProblemSpec simple_problem() {
  auto f = [](auto x, auto y) {
    using T = typename decltype(x)::value_type;
    return std::vector<T>{-(2.0 + y[0]) * x[0]};
  };
  auto h = [](auto x, auto y) {
    return pow_int(1.0 - y[0] * y[0], 2) -
           (x[0] - 0.5) * sin(std::numbers::pi / 2.0 * y[0]);
  };
  ProblemSpec spec = make_problem("simple", 1, 1, f, h, Eigen::VectorXd::Constant(1, 1.0),
                                  0.0, 1.0, {Interval(-2.0, 2.0)});
  // x decays like exp(-3t) until x = 1/2, then like exp(-t).
  const double tau = -std::log(0.5) / 3.0;
  spec.reference = ReferenceSolution{
      [tau](double t) {
        return t < tau ? std::exp(-3.0 * t)
                       : std::exp(-t + 2.0 / 3.0 * std::log(0.5));
      },
      {tau}};
  return spec;
}

ProblemSpec robust_problem() {
  auto f = [](auto x, auto y) {
    using T = typename decltype(x)::value_type;
    (void)x;
    return std::vector<T>{y[0]};
  };
  auto h = [](auto x, auto y) { return pow_int(x[0] - y[0], 2) + sin(5.0 * y[0]); };
  return make_problem("robust", 1, 1, f, h, Eigen::VectorXd::Constant(1, 1.0), 0.0, 2.0,
                      {Interval(-5.0, 5.0)});
}

std::string trim(const std::string &s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(const std::string &key, const std::string &value) {
  double v = 0.0;
  const auto *end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw UsageError(fmt::format("config key '{}': '{}' is not a number", key, value));
  }
  return v;
}

long long parse_integer(const std::string &key, const std::string &value) {
  long long v = 0;
  const auto *end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw UsageError(fmt::format("config key '{}': '{}' is not an integer", key, value));
  }
  return v;
}

bool parse_bool(const std::string &key, const std::string &value) {
  if (value == "true" || value == "1") {
    return true;
  }
  if (value == "false" || value == "0") {
    return false;
  }
  throw UsageError(fmt::format("config key '{}': '{}' is not a boolean", key, value));
}

} // namespace

void validate(const ProblemSpec &spec) {
  if (spec.n_x == 0 || spec.n_y == 0) {
    throw UsageError(fmt::format("problem '{}': dimensions must be positive", spec.name));
  }
  if (static_cast<std::size_t>(spec.x0.size()) != spec.n_x ||
      spec.y_domain.size() != spec.n_y) {
    throw UsageError(fmt::format("problem '{}': x0 or y_domain has wrong size", spec.name));
  }
  if (!(spec.t_end > spec.t0)) {
    throw UsageError(fmt::format("problem '{}': t_end must exceed t0", spec.name));
  }
  std::vector<double> y_mid;
  for (const auto &yi : spec.y_domain) {
    if (!(width(yi) > 0.0)) {
      throw UsageError(fmt::format("problem '{}': degenerate search domain", spec.name));
    }
    y_mid.push_back(midpoint(yi));
  }
  const std::vector<double> x = to_vector(spec.x0);
  try {
    if (spec.f(x, y_mid).size() != spec.n_x) {
      throw UsageError(fmt::format("problem '{}': f returns wrong size", spec.name));
    }
    if (!std::isfinite(spec.h(x, y_mid))) {
      throw UsageError(fmt::format("problem '{}': h is not finite at x0", spec.name));
    }
  } catch (const std::bad_function_call &) {
    throw UsageError(fmt::format("problem '{}': f or h not registered", spec.name));
  }
}

namespace {

std::map<std::string, std::function<ProblemSpec()>> &registry() {
  static std::map<std::string, std::function<ProblemSpec()>> r{
      {"simple", simple_problem}, {"robust", robust_problem}};
  return r;
}

} // namespace

ProblemSpec builtin_problem(const std::string &name) {
  const auto &r = registry();
  const auto it = r.find(name);
  if (it == r.end()) {
    throw UsageError(fmt::format("unknown problem '{}' (expected one of: {})", name,
                                 fmt::join(builtin_problem_names(), ", ")));
  }
  return it->second();
}

void register_problem(const std::string &name, std::function<ProblemSpec()> factory) {
  if (name.empty() || !factory) {
    throw UsageError("register_problem: empty name or factory");
  }
  registry()[name] = std::move(factory);
}

std::vector<std::string> builtin_problem_names() {
  std::vector<std::string> names;
  for (const auto &[name, factory] : registry()) {
    names.push_back(name);
  }
  return names;
}

std::string to_string(SolverMode mode) {
  switch (mode) {
  case SolverMode::TrackingWithEvents:
    return "events";
  case SolverMode::TrackingNoEvents:
    return "no-events";
  case SolverMode::AlwaysGlobalOptimize:
    return "always-opt";
  }
  return "events";
}

SolverMode parse_mode(const std::string &name) {
  if (name == "events") {
    return SolverMode::TrackingWithEvents;
  }
  if (name == "no-events") {
    return SolverMode::TrackingNoEvents;
  }
  if (name == "always-opt") {
    return SolverMode::AlwaysGlobalOptimize;
  }
  throw UsageError(
      fmt::format("unknown mode '{}' (expected events, no-events or always-opt)", name));
}

void validate(const SolverConfig &cfg, double t0, double t_end) {
  if (!(cfg.dt > 0.0)) {
    throw UsageError(fmt::format("dt must be positive, got {}", cfg.dt));
  }
  if (!(cfg.dt < t_end - t0)) {
    throw UsageError(fmt::format("dt = {} must be shorter than the integration window [{}, {}]", cfg.dt,
                                 t0, t_end));
  }
  if (!(cfg.newton_tol > 0.0) || !(cfg.opt_width_tol > 0.0) || !(cfg.event_tol > 0.0) ||
      !(cfg.min_event_size > 0.0)) {
    throw UsageError("all tolerances must be positive");
  }
  if (cfg.newton_max_iter <= 0) {
    throw UsageError("newton_max_iter must be positive");
  }
  if (cfg.reopt_period < 0) {
    throw UsageError("reopt_period must be non-negative");
  }
  if (cfg.max_work_list == 0) {
    throw UsageError("max_work_list must be positive");
  }
}

SolverConfig parse_config(const std::string &text, SolverConfig cfg) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(fmt::format("config line {}: expected key = value", line_no));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "dt") {
      cfg.dt = parse_real(key, value);
    } else if (key == "newton_tol") {
      cfg.newton_tol = parse_real(key, value);
    } else if (key == "newton_max_iter") {
      cfg.newton_max_iter = static_cast<int>(parse_integer(key, value));
    } else if (key == "opt_width_tol") {
      cfg.opt_width_tol = parse_real(key, value);
    } else if (key == "event_tol") {
      cfg.event_tol = parse_real(key, value);
    } else if (key == "min_event_size") {
      cfg.min_event_size = parse_real(key, value);
    } else if (key == "reopt_period") {
      cfg.reopt_period = static_cast<int>(parse_integer(key, value));
    } else if (key == "mode") {
      cfg.mode = parse_mode(value);
    } else if (key == "global_only") {
      cfg.global_only = parse_bool(key, value);
    } else if (key == "max_work_list") {
      const long long v = parse_integer(key, value);
      if (v <= 0) {
        throw UsageError("max_work_list must be positive");
      }
      cfg.max_work_list = static_cast<std::size_t>(v);
    } else {
      throw UsageError(fmt::format("config line {}: unknown key '{}'", line_no, key));
    }
  }
  return cfg;
}

SolverConfig load_config_file(const std::string &path, SolverConfig base) {
  std::ifstream in(path);
  if (!in) {
    throw UsageError(fmt::format("cannot open config file '{}'", path));
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), base);
}

std::vector<std::pair<std::string, std::string>> config_entries(const SolverConfig &cfg) {
  return {
      {"dt", fmt::format("{:.17g}", cfg.dt)},
      {"newton_tol", fmt::format("{:.17g}", cfg.newton_tol)},
      {"newton_max_iter", fmt::format("{}", cfg.newton_max_iter)},
      {"opt_width_tol", fmt::format("{:.17g}", cfg.opt_width_tol)},
      {"event_tol", fmt::format("{:.17g}", cfg.event_tol)},
      {"min_event_size", fmt::format("{:.17g}", cfg.min_event_size)},
      {"reopt_period", fmt::format("{}", cfg.reopt_period)},
      {"mode", to_string(cfg.mode)},
      {"global_only", cfg.global_only ? "true" : "false"},
      {"max_work_list", fmt::format("{}", cfg.max_work_list)},
  };
}

} // namespace daeo
