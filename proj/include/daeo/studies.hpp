/**
 * @file studies.hpp
 * @brief Convergence sweeps and mode benchmarks over a list of step sizes.
 */
#ifndef DAEO_STUDIES_HPP
#define DAEO_STUDIES_HPP

#include <optional>
#include <string>
#include <vector>

#include "Eigen/Dense"

#include "daeo/problem.hpp"

namespace daeo {

/// Least-squares slope of log(err) against log(dt). Empty with fewer than
/// two usable (positive, finite) points.
std::optional<double> fitted_slope(const std::vector<double> &dt, const std::vector<double> &err);

/// dt = base * 2^-k for k = 0..count-1.
std::vector<double> halving_ladder(double base, int count);

struct ConvergenceRow {
  double dt = 0.0;
  /// Max-norm endpoint error with event correction.
  double err_with = 0.0;
  /// Max-norm endpoint error with event correction disabled.
  double err_without = 0.0;
  /// Distance of the first located event to the first reference event.
  std::optional<double> tau_error;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  std::optional<double> slope_with;
  std::optional<double> slope_without;
  /// Fitted over rows whose tau error is above the event-tolerance floor.
  std::optional<double> slope_tau;
  /// "analytic" or "rk4".
  std::string reference_kind;
  Eigen::VectorXd x_reference;
  std::vector<double> reference_events;
};

/**
 * @brief Solve at every dt with and without event correction and compare
 * against the problem's analytic reference or, lacking one, an RK4
 * reference at min(dt)/100.
 */
ConvergenceStudy convergence_study(const ProblemSpec &spec, const SolverConfig &base,
                                   const std::vector<double> &dts);

/// Tau errors at or below this multiple of event_tol count as the floor.
inline constexpr double kTauFloorFactor = 10.0;

struct BenchRow {
  double dt = 0.0;
  SolverMode mode = SolverMode::TrackingWithEvents;
  int reps = 0;
  double ms_min = 0.0;
  double ms_median = 0.0;
  std::size_t steps = 0;
  std::size_t global_searches = 0;
  std::size_t events = 0;
};

struct BenchOptions {
  int warmup = 1;
  int reps = 5;
};

/// Wall time of solve per (dt, mode); repetitions run sequentially after
/// untimed warmup runs.
std::vector<BenchRow> bench_study(const ProblemSpec &spec, const SolverConfig &base,
                                  const std::vector<double> &dts,
                                  const std::vector<SolverMode> &modes,
                                  const BenchOptions &opts = {});

} // namespace daeo

#endif
