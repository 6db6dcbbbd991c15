#include "daeo/studies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "daeo/errors.hpp"
#include "daeo/reference.hpp"
#include "daeo/solver.hpp"

namespace daeo {

std::optional<double> fitted_slope(const std::vector<double> &dt, const std::vector<double> &err) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < std::min(dt.size(), err.size()); ++i) {
    if (dt[i] > 0.0 && err[i] > 0.0 && std::isfinite(err[i])) {
      lx.push_back(std::log(dt[i]));
      ly.push_back(std::log(err[i]));
    }
  }
  if (lx.size() < 2) {
    return std::nullopt;
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) {
    return std::nullopt;
  }
  return sxy / sxx;
}

std::vector<double> halving_ladder(double base, int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) {
    out.push_back(std::ldexp(base, -k));
  }
  return out;
}

ConvergenceStudy convergence_study(const ProblemSpec &spec, const SolverConfig &base,
                                   const std::vector<double> &dts) {
  if (dts.empty()) {
    throw UsageError("convergence: empty dt list");
  }
  ConvergenceStudy study;
  if (spec.reference) {
    study.reference_kind = "analytic";
    study.x_reference = Eigen::VectorXd::Constant(spec.n_x, spec.reference->x_exact(spec.t_end));
    study.reference_events = spec.reference->event_times;
  } else {
    study.reference_kind = "rk4";
    ReferenceOptions opts;
    opts.dt = *std::min_element(dts.begin(), dts.end()) / 100.0;
    const ReferenceResult ref = reference_solution(spec, base, opts);
    study.x_reference = ref.x_end;
    study.reference_events = ref.event_times;
  }

  std::vector<double> dt_col, with_col, without_col, tau_dt, tau_col;
  for (double dt : dts) {
    ConvergenceRow row;
    row.dt = dt;
    SolverConfig cfg = base;
    cfg.dt = dt;
    cfg.mode = SolverMode::TrackingWithEvents;
    const Trajectory with = solve(spec, cfg);
    cfg.mode = SolverMode::TrackingNoEvents;
    const Trajectory without = solve(spec, cfg);
    row.err_with =
        (with.points.back().state.x - study.x_reference).lpNorm<Eigen::Infinity>();
    row.err_without =
        (without.points.back().state.x - study.x_reference).lpNorm<Eigen::Infinity>();
    if (!with.events.empty() && !study.reference_events.empty()) {
      row.tau_error = std::abs(with.events.front().tau - study.reference_events.front());
    }
    dt_col.push_back(dt);
    with_col.push_back(row.err_with);
    without_col.push_back(row.err_without);
    if (row.tau_error && *row.tau_error > kTauFloorFactor * base.event_tol) {
      tau_dt.push_back(dt);
      tau_col.push_back(*row.tau_error);
    }
    study.rows.push_back(row);
  }
  study.slope_with = fitted_slope(dt_col, with_col);
  study.slope_without = fitted_slope(dt_col, without_col);
  study.slope_tau = fitted_slope(tau_dt, tau_col);
  return study;
}

std::vector<BenchRow> bench_study(const ProblemSpec &spec, const SolverConfig &base,
                                  const std::vector<double> &dts,
                                  const std::vector<SolverMode> &modes,
                                  const BenchOptions &opts) {
  if (opts.reps < 1 || opts.warmup < 0) {
    throw UsageError("bench: reps must be >= 1 and warmup >= 0");
  }
  std::vector<BenchRow> out;
  for (double dt : dts) {
    for (SolverMode mode : modes) {
      SolverConfig cfg = base;
      cfg.dt = dt;
      cfg.mode = mode;
      for (int i = 0; i < opts.warmup; ++i) {
        solve(spec, cfg);
      }
      std::vector<double> ms;
      Trajectory last;
      for (int i = 0; i < opts.reps; ++i) {
        last = solve(spec, cfg);
        ms.push_back(1e3 * last.wall_seconds);
      }
      std::sort(ms.begin(), ms.end());
      BenchRow row;
      row.dt = dt;
      row.mode = mode;
      row.reps = opts.reps;
      row.ms_min = ms.front();
      row.ms_median = ms.size() % 2 == 1
                          ? ms[ms.size() / 2]
                          : 0.5 * (ms[ms.size() / 2 - 1] + ms[ms.size() / 2]);
      row.steps = last.stats.steps;
      row.global_searches = last.stats.global_searches;
      row.events = last.stats.events;
      out.push_back(row);
    }
  }
  return out;
}

} // namespace daeo
