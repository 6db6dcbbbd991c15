/**
 * @file reference.hpp
 * @brief Independent reference trajectories for convergence studies.
 *
 * The reference integrates the switched ODE xdot = f(x, y*(x)) with classic
 * RK4, holding the minimizer branch fixed inside every stage and splitting
 * steps at the times where another branch becomes global. It shares the
 * problem definition and the global search with the solver but none of the
 * trapezoidal or event-correction code.
 */
#ifndef DAEO_REFERENCE_HPP
#define DAEO_REFERENCE_HPP

#include <vector>

#include "Eigen/Dense"

#include "daeo/problem.hpp"

namespace daeo {

struct ReferenceOptions {
  double dt = 1e-4;
  /// Accuracy of the located switching times.
  double event_tol = 1e-12;
  /// Global search is repeated after this many steps to pick up emerging
  /// minimizers (0 = only at t0).
  int search_every = 100;
};

struct ReferenceResult {
  Eigen::VectorXd x_end;
  std::vector<double> event_times;
};

/**
 * @brief Integrate spec from t0 to t_end.
 * @details Branches are followed by Newton's method on dh/dy at every RK4
 * stage. The search configuration (opt_width_tol, max_work_list) comes
 * from @c cfg.
 * @throws StepFailure if a branch cannot be followed.
 */
ReferenceResult reference_solution(const ProblemSpec &spec, const SolverConfig &cfg,
                                   const ReferenceOptions &opts);

} // namespace daeo

#endif
