/**
 * @file integrator.hpp
 * @brief Trapezoidal time step with simultaneous local optimizer tracking.
 */
#ifndef DAEO_INTEGRATOR_HPP
#define DAEO_INTEGRATOR_HPP

#include "Eigen/Dense"

#include "daeo/optimizer.hpp"
#include "daeo/problem.hpp"

namespace daeo {

struct SolverState {
  double t = 0.0;
  Eigen::VectorXd x;
  /// Points are advanced by tracking; boxes stay as the last global search
  /// left them.
  OptimizerSet optimizers;

  const Eigen::VectorXd &y_star() const { return optimizers.star().point; }
  std::size_t star_id() const { return optimizers.star().id; }
};

struct StepStats {
  int newton_iterations = 0;
};

/// f(x, y) at real arguments.
Eigen::VectorXd evaluate_dynamics(const ProblemSpec &spec, const Eigen::VectorXd &x,
                                  const Eigen::VectorXd &y);
/// h(x, y) at real arguments.
double evaluate_objective(const ProblemSpec &spec, const Eigen::VectorXd &x,
                          const Eigen::VectorXd &y);
/// dh/dy at real arguments.
Eigen::VectorXd objective_gradient(const ProblemSpec &spec, const Eigen::VectorXd &x,
                                   const Eigen::VectorXd &y);

/**
 * @brief Rate of change of a minimizer along the trajectory,
 * (dy/dx) * xdot with dy/dx = -(d2h/dy2)^-1 d2h/dxdy.
 * @throws SingularityError if d2h/dy2 is singular at (x, yk).
 */
Eigen::VectorXd drift(const Objective &h, const Eigen::VectorXd &x, const Eigen::VectorXd &yk,
                      const Eigen::VectorXd &xdot);

/**
 * @brief Advance x and every tracked minimizer from state.t to state.t + dt.
 * @details Solves the trapezoidal residual for x, using the tracked point
 * with the pre-step global index on both ends, together with the
 * first-order optimality residual of every tracked point at the new time.
 * Damped Newton with a forward-mode Jacobian, starting from an Euler
 * predictor for x and the drift predictor for each minimizer. The global
 * index of the result is the argmin of h over the tracked points.
 * @throws StepFailure if Newton does not reach cfg.newton_tol.
 * @throws SingularityError if the Jacobian or a drift Hessian is singular.
 */
SolverState step(const SolverState &state, double dt, const SolverConfig &cfg,
                 const ProblemSpec &spec, StepStats *stats = nullptr);

/// Infinity norm of the optimality residual over all tracked points.
double optimality_residual(const SolverState &state, const ProblemSpec &spec);

} // namespace daeo

#endif
