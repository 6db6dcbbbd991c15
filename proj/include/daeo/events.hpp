/**
 * @file events.hpp
 * @brief Detection and correction of jump events, where the global
 * minimizer changes identity inside a time step.
 */
#ifndef DAEO_EVENTS_HPP
#define DAEO_EVENTS_HPP

#include <cstddef>
#include <vector>

#include "Eigen/Dense"

#include "daeo/integrator.hpp"

namespace daeo {

struct EventRecord {
  double tau = 0.0;
  /// Indices into the optimizer list of the state at tau.
  std::size_t from_index = 0;
  std::size_t to_index = 0;
  /// Stable optimizer identities.
  std::size_t from_id = 0;
  std::size_t to_id = 0;
  Eigen::VectorXd x_at_tau;
  /// Event function at the accepted tau.
  double residual_H = 0.0;
};

/// h(x, y1) - h(x, y2).
double event_function(const Objective &h, const Eigen::VectorXd &x, const Eigen::VectorXd &y1,
                      const Eigen::VectorXd &y2);

struct EventCorrection {
  /// States to append after prev, in time order. The last one is at
  /// next.t; every earlier one sits at an event time.
  std::vector<SolverState> states;
  std::vector<EventRecord> events;
  /// Identity changed but could not be corrected because one of the two
  /// optimizers is missing from prev or next (emergence or vanishing).
  bool uncorrectable_switch = false;
};

/**
 * @brief Split the step prev -> next at every change of global minimizer.
 * @details Candidate partners are tracked optimizers that undercut the
 * current global minimizer by the end of the step, with a swing of the
 * event function of at least cfg.min_event_size. For each, the event time
 * is the root of H along partial tracking steps from prev (bisection with
 * secant refinement); the earliest root wins, the step is restarted from
 * there with the new global index, and detection repeats on the remainder.
 * @throws EventInconsistency if H does not change sign across the step.
 * @throws EventLocationFailure if the root finder stagnates.
 */
EventCorrection detect_and_correct(const SolverState &prev, const SolverState &next,
                                   const SolverConfig &cfg, const ProblemSpec &spec,
                                   StepStats *stats = nullptr);

} // namespace daeo

#endif
