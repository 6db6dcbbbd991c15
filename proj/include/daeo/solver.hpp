/**
 * @file solver.hpp
 * @brief Full trajectory solve: global search at t0, tracking steps,
 * periodic re-optimization and event correction.
 */
#ifndef DAEO_SOLVER_HPP
#define DAEO_SOLVER_HPP

#include <cstddef>
#include <vector>

#include "daeo/events.hpp"
#include "daeo/integrator.hpp"
#include "daeo/optimizer.hpp"
#include "daeo/problem.hpp"

namespace daeo {

struct TrajectoryPoint {
  SolverState state;
  /// The point was inserted at an event time.
  bool is_event = false;
};

struct SolverStats {
  std::size_t steps = 0;
  std::size_t newton_iterations = 0;
  /// Every call of global_search, including the initial one.
  std::size_t global_searches = 0;
  /// Searches triggered by tracking failures rather than by the cadence.
  std::size_t forced_searches = 0;
  std::size_t events = 0;
  std::size_t uncorrectable_switches = 0;
  /// Tracked optimizers dropped because they stopped being minimizers.
  std::size_t vanished = 0;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  std::vector<EventRecord> events;
  SolverStats stats;
  double wall_seconds = 0.0;
};

/**
 * @brief Re-run global search at state.x and carry identities over.
 * @details Tracked points and new records that are mutual nearest
 * neighbours are matched and the record inherits the tracked id. Other new
 * records get fresh ids starting at @c next_id (which is advanced); other
 * tracked points are dropped.
 */
SolverState reoptimize(const SolverState &state, const ProblemSpec &spec, const SolverConfig &cfg,
                       std::size_t &next_id);

/**
 * @brief Solve spec from t0 to t_end with a fixed step cfg.dt (the last step
 * is shortened to land on t_end).
 * @details When cfg.reopt_period > 0 the global search runs after every
 * reopt_period-th step and after the final step; in AlwaysGlobalOptimize
 * mode it runs after every step.
 * @throws Error subclasses, stamped with the failing time.
 */
Trajectory solve(const ProblemSpec &spec, const SolverConfig &cfg);

} // namespace daeo

#endif
