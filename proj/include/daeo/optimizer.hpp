/**
 * @file optimizer.hpp
 * @brief Deterministic global search for all local minimizers of h(x, .)
 * over a box, using interval bounds on the value, gradient and Hessian.
 */
#ifndef DAEO_OPTIMIZER_HPP
#define DAEO_OPTIMIZER_HPP

#include <cstddef>
#include <vector>

#include "Eigen/Dense"

#include "daeo/ad.hpp"
#include "daeo/interval.hpp"
#include "daeo/problem.hpp"

namespace daeo {

using SearchBox = std::vector<Interval>;

struct OptimizerRecord {
  /// Verified enclosure from the last global search.
  SearchBox box;
  Eigen::VectorXd point;
  /// h(x, point) at the x this record was last evaluated at.
  double value = 0.0;
  /// The box touches the boundary of the search domain.
  bool on_boundary = false;
  /// Identity of this minimizer, stable across tracking steps.
  std::size_t id = 0;
};

struct OptimizerSet {
  std::vector<OptimizerRecord> records;
  std::size_t star_index = 0;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  const OptimizerRecord &star() const { return records.at(star_index); }
  /// Index of the record with the given id, or size() if absent.
  std::size_t find(std::size_t id) const;
};

enum class Definiteness { positive, negative, indeterminate };

/// Determinant of the leading n x n block by Laplace expansion.
Interval interval_determinant(const DenseMatrix<Interval> &m, std::size_t n);

/**
 * @brief Sylvester's criterion on an interval matrix: positive iff every
 * leading principal minor is certainly positive; negative iff the same
 * holds for -H.
 */
Definiteness sylvester_positive_definite(const DenseMatrix<Interval> &hess);

/// Sylvester's criterion on a real matrix.
Definiteness sylvester_positive_definite(const Eigen::MatrixXd &hess);

enum class NarrowStatus {
  converged,
  /// Newton ran into the box boundary: no stationary point inside.
  no_minimizer,
  not_converged,
};

struct NarrowResult {
  NarrowStatus status = NarrowStatus::not_converged;
  OptimizerRecord record;
  int iterations = 0;
};

/**
 * @brief Damped Newton on the y-gradient from the box midpoint, iterates
 * clipped to the box.
 * @throws ContractViolation unless the interval Hessian over @c box is
 * positive definite.
 */
NarrowResult narrow(const Objective &h, const Eigen::VectorXd &x, const SearchBox &box,
                    const SolverConfig &cfg);

struct SearchStats {
  std::size_t boxes_processed = 0;
  std::size_t narrowed = 0;
  int max_depth = 0;
};

/**
 * @brief Find every local minimizer of h(x, .) in @c domain.
 * @details Boxes are taken first-in first-out. A box is discarded if the
 * interval gradient excludes zero or the interval Hessian is negative
 * definite, narrowed by Newton if the Hessian is positive definite, and
 * otherwise split in every coordinate. Boxes narrower than
 * @c cfg.opt_width_tol are emitted as they are, unless the Hessian at the
 * midpoint has a negative eigenvalue (saddle). With @c cfg.global_only,
 * boxes whose lower bound exceeds the incumbent are discarded and only the
 * global minimizer is returned.
 *
 * Records are sorted by point, deduplicated by hull and numbered 0..K-1.
 * @throws ResourceError when the work list exceeds @c cfg.max_work_list.
 */
OptimizerSet global_search(const Objective &h, const Eigen::VectorXd &x,
                           const SearchBox &domain, const SolverConfig &cfg,
                           SearchStats *stats = nullptr);

/// Re-evaluate each record's value at x and point star_index to the least.
void update_star(OptimizerSet &set, const Objective &h, const Eigen::VectorXd &x);

} // namespace daeo

#endif
