#include "daeo/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "fmt/format.h"

#include "daeo/errors.hpp"

namespace daeo {

namespace {

struct WorkItem {
  SearchBox box;
  int depth = 0;
};

std::vector<double> midpoints(const SearchBox &box) {
  std::vector<double> m;
  m.reserve(box.size());
  for (const auto &b : box) {
    m.push_back(midpoint(b));
  }
  return m;
}

double max_width(const SearchBox &box) {
  double w = 0.0;
  for (const auto &b : box) {
    w = std::max(w, width(b));
  }
  return w;
}

Eigen::MatrixXd to_matrix(const DenseMatrix<double> &m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out(i, j) = m(i, j);
    }
  }
  return out;
}

Eigen::VectorXd clip(const Eigen::VectorXd &y, const SearchBox &box) {
  Eigen::VectorXd out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    out(i) = std::clamp(y(i), box[i].lo(), box[i].hi());
  }
  return out;
}

bool inside(const Eigen::VectorXd &y, const SearchBox &box, double slack) {
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) < box[i].lo() - slack || y(i) > box[i].hi() + slack) {
      return false;
    }
  }
  return true;
}

double evaluate(const Objective &h, const Eigen::VectorXd &x, const Eigen::VectorXd &y) {
  return h(to_vector(x), to_vector(y));
}

// Newton direction for grad = 0; empty when the Hessian is singular.
std::optional<Eigen::VectorXd> newton_direction(const Objective &h,
                                                const std::vector<double> &x,
                                                const Eigen::VectorXd &y) {
  const std::vector<double> yv = to_vector(y);
  const SecondOrder<double> d =
      hessian<double>(h, std::span<const double>(x), std::span<const double>(yv));
  const Eigen::VectorXd g = to_eigen(std::span<const double>(d.grad));
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(to_matrix(d.hess));
  const Eigen::VectorXd s = lu.solve(-g);
  if (!s.allFinite()) {
    return std::nullopt;
  }
  return s;
}

NarrowResult narrow_positive_definite(const Objective &h, const Eigen::VectorXd &x,
                                      const SearchBox &box, const SolverConfig &cfg) {
  const std::vector<double> xv = to_vector(x);
  const std::vector<double> mid = midpoints(box);
  Eigen::VectorXd y = to_eigen(std::span<const double>(mid));
  NarrowResult result;
  double h_y = evaluate(h, x, y);
  for (int it = 0; it < cfg.newton_max_iter; ++it) {
    result.iterations = it + 1;
    const auto s = newton_direction(h, xv, y);
    if (!s) {
      return result;
    }
    double damping = 1.0;
    Eigen::VectorXd trial = clip(y + *s, box);
    double h_trial = evaluate(h, x, trial);
    for (int halving = 0; halving < 10 && h_trial > h_y + 1e-14 * (1.0 + std::abs(h_y));
         ++halving) {
      damping *= 0.5;
      trial = clip(y + damping * *s, box);
      h_trial = evaluate(h, x, trial);
    }
    const double step = (trial - y).lpNorm<Eigen::Infinity>();
    y = trial;
    h_y = h_trial;
    if (step <= cfg.opt_width_tol) {
      // A stationary point outside the box pulls the iterate onto the
      // boundary; the unclipped step then leaves the box.
      const auto full = newton_direction(h, xv, y);
      if (!full) {
        return result;
      }
      if (!inside(y + *full, box, cfg.opt_width_tol)) {
        result.status = NarrowStatus::no_minimizer;
        return result;
      }
      const double radius = std::min(std::max(step, full->lpNorm<Eigen::Infinity>()),
                                     0.5 * cfg.opt_width_tol);
      SearchBox enclosure;
      enclosure.reserve(box.size());
      for (std::size_t i = 0; i < box.size(); ++i) {
        const double yi = y(static_cast<Eigen::Index>(i));
        const Interval around(std::nextafter(yi - radius, -1e300),
                              std::nextafter(yi + radius, 1e300));
        enclosure.push_back(intersect(around, box[i]).value_or(Interval(yi)));
      }
      result.status = NarrowStatus::converged;
      result.record.box = std::move(enclosure);
      result.record.point = y;
      result.record.value = h_y;
      return result;
    }
  }
  return result;
}

bool boxes_intersect(const SearchBox &a, const SearchBox &b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!intersects(a[i], b[i])) {
      return false;
    }
  }
  return true;
}

bool point_less(const OptimizerRecord &a, const OptimizerRecord &b) {
  for (Eigen::Index i = 0; i < a.point.size(); ++i) {
    if (a.point(i) != b.point(i)) {
      return a.point(i) < b.point(i);
    }
  }
  return false;
}

std::vector<OptimizerRecord> deduplicate(std::vector<OptimizerRecord> records) {
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < records.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < records.size() && !merged; ++j) {
        if (!boxes_intersect(records[i].box, records[j].box)) {
          continue;
        }
        OptimizerRecord &keep = records[i].value <= records[j].value ? records[i] : records[j];
        OptimizerRecord combined = keep;
        for (std::size_t k = 0; k < combined.box.size(); ++k) {
          combined.box[k] = hull(records[i].box[k], records[j].box[k]);
        }
        records[i] = std::move(combined);
        records.erase(records.begin() + static_cast<std::ptrdiff_t>(j));
        merged = true;
      }
    }
  }
  std::sort(records.begin(), records.end(), point_less);
  return records;
}

} // namespace

std::size_t OptimizerSet::find(std::size_t id) const {
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].id == id) {
      return i;
    }
  }
  return records.size();
}

Interval interval_determinant(const DenseMatrix<Interval> &m, std::size_t n) {
  if (n == 1) {
    return m(0, 0);
  }
  if (n == 2) {
    return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  }
  Interval det(0.0);
  for (std::size_t j = 0; j < n; ++j) {
    DenseMatrix<Interval> minor(n - 1, n - 1);
    for (std::size_t r = 1; r < n; ++r) {
      for (std::size_t c = 0, cc = 0; c < n; ++c) {
        if (c != j) {
          minor(r - 1, cc++) = m(r, c);
        }
      }
    }
    const Interval term = m(0, j) * interval_determinant(minor, n - 1);
    det = (j % 2 == 0) ? det + term : det - term;
  }
  return det;
}

Definiteness sylvester_positive_definite(const DenseMatrix<Interval> &hess) {
  if (hess.rows() != hess.cols()) {
    throw ContractViolation("Sylvester criterion needs a square matrix");
  }
  const std::size_t n = hess.rows();
  auto all_minors_positive = [n](const DenseMatrix<Interval> &m) {
    for (std::size_t k = 1; k <= n; ++k) {
      if (!(interval_determinant(m, k).lo() > 0.0)) {
        return false;
      }
    }
    return true;
  };
  if (all_minors_positive(hess)) {
    return Definiteness::positive;
  }
  DenseMatrix<Interval> negated(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      negated(i, j) = -hess(i, j);
    }
  }
  if (all_minors_positive(negated)) {
    return Definiteness::negative;
  }
  return Definiteness::indeterminate;
}

Definiteness sylvester_positive_definite(const Eigen::MatrixXd &hess) {
  auto positive = [](const Eigen::MatrixXd &m) {
    for (Eigen::Index k = 1; k <= m.rows(); ++k) {
      if (!(m.topLeftCorner(k, k).determinant() > 0.0)) {
        return false;
      }
    }
    return true;
  };
  if (positive(hess)) {
    return Definiteness::positive;
  }
  if (positive(-hess)) {
    return Definiteness::negative;
  }
  return Definiteness::indeterminate;
}

NarrowResult narrow(const Objective &h, const Eigen::VectorXd &x, const SearchBox &box,
                    const SolverConfig &cfg) {
  const auto xi = to_vector<Interval>(x);
  const SecondOrder<Interval> d =
      hessian<Interval>(h, std::span<const Interval>(xi), std::span<const Interval>(box));
  if (sylvester_positive_definite(d.hess) != Definiteness::positive) {
    throw ContractViolation("narrow requires a positive definite interval Hessian");
  }
  return narrow_positive_definite(h, x, box, cfg);
}

OptimizerSet global_search(const Objective &h, const Eigen::VectorXd &x,
                           const SearchBox &domain, const SolverConfig &cfg,
                           SearchStats *stats) {
  SearchStats local_stats;
  SearchStats &st = stats ? *stats : local_stats;
  st = SearchStats{};

  for (const auto &d : domain) {
    if (!(width(d) > 0.0)) {
      throw ContractViolation("global_search needs a non-degenerate domain");
    }
  }
  const std::vector<Interval> xi = to_vector<Interval>(x);
  const std::vector<double> xd = to_vector(x);
  std::deque<WorkItem> work{WorkItem{domain, 0}};
  std::vector<OptimizerRecord> found;
  double incumbent = std::numeric_limits<double>::infinity();

  // Boxes below the width tolerance are kept unless the point Hessian at
  // the midpoint shows a direction of negative curvature (a saddle).
  auto emit_unverified = [&](const SearchBox &box) {
    const std::vector<double> mid = midpoints(box);
    const SecondOrder<double> pd =
        hessian<double>(h, std::span<const double>(xd), std::span<const double>(mid));
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(to_matrix(pd.hess)).eigenvalues();
    if (ev.minCoeff() < -1e-8 * std::max(1.0, ev.cwiseAbs().maxCoeff())) {
      return;
    }
    OptimizerRecord rec;
    rec.box = box;
    rec.point = to_eigen(std::span<const double>(mid));
    rec.value = evaluate(h, x, rec.point);
    found.push_back(std::move(rec));
  };

  auto branch = [&](const WorkItem &item) {
    std::vector<SearchBox> children{SearchBox{}};
    for (const auto &component : item.box) {
      std::vector<SearchBox> next;
      if (width(component) > cfg.opt_width_tol) {
        const auto [left, right] = bisect(component);
        for (const auto &c : children) {
          next.push_back(c);
          next.back().push_back(left);
          next.push_back(c);
          next.back().push_back(right);
        }
      } else {
        for (const auto &c : children) {
          next.push_back(c);
          next.back().push_back(component);
        }
      }
      children = std::move(next);
    }
    for (auto &c : children) {
      work.push_back(WorkItem{std::move(c), item.depth + 1});
    }
    st.max_depth = std::max(st.max_depth, item.depth + 1);
  };

  while (!work.empty()) {
    if (work.size() > cfg.max_work_list) {
      throw ResourceError(
          fmt::format("global search work list exceeded {} boxes at subdivision depth {}",
                      cfg.max_work_list, work.front().depth),
          work.front().depth);
    }
    WorkItem item = std::move(work.front());
    work.pop_front();
    ++st.boxes_processed;

    const SecondOrder<Interval> d = hessian<Interval>(
        h, std::span<const Interval>(xi), std::span<const Interval>(item.box));

    // Upper bound from the box and from its midpoint.
    incumbent = std::min(incumbent, d.value.hi());
    const std::vector<double> mid = midpoints(item.box);
    const std::vector<Interval> mid_box(mid.begin(), mid.end());
    incumbent = std::min(incumbent, h(xi, mid_box).hi());
    if (cfg.global_only && d.value.lo() > incumbent) {
      continue;
    }

    bool gradient_excludes_zero = false;
    for (const auto &g : d.grad) {
      gradient_excludes_zero = gradient_excludes_zero || !contains(g, 0.0);
    }
    if (gradient_excludes_zero) {
      continue;
    }

    const Definiteness def = sylvester_positive_definite(d.hess);
    if (def == Definiteness::negative) {
      continue;
    }
    const bool too_small = max_width(item.box) <= cfg.opt_width_tol;
    if (def == Definiteness::positive) {
      ++st.narrowed;
      NarrowResult nr = narrow_positive_definite(h, x, item.box, cfg);
      if (nr.status == NarrowStatus::converged) {
        found.push_back(std::move(nr.record));
        continue;
      }
      if (nr.status == NarrowStatus::no_minimizer) {
        continue;
      }
    }
    if (too_small) {
      emit_unverified(item.box);
    } else {
      branch(item);
    }
  }

  for (auto &rec : found) {
    for (std::size_t i = 0; i < domain.size(); ++i) {
      rec.on_boundary = rec.on_boundary || rec.box[i].lo() <= domain[i].lo() ||
                        rec.box[i].hi() >= domain[i].hi();
    }
  }

  OptimizerSet out;
  out.records = deduplicate(std::move(found));
  for (std::size_t i = 0; i < out.records.size(); ++i) {
    out.records[i].id = i;
  }
  for (std::size_t i = 1; i < out.records.size(); ++i) {
    if (out.records[i].value < out.records[out.star_index].value) {
      out.star_index = i;
    }
  }
  if (cfg.global_only && !out.empty()) {
    OptimizerRecord best = out.records[out.star_index];
    best.id = 0;
    out.records = {std::move(best)};
    out.star_index = 0;
  }
  return out;
}

void update_star(OptimizerSet &set, const Objective &h, const Eigen::VectorXd &x) {
  set.star_index = 0;
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    set.records[i].value = evaluate(h, x, set.records[i].point);
    if (set.records[i].value < set.records[set.star_index].value) {
      set.star_index = i;
    }
  }
}

} // namespace daeo
