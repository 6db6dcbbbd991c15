#include "daeo/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <utility>

#include "daeo/errors.hpp"

namespace daeo {

namespace {

Eigen::MatrixXd point_hessian(const ProblemSpec &spec, const Eigen::VectorXd &x,
                              const Eigen::VectorXd &y) {
  const std::vector<double> xv = to_vector(x);
  const std::vector<double> yv = to_vector(y);
  const SecondOrder<double> d =
      hessian<double>(spec.h, std::span<const double>(xv), std::span<const double>(yv));
  Eigen::MatrixXd m(d.hess.rows(), d.hess.cols());
  for (std::size_t i = 0; i < d.hess.rows(); ++i) {
    for (std::size_t j = 0; j < d.hess.cols(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d.hess(i, j);
    }
  }
  return m;
}

bool is_strict_minimizer(const ProblemSpec &spec, const Eigen::VectorXd &x,
                         const Eigen::VectorXd &y) {
  return sylvester_positive_definite(point_hessian(spec, x, y)) == Definiteness::positive;
}

void set_star_by_id(OptimizerSet &set, std::size_t id) {
  const std::size_t i = set.find(id);
  if (i < set.size()) {
    set.star_index = i;
  }
}

class Driver {
public:
  Driver(const ProblemSpec &spec, const SolverConfig &cfg, Trajectory &traj)
      : m_spec(spec), m_cfg(cfg), m_traj(traj), m_stats(traj.stats) {}

  void run() {
    SolverState cur{m_spec.t0, m_spec.x0, {}};
    try {
      cur.optimizers = global_search(m_spec.h, cur.x, m_spec.y_domain, m_cfg);
      ++m_stats.global_searches;
      if (cur.optimizers.empty()) {
        throw Error("no local minimizer of h in the search domain");
      }
      m_next_id = cur.optimizers.size();
      m_traj.points.push_back({cur, false});

      const double span = m_spec.t_end - m_spec.t0;
      const auto n_steps =
          std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / m_cfg.dt - 1e-9)));
      for (std::size_t n = 1; n <= n_steps; ++n) {
        const double t_target =
            n == n_steps ? m_spec.t_end : m_spec.t0 + static_cast<double>(n) * m_cfg.dt;
        auto [base, next] = advance(cur, t_target - cur.t);
        next.t = t_target;
        ++m_stats.steps;
        if (base.optimizers.size() != cur.optimizers.size() ||
            base.star_id() != cur.star_id()) {
          m_traj.points.back().state = base;
        }

        const bool reopt_due = m_cfg.mode == SolverMode::AlwaysGlobalOptimize ||
                               (m_cfg.reopt_period > 0 &&
                                (n % static_cast<std::size_t>(m_cfg.reopt_period) == 0 ||
                                 n == n_steps));
        if (reopt_due) {
          next = reoptimize(next, m_spec, m_cfg, m_next_id);
          ++m_stats.global_searches;
        }

        EventCorrection ec;
        if (m_cfg.mode == SolverMode::TrackingNoEvents) {
          ec.states.push_back(next);
        } else {
          StepStats ss;
          ec = detect_and_correct(base, next, m_cfg, m_spec, &ss);
          m_stats.newton_iterations += static_cast<std::size_t>(ss.newton_iterations);
        }
        if (reopt_due && !ec.events.empty()) {
          reconcile(ec.states.back(), next);
        }
        m_stats.events += ec.events.size();
        m_stats.uncorrectable_switches += ec.uncorrectable_switch ? 1 : 0;

        for (std::size_t i = 0; i < ec.states.size(); ++i) {
          const bool is_event = i + 1 < ec.states.size();
          if (is_event && ec.states[i].t <= m_traj.points.back().state.t) {
            m_traj.points.back() = {ec.states[i], true};
          } else {
            m_traj.points.push_back({ec.states[i], is_event});
          }
        }
        m_traj.events.insert(m_traj.events.end(), ec.events.begin(), ec.events.end());
        cur = ec.states.back();
      }
    } catch (Error &e) {
      if (!e.time()) {
        e.set_time(cur.t);
      }
      throw;
    }
  }

private:
  const ProblemSpec &m_spec;
  const SolverConfig &m_cfg;
  Trajectory &m_traj;
  SolverStats &m_stats;
  std::size_t m_next_id = 0;

  SolverState forced_search(const SolverState &s) {
    ++m_stats.global_searches;
    ++m_stats.forced_searches;
    SolverState out = reoptimize(s, m_spec, m_cfg, m_next_id);
    if (out.optimizers.empty()) {
      throw Error("no local minimizer of h left in the search domain");
    }
    return out;
  }

  // Drop tracked points that are no longer strict minimizers. Returns false
  // if the global minimizer itself degenerated.
  bool prune(SolverState &s) {
    const std::size_t star_id = s.star_id();
    bool star_ok = true;
    std::vector<OptimizerRecord> kept;
    for (auto &rec : s.optimizers.records) {
      if (is_strict_minimizer(m_spec, s.x, rec.point)) {
        kept.push_back(std::move(rec));
      } else if (rec.id == star_id) {
        star_ok = false;
        kept.push_back(std::move(rec));
      } else {
        ++m_stats.vanished;
      }
    }
    s.optimizers.records = std::move(kept);
    set_star_by_id(s.optimizers, star_id);
    return star_ok;
  }

  bool drift_within_bounds(const SolverState &base, const SolverState &next, double dt) {
    const Eigen::VectorXd xdot = evaluate_dynamics(m_spec, base.x, base.y_star());
    for (std::size_t i = 0; i < base.optimizers.size(); ++i) {
      const auto &before = base.optimizers.records[i].point;
      const auto &after = next.optimizers.records[i].point;
      const double rate = drift(m_spec.h, base.x, before, xdot).lpNorm<Eigen::Infinity>();
      double allowed = 2.0 * rate * dt + m_cfg.opt_width_tol;
      if (m_spec.drift_bound) {
        allowed += *m_spec.drift_bound * dt;
      }
      if ((after - before).lpNorm<Eigen::Infinity>() > allowed) {
        return false;
      }
    }
    return true;
  }

  std::pair<SolverState, SolverState> advance(const SolverState &cur, double dt) {
    SolverState base = cur;
    if (!prune(base)) {
      base = forced_search(base);
    }
    for (int attempt = 0;; ++attempt) {
      try {
        StepStats ss;
        SolverState next = step(base, dt, m_cfg, m_spec, &ss);
        m_stats.newton_iterations += static_cast<std::size_t>(ss.newton_iterations);
        if (!drift_within_bounds(base, next, dt) || !prune(next)) {
          next = forced_search(next);
        }
        return {std::move(base), std::move(next)};
      } catch (const StepFailure &) {
        if (attempt > 1) {
          throw;
        }
      } catch (const SingularityError &) {
        if (attempt > 1) {
          throw;
        }
      }
      if (attempt == 0 && drop_untrackable(base, dt)) {
        continue;
      }
      base = forced_search(base);
    }
  }

  bool steps_cleanly(const SolverState &s, double dt) {
    try {
      step(s, dt, m_cfg, m_spec);
      return true;
    } catch (const StepFailure &) {
    } catch (const SingularityError &) {
    }
    return false;
  }

  // Identify tracked optimizers whose optimality block has no solution at
  // the end of the step (they vanish inside it) and drop them. Returns false
  // if the global minimizer alone cannot be stepped.
  bool drop_untrackable(SolverState &s, double dt) {
    const OptimizerRecord star = s.optimizers.star();
    SolverState probe = s;
    probe.optimizers.records = {star};
    probe.optimizers.star_index = 0;
    if (!steps_cleanly(probe, dt)) {
      return false;
    }
    std::vector<OptimizerRecord> kept;
    for (const auto &rec : s.optimizers.records) {
      if (rec.id == star.id) {
        kept.push_back(rec);
        continue;
      }
      probe.optimizers.records = {star, rec};
      if (steps_cleanly(probe, dt)) {
        kept.push_back(rec);
      } else {
        ++m_stats.vanished;
      }
    }
    s.optimizers.records = std::move(kept);
    set_star_by_id(s.optimizers, star.id);
    return true;
  }

  // After an event correction, bring the corrected end state in line with
  // the global search performed at the end of the uncorrected step.
  void reconcile(SolverState &corrected, const SolverState &searched) {
    const std::size_t star_id = corrected.star_id();
    OptimizerSet merged;
    for (const auto &rec : searched.optimizers.records) {
      const std::size_t i = corrected.optimizers.find(rec.id);
      if (i < corrected.optimizers.size()) {
        OptimizerRecord r = corrected.optimizers.records[i];
        r.box = rec.box;
        r.on_boundary = rec.on_boundary;
        merged.records.push_back(std::move(r));
      } else {
        merged.records.push_back(rec);
      }
    }
    if (merged.find(star_id) == merged.size()) {
      merged.records.push_back(corrected.optimizers.star());
    }
    corrected.optimizers = std::move(merged);
    update_star(corrected.optimizers, m_spec.h, corrected.x);
  }
};

} // namespace

SolverState reoptimize(const SolverState &state, const ProblemSpec &spec, const SolverConfig &cfg,
                       std::size_t &next_id) {
  OptimizerSet found = global_search(spec.h, state.x, spec.y_domain, cfg);
  const auto &old = state.optimizers.records;
  auto &neu = found.records;

  auto nearest = [](const Eigen::VectorXd &p, const std::vector<OptimizerRecord> &pool) {
    std::size_t best = pool.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const double d = (pool[i].point - p).lpNorm<Eigen::Infinity>();
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  };

  for (std::size_t j = 0; j < neu.size(); ++j) {
    const std::size_t i = nearest(neu[j].point, old);
    if (i < old.size() && nearest(old[i].point, neu) == j) {
      neu[j].id = old[i].id;
    } else {
      neu[j].id = next_id++;
    }
  }
  SolverState out = state;
  out.optimizers = std::move(found);
  return out;
}

Trajectory solve(const ProblemSpec &spec, const SolverConfig &cfg) {
  validate(cfg, spec.t0, spec.t_end);
  const auto start = std::chrono::steady_clock::now();
  Trajectory traj;
  Driver(spec, cfg, traj).run();
  traj.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return traj;
}

} // namespace daeo
