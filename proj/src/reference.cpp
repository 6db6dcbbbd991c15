#include "daeo/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "fmt/format.h"

#include "daeo/errors.hpp"
#include "daeo/integrator.hpp"
#include "daeo/optimizer.hpp"

namespace daeo {

namespace {

constexpr int kPolishIterations = 50;
constexpr int kRootIterations = 200;

struct Branch {
  Eigen::VectorXd y;
  bool alive = true;
};

class Reference {
public:
  Reference(const ProblemSpec &spec, const SolverConfig &cfg, const ReferenceOptions &opts)
      : m_spec(spec), m_cfg(cfg), m_opts(opts) {}

  ReferenceResult run() {
    double t = m_spec.t0;
    Eigen::VectorXd x = m_spec.x0;
    search(x);
    int steps_since_search = 0;
    while (t < m_spec.t_end) {
      double h = std::min(m_opts.dt, m_spec.t_end - t);
      if (m_spec.t_end - (t + h) < 1e-12 * m_opts.dt) {
        h = m_spec.t_end - t;
      }
      const Eigen::VectorXd x_new = rk4(x, m_branches[m_star].y, h);
      std::vector<Branch> moved = follow(x_new);
      const std::size_t best = argmin(moved, x_new);
      if (best != m_star && m_branches[best].alive) {
        // Switch inside the step: find the earliest crossing among all
        // branches that undercut the current one at the end of the step.
        double tau_s = h;
        std::size_t to = best;
        for (std::size_t k = 0; k < moved.size(); ++k) {
          if (k == m_star || !moved[k].alive || !m_branches[k].alive ||
              value(x_new, moved[k].y) >= value(x_new, moved[m_star].y)) {
            continue;
          }
          const double s = crossing(x, h, k);
          if (s < tau_s) {
            tau_s = s;
            to = k;
          }
        }
        x = rk4(x, m_branches[m_star].y, tau_s);
        t += tau_s;
        m_branches = follow(x);
        m_star = to;
        m_events.push_back(t);
      } else {
        x = x_new;
        t += h;
        m_branches = std::move(moved);
        m_star = best;
      }
      if (m_opts.search_every > 0 && ++steps_since_search >= m_opts.search_every &&
          t < m_spec.t_end) {
        search(x);
        steps_since_search = 0;
      }
    }
    return ReferenceResult{x, m_events};
  }

private:
  const ProblemSpec &m_spec;
  const SolverConfig &m_cfg;
  const ReferenceOptions &m_opts;
  std::vector<Branch> m_branches;
  std::size_t m_star = 0;
  std::vector<double> m_events;

  void search(const Eigen::VectorXd &x) {
    SolverConfig cfg = m_cfg;
    cfg.global_only = false;
    const OptimizerSet set = global_search(m_spec.h, x, m_spec.y_domain, cfg);
    if (set.empty()) {
      throw StepFailure("reference: no minimizer in the search domain", 0.0);
    }
    m_branches.clear();
    for (const auto &rec : set.records) {
      m_branches.push_back({polish(x, rec.point).value_or(rec.point), true});
    }
    m_star = set.star_index;
  }

  double value(const Eigen::VectorXd &x, const Eigen::VectorXd &y) const {
    return evaluate_objective(m_spec, x, y);
  }

  /// Newton's method on dh/dy = 0 from y0; empty if it fails or lands on a
  /// point that is not a strict minimizer.
  std::optional<Eigen::VectorXd> polish(const Eigen::VectorXd &x, Eigen::VectorXd y) const {
    const std::vector<double> xv = to_vector(x);
    for (int it = 0; it < kPolishIterations; ++it) {
      const std::vector<double> yv = to_vector(y);
      const SecondOrder<double> d =
          hessian<double>(m_spec.h, std::span<const double>(xv), std::span<const double>(yv));
      const auto n = static_cast<Eigen::Index>(y.size());
      Eigen::MatrixXd hess(n, n);
      Eigen::VectorXd grad(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        grad(i) = d.grad[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < n; ++j) {
          hess(i, j) = d.hess(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        }
      }
      Eigen::LLT<Eigen::MatrixXd> llt(hess);
      if (llt.info() != Eigen::Success) {
        return std::nullopt;
      }
      const Eigen::VectorXd dy = llt.solve(grad);
      y -= dy;
      if (dy.lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + y.lpNorm<Eigen::Infinity>())) {
        return y;
      }
      if (it > 3 && dy.lpNorm<Eigen::Infinity>() <= 1e-13 * (1.0 + y.lpNorm<Eigen::Infinity>())) {
        return y;
      }
    }
    return std::nullopt;
  }

  Eigen::VectorXd rhs(const Eigen::VectorXd &x, const Eigen::VectorXd &guess) const {
    const auto y = polish(x, guess);
    if (!y) {
      throw StepFailure(fmt::format("reference: lost the global branch near y = {:.6g}",
                                    guess(0)),
                        0.0);
    }
    return evaluate_dynamics(m_spec, x, *y);
  }

  Eigen::VectorXd rk4(const Eigen::VectorXd &x, const Eigen::VectorXd &y, double h) const {
    const Eigen::VectorXd k1 = rhs(x, y);
    const Eigen::VectorXd k2 = rhs(x + 0.5 * h * k1, y);
    const Eigen::VectorXd k3 = rhs(x + 0.5 * h * k2, y);
    const Eigen::VectorXd k4 = rhs(x + h * k3, y);
    return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  std::vector<Branch> follow(const Eigen::VectorXd &x) const {
    std::vector<Branch> out = m_branches;
    for (auto &b : out) {
      if (!b.alive) {
        continue;
      }
      if (auto y = polish(x, b.y)) {
        b.y = *y;
      } else {
        b.alive = false;
      }
    }
    if (!out[m_star].alive) {
      throw StepFailure("reference: the global minimizer vanished", 0.0);
    }
    return out;
  }

  std::size_t argmin(const std::vector<Branch> &bs, const Eigen::VectorXd &x) const {
    std::size_t best = m_star;
    double best_v = value(x, bs[m_star].y);
    for (std::size_t k = 0; k < bs.size(); ++k) {
      if (bs[k].alive) {
        const double v = value(x, bs[k].y);
        if (v < best_v) {
          best_v = v;
          best = k;
        }
      }
    }
    return best;
  }

  /// Partial step length in (0, h] at which branch k overtakes the star.
  double crossing(const Eigen::VectorXd &x, double h, std::size_t k) const {
    auto g = [&](double s) {
      const Eigen::VectorXd xs = rk4(x, m_branches[m_star].y, s);
      const auto ys = polish(xs, m_branches[m_star].y);
      const auto yk = polish(xs, m_branches[k].y);
      if (!ys || !yk) {
        throw StepFailure("reference: branch lost while locating a switch", 0.0);
      }
      return value(xs, *ys) - value(xs, *yk);
    };
    double a = 0.0;
    double b = h;
    double ga = g(a);
    double gb = g(b);
    if (!(ga <= 0.0 && gb > 0.0)) {
      return h;
    }
    // Illinois variant of regula falsi, safeguarded by bisection.
    int side = 0;
    for (int it = 0; it < kRootIterations && b - a > m_opts.event_tol; ++it) {
      double c = (a * gb - b * ga) / (gb - ga);
      if (!(c > a && c < b)) {
        c = 0.5 * (a + b);
      }
      const double gc = g(c);
      if (gc == 0.0) {
        return c;
      }
      if (gc < 0.0) {
        a = c;
        ga = gc;
        if (side == -1) {
          gb *= 0.5;
        }
        side = -1;
      } else {
        b = c;
        gb = gc;
        if (side == 1) {
          ga *= 0.5;
        }
        side = 1;
      }
    }
    return 0.5 * (a + b);
  }
};

} // namespace

ReferenceResult reference_solution(const ProblemSpec &spec, const SolverConfig &cfg,
                                   const ReferenceOptions &opts) {
  if (!(opts.dt > 0.0) || !(opts.event_tol > 0.0)) {
    throw UsageError("reference: dt and event_tol must be positive");
  }
  return Reference(spec, cfg, opts).run();
}

} // namespace daeo
