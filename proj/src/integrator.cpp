#include "daeo/integrator.hpp"

#include <cmath>
#include <limits>

#include "fmt/format.h"

#include "daeo/errors.hpp"

namespace daeo {

namespace {

// Reciprocal condition estimates below this are treated as singular.
constexpr double kMinRcond = 1e-15;

// Layout of the unknown vector [x; y^0; y^1; ...].
struct Layout {
  Eigen::Index nx;
  Eigen::Index ny;
  Eigen::Index n_opt;

  Eigen::Index size() const { return nx + ny * n_opt; }
  Eigen::Index y_offset(Eigen::Index k) const { return nx + ny * k; }
};

Eigen::VectorXd pack(const Layout &lay, const Eigen::VectorXd &x, const OptimizerSet &opt) {
  Eigen::VectorXd z(lay.size());
  z.head(lay.nx) = x;
  for (Eigen::Index k = 0; k < lay.n_opt; ++k) {
    z.segment(lay.y_offset(k), lay.ny) = opt.records[static_cast<std::size_t>(k)].point;
  }
  return z;
}

struct Linearization {
  Eigen::VectorXd residual;
  Eigen::MatrixXd jacobian;
};

// Residual of the combined system at z. f_left is f(x^n, y*^n).
Eigen::VectorXd residual(const Layout &lay, const ProblemSpec &spec, const Eigen::VectorXd &z,
                         const Eigen::VectorXd &x_prev, const Eigen::VectorXd &f_left,
                         Eigen::Index star, double dt) {
  Eigen::VectorXd r(lay.size());
  const Eigen::VectorXd x1 = z.head(lay.nx);
  const Eigen::VectorXd y_star = z.segment(lay.y_offset(star), lay.ny);
  r.head(lay.nx) = x_prev - x1 + 0.5 * dt * (f_left + evaluate_dynamics(spec, x1, y_star));
  for (Eigen::Index k = 0; k < lay.n_opt; ++k) {
    r.segment(lay.y_offset(k), lay.ny) =
        objective_gradient(spec, x1, z.segment(lay.y_offset(k), lay.ny));
  }
  return r;
}

Linearization linearize(const Layout &lay, const ProblemSpec &spec, const Eigen::VectorXd &z,
                        const Eigen::VectorXd &x_prev, const Eigen::VectorXd &f_left,
                        Eigen::Index star, double dt) {
  Linearization lin{Eigen::VectorXd(lay.size()),
                    Eigen::MatrixXd::Zero(lay.size(), lay.size())};
  const std::vector<double> x1 = to_vector(Eigen::VectorXd(z.head(lay.nx)));

  {
    const std::vector<double> y_star =
        to_vector(Eigen::VectorXd(z.segment(lay.y_offset(star), lay.ny)));
    const JacobianResult<double> fj = jacobian<double>(
        spec.f, std::span<const double>(x1), std::span<const double>(y_star));
    for (Eigen::Index i = 0; i < lay.nx; ++i) {
      lin.residual(i) = x_prev(i) - x1[static_cast<std::size_t>(i)] +
                        0.5 * dt * (f_left(i) + fj.value[static_cast<std::size_t>(i)]);
      for (Eigen::Index j = 0; j < lay.nx; ++j) {
        lin.jacobian(i, j) = (i == j ? -1.0 : 0.0) +
                             0.5 * dt * fj.jac(static_cast<std::size_t>(i),
                                               static_cast<std::size_t>(j));
      }
      for (Eigen::Index j = 0; j < lay.ny; ++j) {
        lin.jacobian(i, lay.y_offset(star) + j) =
            0.5 * dt * fj.jac(static_cast<std::size_t>(i), static_cast<std::size_t>(lay.nx + j));
      }
    }
  }

  for (Eigen::Index k = 0; k < lay.n_opt; ++k) {
    const Eigen::Index off = lay.y_offset(k);
    const std::vector<double> yk = to_vector(Eigen::VectorXd(z.segment(off, lay.ny)));
    const ObjectiveDerivatives<double> d = objective_derivatives<double>(
        spec.h, std::span<const double>(x1), std::span<const double>(yk));
    for (Eigen::Index i = 0; i < lay.ny; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      lin.residual(off + i) = d.grad_y[ui];
      for (Eigen::Index j = 0; j < lay.nx; ++j) {
        lin.jacobian(off + i, j) = d.hess_xy(ui, static_cast<std::size_t>(j));
      }
      for (Eigen::Index j = 0; j < lay.ny; ++j) {
        lin.jacobian(off + i, off + j) = d.hess_yy(ui, static_cast<std::size_t>(j));
      }
    }
  }
  return lin;
}

} // namespace

Eigen::VectorXd evaluate_dynamics(const ProblemSpec &spec, const Eigen::VectorXd &x,
                                  const Eigen::VectorXd &y) {
  const std::vector<double> v = spec.f(to_vector(x), to_vector(y));
  return to_eigen(std::span<const double>(v));
}

double evaluate_objective(const ProblemSpec &spec, const Eigen::VectorXd &x,
                          const Eigen::VectorXd &y) {
  return spec.h(to_vector(x), to_vector(y));
}

Eigen::VectorXd objective_gradient(const ProblemSpec &spec, const Eigen::VectorXd &x,
                                   const Eigen::VectorXd &y) {
  const std::vector<double> xv = to_vector(x);
  const std::vector<double> yv = to_vector(y);
  const std::vector<double> g =
      gradient<double>(spec.h, std::span<const double>(xv), std::span<const double>(yv));
  return to_eigen(std::span<const double>(g));
}

Eigen::VectorXd drift(const Objective &h, const Eigen::VectorXd &x, const Eigen::VectorXd &yk,
                      const Eigen::VectorXd &xdot) {
  const std::vector<double> xv = to_vector(x);
  const std::vector<double> yv = to_vector(yk);
  const ObjectiveDerivatives<double> d = objective_derivatives<double>(
      h, std::span<const double>(xv), std::span<const double>(yv));
  const auto ny = static_cast<Eigen::Index>(yv.size());
  const auto nx = static_cast<Eigen::Index>(xv.size());
  Eigen::MatrixXd hyy(ny, ny);
  Eigen::MatrixXd hxy(ny, nx);
  for (Eigen::Index i = 0; i < ny; ++i) {
    for (Eigen::Index j = 0; j < ny; ++j) {
      hyy(i, j) = d.hess_yy(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
    for (Eigen::Index j = 0; j < nx; ++j) {
      hxy(i, j) = d.hess_xy(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(hyy);
  const double rc = lu.rcond();
  if (!(rc > kMinRcond)) {
    const double cond = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    throw SingularityError(
        fmt::format("objective Hessian singular at tracked optimizer (condition ~ {:.3e})", cond),
        cond);
  }
  return -lu.solve(hxy * xdot);
}

SolverState step(const SolverState &state, double dt, const SolverConfig &cfg,
                 const ProblemSpec &spec, StepStats *stats) {
  if (state.optimizers.empty()) {
    throw ContractViolation("step needs at least one tracked optimizer");
  }
  const Layout lay{static_cast<Eigen::Index>(spec.n_x), static_cast<Eigen::Index>(spec.n_y),
                   static_cast<Eigen::Index>(state.optimizers.size())};
  const auto star = static_cast<Eigen::Index>(state.optimizers.star_index);
  const Eigen::VectorXd f_left = evaluate_dynamics(spec, state.x, state.y_star());

  // Predictors: explicit Euler for x, implicit-function drift for each y^k.
  SolverState next = state;
  next.t = state.t + dt;
  next.x = state.x + dt * f_left;
  for (auto &rec : next.optimizers.records) {
    rec.point += dt * drift(spec.h, state.x, rec.point, f_left);
  }
  Eigen::VectorXd z = pack(lay, next.x, next.optimizers);

  double res_norm = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (; iter <= cfg.newton_max_iter; ++iter) {
    const Linearization lin = linearize(lay, spec, z, state.x, f_left, star, dt);
    res_norm = lin.residual.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(res_norm)) {
      break;
    }
    if (res_norm <= cfg.newton_tol) {
      break;
    }
    if (iter == cfg.newton_max_iter) {
      break;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(lin.jacobian);
    const double rc = lu.rcond();
    if (!(rc > kMinRcond)) {
      const double cond = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
      throw SingularityError(
          fmt::format("singular step Jacobian at t = {:.17g} (condition ~ {:.3e})", state.t,
                      cond),
          cond);
    }
    const Eigen::VectorXd delta = lu.solve(-lin.residual);
    double lambda = 1.0;
    Eigen::VectorXd trial = z + delta;
    double trial_norm =
        residual(lay, spec, trial, state.x, f_left, star, dt).lpNorm<Eigen::Infinity>();
    for (int halving = 0; halving < 10 && !(trial_norm < res_norm); ++halving) {
      lambda *= 0.5;
      trial = z + lambda * delta;
      trial_norm =
          residual(lay, spec, trial, state.x, f_left, star, dt).lpNorm<Eigen::Infinity>();
    }
    z = trial;
  }
  if (stats) {
    stats->newton_iterations += iter;
  }
  if (!(res_norm <= cfg.newton_tol)) {
    throw StepFailure(fmt::format("Newton did not converge from t = {:.17g} with dt = {:.3e} "
                                  "(residual {:.3e})",
                                  state.t, dt, res_norm),
                      res_norm);
  }

  next.x = z.head(lay.nx);
  for (Eigen::Index k = 0; k < lay.n_opt; ++k) {
    next.optimizers.records[static_cast<std::size_t>(k)].point =
        z.segment(lay.y_offset(k), lay.ny);
  }
  update_star(next.optimizers, spec.h, next.x);
  return next;
}

double optimality_residual(const SolverState &state, const ProblemSpec &spec) {
  double r = 0.0;
  for (const auto &rec : state.optimizers.records) {
    r = std::max(r, objective_gradient(spec, state.x, rec.point).lpNorm<Eigen::Infinity>());
  }
  return r;
}

} // namespace daeo
