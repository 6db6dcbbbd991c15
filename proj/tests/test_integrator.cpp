#include <cmath>
#include <vector>

#include "doctest.h"

#include "daeo/errors.hpp"
#include "daeo/integrator.hpp"
#include "daeo/optimizer.hpp"
#include "daeo/problem.hpp"
#include "support.hpp"

using daeo::Interval;
namespace dt = daeo::testing;

namespace {

daeo::SolverState initial_state(const daeo::ProblemSpec &spec, const daeo::SolverConfig &cfg) {
  daeo::SolverState s{spec.t0, spec.x0, {}};
  s.optimizers = daeo::global_search(spec.h, s.x, spec.y_domain, cfg);
  return s;
}

// The same state, tracking only the global minimizer.
daeo::SolverState star_only(daeo::SolverState s) {
  const daeo::OptimizerRecord star = s.optimizers.star();
  s.optimizers.records = {star};
  s.optimizers.star_index = 0;
  return s;
}

} // namespace

TEST_CASE("drift examples") {
  const daeo::ProblemSpec simple = daeo::builtin_problem("simple");
  const Eigen::VectorXd one = Eigen::VectorXd::Constant(1, 1.0);
  const Eigen::VectorXd d = daeo::drift(simple.h, one, one, Eigen::VectorXd::Constant(1, -3.0));
  CHECK(std::abs(d(0)) <= 1e-15);

  auto h = [](auto x, auto y) { return daeo::pow_int(x[0] - y[0], 2); };
  const daeo::Objective rides = daeo::Objective::from_generic(h);
  for (double v : {-2.0, 0.5, 3.0}) {
    const Eigen::VectorXd p = Eigen::VectorXd::Constant(1, 0.7);
    CHECK(daeo::drift(rides, p, p, Eigen::VectorXd::Constant(1, v))(0) ==
          doctest::Approx(v).epsilon(1e-15));
  }
}

TEST_CASE("drift matches a finite difference of re-optimized minimizers") {
  const daeo::ProblemSpec robust = daeo::builtin_problem("robust");
  const daeo::SolverConfig cfg;
  const double eps = 1e-6;
  for (double x : {1.0, 2.0, 3.0}) {
    const auto set = daeo::global_search(robust.h, Eigen::VectorXd::Constant(1, x),
                                         robust.y_domain, cfg);
    const auto plus = daeo::global_search(robust.h, Eigen::VectorXd::Constant(1, x + eps),
                                          robust.y_domain, cfg);
    const auto minus = daeo::global_search(robust.h, Eigen::VectorXd::Constant(1, x - eps),
                                           robust.y_domain, cfg);
    REQUIRE(set.size() == plus.size());
    REQUIRE(set.size() == minus.size());
    for (std::size_t k = 0; k < set.size(); ++k) {
      const double fd = (plus.records[k].point(0) - minus.records[k].point(0)) / (2.0 * eps);
      const double d = daeo::drift(robust.h, Eigen::VectorXd::Constant(1, x),
                                   set.records[k].point, Eigen::VectorXd::Constant(1, 1.0))(0);
      INFO("x = " << x << ", minimizer " << k);
      CHECK(std::abs(d - fd) <= 1e-5 * std::abs(fd));
      // Independent oracle: dy/dx = -h_xy / h_yy = 2 / h_yy.
      CHECK(d == doctest::Approx(2.0 / dt::robust_hyy(x, set.records[k].point(0))).epsilon(1e-9));
    }
  }
}

TEST_CASE("singular Hessian in drift") {
  auto h = [](auto, auto y) { return daeo::pow_int(y[0], 4); };
  const daeo::Objective quartic = daeo::Objective::from_generic(h);
  CHECK_THROWS_AS(daeo::drift(quartic, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1),
                              Eigen::VectorXd::Constant(1, 1.0)),
                  daeo::SingularityError);
}

TEST_CASE("one trapezoidal step of the linear segment") {
  const daeo::ProblemSpec spec = daeo::builtin_problem("simple");
  const daeo::SolverConfig cfg;
  const daeo::SolverState s0 = initial_state(spec, cfg);
  REQUIRE(s0.optimizers.size() == 2);
  const daeo::SolverState s1 = daeo::step(s0, 0.25, cfg, spec);
  const double expected = (1.0 - 3.0 * 0.25 / 2.0) / (1.0 + 3.0 * 0.25 / 2.0);
  CHECK(s1.x(0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(s1.t == 0.25);
  // Both minimizers are stationary for every x.
  CHECK(std::abs(s1.optimizers.records[0].point(0) + 1.0) <= 1e-9);
  CHECK(std::abs(s1.optimizers.records[1].point(0) - 1.0) <= 1e-9);
  // After the step x < 1/2, so the argmin moved to y = -1.
  CHECK(s1.y_star()(0) < 0.0);
  CHECK(s1.optimizers.records[1].id == s0.optimizers.records[1].id);
}

TEST_CASE("zero dynamics leave the state unchanged") {
  auto f = [](auto x, auto) {
    using T = typename decltype(x)::value_type;
    return std::vector<T>{T(0.0) * x[0]};
  };
  auto h = [](auto x, auto y) { return daeo::pow_int(y[0] - x[0], 2) * (1.0 + y[0] * y[0]); };
  const daeo::ProblemSpec spec = daeo::make_problem(
      "still", 1, 1, f, h, Eigen::VectorXd::Constant(1, 0.3), 0.0, 1.0, {Interval(-2, 2)});
  const daeo::SolverConfig cfg;
  const daeo::SolverState s0 = initial_state(spec, cfg);
  const daeo::SolverState s1 = daeo::step(s0, 0.1, cfg, spec);
  CHECK(s1.x(0) == s0.x(0));
  REQUIRE(s1.optimizers.size() == s0.optimizers.size());
  for (std::size_t k = 0; k < s0.optimizers.size(); ++k) {
    CHECK(std::abs(s1.optimizers.records[k].point(0) - s0.optimizers.records[k].point(0)) <=
          1e-12);
  }
}

TEST_CASE("local error of one step is third order") {
  const daeo::ProblemSpec spec = daeo::builtin_problem("robust");
  const daeo::SolverConfig cfg;
  const daeo::SolverState s0 = star_only(initial_state(spec, cfg));
  const double y0 = s0.y_star()(0);

  std::vector<double> dts{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> errs;
  for (double h : dts) {
    const daeo::SolverState s1 = daeo::step(s0, h, cfg, spec);
    // xdot = y*(x) with the branch followed by Newton on the exact gradient.
    double guess = y0;
    auto rhs = [&guess](double x) {
      guess = dt::newton_1d([x](double y) { return dt::robust_hy(x, y); },
                            [x](double y) { return dt::robust_hyy(x, y); }, guess);
      return guess;
    };
    const double ref = dt::rk4(rhs, s0.x(0), h, 100);
    errs.push_back(std::abs(s1.x(0) - ref));
  }
  const double slope = dt::loglog_slope(dts, errs);
  INFO("slope = " << slope);
  CHECK(slope >= 2.7);
  CHECK(slope <= 3.3);
}

TEST_CASE("optimality holds for every tracked point after each step") {
  const daeo::ProblemSpec spec = daeo::builtin_problem("robust");
  const daeo::SolverConfig cfg;
  daeo::SolverState s = initial_state(spec, cfg);
  REQUIRE(s.optimizers.size() > 2);
  daeo::StepStats stats;
  for (int n = 0; n < 15; ++n) {
    s = daeo::step(s, 0.01, cfg, spec, &stats);
    CHECK(daeo::optimality_residual(s, spec) <= 10.0 * cfg.newton_tol);
    for (const auto &r : s.optimizers.records) {
      CHECK(std::abs(dt::robust_hy(s.x(0), r.point(0))) <= 10.0 * cfg.newton_tol);
    }
  }
  CHECK(stats.newton_iterations > 0);
  CHECK(s.t == doctest::Approx(0.15));
}

TEST_CASE("Newton failure is reported with its residual") {
  const daeo::ProblemSpec spec = daeo::builtin_problem("robust");
  daeo::SolverConfig cfg;
  cfg.newton_max_iter = 1;
  cfg.newton_tol = 1e-300;
  const daeo::SolverState s0 = initial_state(spec, daeo::SolverConfig{});
  try {
    daeo::step(s0, 0.1, cfg, spec);
    FAIL("expected StepFailure");
  } catch (const daeo::StepFailure &e) {
    CHECK(e.residual() > 0.0);
  }
}
