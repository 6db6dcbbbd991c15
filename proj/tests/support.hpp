/**
 * @file support.hpp
 * @brief Independent oracles shared by the unit and acceptance tests.
 *
 * Nothing here calls solver internals: derivatives are hand-written or
 * finite differences, reference trajectories are plain RK4 with Newton on
 * hand-written gradients.
 */
#ifndef DAEO_TESTS_SUPPORT_HPP
#define DAEO_TESTS_SUPPORT_HPP

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "Eigen/Dense"

namespace daeo::testing {

using RealFn = std::function<double(const std::vector<double> &)>;

/// Central finite-difference gradient.
inline std::vector<double> fd_gradient(const RealFn &f, std::vector<double> y, double h = 1e-5) {
  std::vector<double> g(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double yi = y[i];
    y[i] = yi + h;
    const double fp = f(y);
    y[i] = yi - h;
    const double fm = f(y);
    y[i] = yi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Second-order central finite-difference Hessian from function values.
inline Eigen::MatrixXd fd_hessian(const RealFn &f, std::vector<double> y, double h = 1e-4) {
  const auto n = static_cast<Eigen::Index>(y.size());
  Eigen::MatrixXd H(n, n);
  auto at = [&](std::size_t i, double di, std::size_t j, double dj) {
    std::vector<double> z = y;
    z[i] += di;
    z[j] += dj;
    return f(z);
  };
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) /
          (4.0 * h * h);
    }
  }
  return H;
}

// Hand-written derivatives of the two built-in objectives.

inline double simple_h(double x, double y) {
  return std::pow(1.0 - y * y, 2) - (x - 0.5) * std::sin(std::numbers::pi / 2.0 * y);
}
inline double simple_hy(double x, double y) {
  return -4.0 * y * (1.0 - y * y) -
         (x - 0.5) * std::numbers::pi / 2.0 * std::cos(std::numbers::pi / 2.0 * y);
}
inline double simple_hyy(double x, double y) {
  return -4.0 * (1.0 - 3.0 * y * y) + (x - 0.5) * std::numbers::pi * std::numbers::pi / 4.0 *
                                          std::sin(std::numbers::pi / 2.0 * y);
}

inline double robust_h(double x, double y) { return (x - y) * (x - y) + std::sin(5.0 * y); }
inline double robust_hy(double x, double y) { return -2.0 * (x - y) + 5.0 * std::cos(5.0 * y); }
inline double robust_hyy(double /*x*/, double y) { return 2.0 - 25.0 * std::sin(5.0 * y); }

/// Local minimizers of h(x, .) on [lo, hi] counted as sign changes of hy
/// from negative to positive on a uniform grid.
inline int grid_minimizer_count(const std::function<double(double)> &hy, double lo, double hi,
                                double step) {
  int count = 0;
  double prev = hy(lo);
  const auto n = static_cast<long>(std::llround((hi - lo) / step));
  for (long i = 1; i <= n; ++i) {
    const double g = hy(lo + static_cast<double>(i) * step);
    if (prev < 0.0 && g >= 0.0) {
      ++count;
    }
    prev = g;
  }
  return count;
}

/// Newton polish of a scalar minimizer from a guess.
inline double newton_1d(const std::function<double(double)> &g,
                        const std::function<double(double)> &gp, double y) {
  for (int it = 0; it < 60; ++it) {
    const double dy = g(y) / gp(y);
    y -= dy;
    if (std::abs(dy) < 1e-15 * (1.0 + std::abs(y))) {
      break;
    }
  }
  return y;
}

/// Classic RK4 for the scalar ODE xdot = rhs(x) over [0, T] with n steps.
inline double rk4(const std::function<double(double)> &rhs, double x, double T, int n) {
  const double h = T / n;
  for (int i = 0; i < n; ++i) {
    const double k1 = rhs(x);
    const double k2 = rhs(x + 0.5 * h * k1);
    const double k3 = rhs(x + 0.5 * h * k2);
    const double k4 = rhs(x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

/// Least-squares slope of log(e) on log(h).
inline double loglog_slope(const std::vector<double> &h, const std::vector<double> &e) {
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    mx += std::log(h[i]);
    my += std::log(e[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    sxy += (std::log(h[i]) - mx) * (std::log(e[i]) - my);
    sxx += (std::log(h[i]) - mx) * (std::log(h[i]) - mx);
  }
  return sxy / sxx;
}

/// x(1) of the simple problem: exp(-3t) until x = 1/2, then exp(-t).
inline double simple_exact_at_1() { return std::exp(-1.0) * std::pow(2.0, -2.0 / 3.0); }
inline double simple_event_time() { return std::log(2.0) / 3.0; }

} // namespace daeo::testing

#endif
