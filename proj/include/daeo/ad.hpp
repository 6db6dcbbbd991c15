/**
 * @file ad.hpp
 * @brief Forward-mode algorithmic differentiation over any arithmetic carrier.
 *
 * @c Tangent<S> carries a value and one derivative slot per active direction.
 * The carrier @c S may be @c double, @c Interval, or another @c Tangent; second
 * derivatives are obtained by nesting (tangent-over-tangent). Over intervals
 * the derivative slots enclose the range of the true derivative over the
 * input box, because every propagation rule is itself an interval operation.
 *
 * A passive constant has zero derivative slots. Operations between operands
 * with different slot counts treat the missing slots as zero.
 */
#ifndef DAEO_AD_HPP
#define DAEO_AD_HPP

#include <algorithm>
#include <cstddef>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "daeo/interval.hpp"

namespace daeo {

template <typename S> class Tangent {
public:
  using scalar_type = S;

  Tangent() : m_value(0.0) {}
  Tangent(double c) : m_value(c) {}
  Tangent(S v)
    requires(!std::is_same_v<S, double>)
      : m_value(std::move(v)) {}
  Tangent(S v, std::vector<S> d) : m_value(std::move(v)), m_deriv(std::move(d)) {}

  /**
   * @brief Independent variable with value @c v, active in direction @c dir
   * out of @c n_dirs.
   */
  static Tangent seed(S v, std::size_t n_dirs, std::size_t dir) {
    std::vector<S> d(n_dirs, S(0.0));
    d[dir] = S(1.0);
    return Tangent(std::move(v), std::move(d));
  }

  const S &value() const { return m_value; }
  const std::vector<S> &deriv() const { return m_deriv; }
  std::size_t n_dirs() const { return m_deriv.size(); }
  /// Derivative in direction i; zero for directions this value never saw.
  S deriv(std::size_t i) const { return i < m_deriv.size() ? m_deriv[i] : S(0.0); }

  Tangent &operator+=(const Tangent &rhs) { return *this = *this + rhs; }
  Tangent &operator-=(const Tangent &rhs) { return *this = *this - rhs; }
  Tangent &operator*=(const Tangent &rhs) { return *this = *this * rhs; }
  Tangent &operator/=(const Tangent &rhs) { return *this = *this / rhs; }

private:
  S m_value;
  std::vector<S> m_deriv;
};

template <typename T> struct is_tangent : std::false_type {};
template <typename S> struct is_tangent<Tangent<S>> : std::true_type {};

namespace detail {

// sa * da + sb * db slot by slot, skipping absent slots.
template <typename S>
std::vector<S> linear_combination(const S &sa, const std::vector<S> &da,
                                  const S &sb, const std::vector<S> &db) {
  const std::size_t n = std::max(da.size(), db.size());
  std::vector<S> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < da.size() && i < db.size()) {
      out.push_back(sa * da[i] + sb * db[i]);
    } else if (i < da.size()) {
      out.push_back(sa * da[i]);
    } else {
      out.push_back(sb * db[i]);
    }
  }
  return out;
}

template <typename S>
std::vector<S> scaled(const S &s, const std::vector<S> &d) {
  std::vector<S> out;
  out.reserve(d.size());
  for (const auto &di : d) {
    out.push_back(s * di);
  }
  return out;
}

} // namespace detail

template <typename S>
Tangent<S> operator+(const Tangent<S> &a, const Tangent<S> &b) {
  return Tangent<S>(a.value() + b.value(),
                    detail::linear_combination(S(1.0), a.deriv(), S(1.0), b.deriv()));
}

template <typename S>
Tangent<S> operator-(const Tangent<S> &a, const Tangent<S> &b) {
  return Tangent<S>(a.value() - b.value(),
                    detail::linear_combination(S(1.0), a.deriv(), S(-1.0), b.deriv()));
}

template <typename S> Tangent<S> operator-(const Tangent<S> &a) {
  return Tangent<S>(-a.value(), detail::scaled(S(-1.0), a.deriv()));
}

template <typename S> Tangent<S> operator+(const Tangent<S> &a) { return a; }

template <typename S>
Tangent<S> operator*(const Tangent<S> &a, const Tangent<S> &b) {
  return Tangent<S>(a.value() * b.value(),
                    detail::linear_combination(b.value(), a.deriv(), a.value(), b.deriv()));
}

template <typename S>
Tangent<S> operator/(const Tangent<S> &a, const Tangent<S> &b) {
  S q = a.value() / b.value();
  S inv = S(1.0) / b.value();
  return Tangent<S>(q, detail::linear_combination(inv, a.deriv(), -(q * inv), b.deriv()));
}

// Mixed operations with passive constants.
template <typename S> Tangent<S> operator+(const Tangent<S> &a, double c) {
  return Tangent<S>(a.value() + c, a.deriv());
}
template <typename S> Tangent<S> operator+(double c, const Tangent<S> &a) {
  return a + c;
}
template <typename S> Tangent<S> operator-(const Tangent<S> &a, double c) {
  return Tangent<S>(a.value() - c, a.deriv());
}
template <typename S> Tangent<S> operator-(double c, const Tangent<S> &a) {
  return Tangent<S>(c - a.value(), detail::scaled(S(-1.0), a.deriv()));
}
template <typename S> Tangent<S> operator*(const Tangent<S> &a, double c) {
  return Tangent<S>(a.value() * c, detail::scaled(S(c), a.deriv()));
}
template <typename S> Tangent<S> operator*(double c, const Tangent<S> &a) {
  return a * c;
}
template <typename S> Tangent<S> operator/(const Tangent<S> &a, double c) {
  return Tangent<S>(a.value() / c, detail::scaled(S(1.0) / S(c), a.deriv()));
}
template <typename S> Tangent<S> operator/(double c, const Tangent<S> &a) {
  return Tangent<S>(c) / a;
}

template <typename S> Tangent<S> sin(const Tangent<S> &a) {
  return Tangent<S>(sin(a.value()), detail::scaled(cos(a.value()), a.deriv()));
}

template <typename S> Tangent<S> cos(const Tangent<S> &a) {
  return Tangent<S>(cos(a.value()), detail::scaled(-sin(a.value()), a.deriv()));
}

template <typename S> Tangent<S> exp(const Tangent<S> &a) {
  S e = exp(a.value());
  return Tangent<S>(e, detail::scaled(e, a.deriv()));
}

template <typename S> Tangent<S> log(const Tangent<S> &a) {
  return Tangent<S>(log(a.value()), detail::scaled(S(1.0) / a.value(), a.deriv()));
}

template <typename S> Tangent<S> sqrt(const Tangent<S> &a) {
  S r = sqrt(a.value());
  return Tangent<S>(r, detail::scaled(S(1.0) / (2.0 * r), a.deriv()));
}

template <typename S> Tangent<S> pow_int(const Tangent<S> &a, int n) {
  if (n == 0) {
    return Tangent<S>(S(1.0));
  }
  S slope = static_cast<double>(n) * pow_int(a.value(), n - 1);
  return Tangent<S>(pow_int(a.value(), n), detail::scaled(slope, a.deriv()));
}

/// Row-major dense matrix over an arbitrary carrier.
template <typename S> class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : m_rows(rows), m_cols(cols), m_data(rows * cols, S(0.0)) {}

  std::size_t rows() const { return m_rows; }
  std::size_t cols() const { return m_cols; }
  S &operator()(std::size_t i, std::size_t j) { return m_data[i * m_cols + j]; }
  const S &operator()(std::size_t i, std::size_t j) const {
    return m_data[i * m_cols + j];
  }

private:
  std::size_t m_rows = 0;
  std::size_t m_cols = 0;
  std::vector<S> m_data;
};

/**
 * @brief Value, gradient and Hessian of a scalar function at one point
 * (or over one box, when @c S is @c Interval).
 * @details @c hess is exactly symmetric: only the upper triangle is
 * propagated and the lower triangle is a copy.
 */
template <typename S> struct SecondOrder {
  S value;
  std::vector<S> grad;
  DenseMatrix<S> hess;
};

/// Objective derivatives split into the blocks the solver consumes.
template <typename S> struct ObjectiveDerivatives {
  S value;
  std::vector<S> grad_y;
  DenseMatrix<S> hess_yy;
  /// hess_xy(i, j) = d^2 h / (dy_i dx_j), shape n_y x n_x.
  DenseMatrix<S> hess_xy;
};

/// Value and Jacobian of a vector function with respect to [x; y].
template <typename S> struct JacobianResult {
  std::vector<S> value;
  DenseMatrix<S> jac;
};

/// Lift a vector of carrier values into passive Tangents.
template <typename T, typename S> std::vector<T> passive(std::span<const S> v) {
  std::vector<T> out;
  out.reserve(v.size());
  for (const auto &vi : v) {
    out.emplace_back(T(vi));
  }
  return out;
}

/// Seed v as directions [first, first + v.size()) out of n_dirs.
template <typename S>
std::vector<Tangent<S>> seeded(std::span<const S> v, std::size_t n_dirs,
                               std::size_t first) {
  std::vector<Tangent<S>> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(Tangent<S>::seed(v[i], n_dirs, first + i));
  }
  return out;
}

/// Seed v for second-order propagation: both nesting levels active in the
/// same directions.
template <typename S>
std::vector<Tangent<Tangent<S>>> seeded2(std::span<const S> v, std::size_t n_dirs,
                                         std::size_t first) {
  std::vector<Tangent<Tangent<S>>> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::vector<Tangent<S>> outer(n_dirs, Tangent<S>(S(0.0)));
    outer[first + i] = Tangent<S>(S(1.0));
    out.emplace_back(Tangent<S>::seed(v[i], n_dirs, first + i), std::move(outer));
  }
  return out;
}

/// Passive lift for second-order propagation.
template <typename S>
std::vector<Tangent<Tangent<S>>> passive2(std::span<const S> v) {
  std::vector<Tangent<Tangent<S>>> out;
  out.reserve(v.size());
  for (const auto &vi : v) {
    out.emplace_back(Tangent<S>(vi));
  }
  return out;
}

namespace detail {

template <typename S>
SecondOrder<S> unpack_second_order(const Tangent<Tangent<S>> &r, std::size_t n) {
  SecondOrder<S> out{r.value().value(), std::vector<S>(n, S(0.0)), DenseMatrix<S>(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    out.grad[i] = r.value().deriv(i);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const Tangent<S> col = r.deriv(j);
    for (std::size_t i = 0; i <= j; ++i) {
      out.hess(i, j) = col.deriv(i);
      out.hess(j, i) = out.hess(i, j);
    }
  }
  return out;
}

} // namespace detail

/**
 * @brief Gradient of func with respect to y; x is passive.
 * @param func callable as func(span<const Tangent<S>> x, span<const Tangent<S>> y).
 */
template <typename S, typename F>
std::vector<S> gradient(const F &func, std::span<const S> x, std::span<const S> y) {
  using T = Tangent<S>;
  const std::vector<T> tx = passive<T>(x);
  const std::vector<T> ty = seeded(y, y.size(), 0);
  const T r = func(std::span<const T>(tx), std::span<const T>(ty));
  std::vector<S> g(y.size(), S(0.0));
  for (std::size_t i = 0; i < y.size(); ++i) {
    g[i] = r.deriv(i);
  }
  return g;
}

/**
 * @brief Value, y-gradient and y-Hessian of func; x is passive.
 * @param func callable with spans of Tangent<Tangent<S>>.
 */
template <typename S, typename F>
SecondOrder<S> hessian(const F &func, std::span<const S> x, std::span<const S> y) {
  using T = Tangent<Tangent<S>>;
  const std::vector<T> tx = passive2(x);
  const std::vector<T> ty = seeded2(y, y.size(), 0);
  return detail::unpack_second_order(func(std::span<const T>(tx), std::span<const T>(ty)),
                                     y.size());
}

/**
 * @brief Second-order derivatives with both x and y active; returns the
 * blocks @c ∂_y, @c ∂²_yy and @c ∂²_xy.
 */
template <typename S, typename F>
ObjectiveDerivatives<S> objective_derivatives(const F &func, std::span<const S> x,
                                              std::span<const S> y) {
  using T = Tangent<Tangent<S>>;
  const std::size_t nx = x.size();
  const std::size_t ny = y.size();
  const std::vector<T> tx = seeded2(x, nx + ny, 0);
  const std::vector<T> ty = seeded2(y, nx + ny, nx);
  const SecondOrder<S> full = detail::unpack_second_order(
      func(std::span<const T>(tx), std::span<const T>(ty)), nx + ny);
  ObjectiveDerivatives<S> out{full.value, std::vector<S>(ny, S(0.0)),
                              DenseMatrix<S>(ny, ny), DenseMatrix<S>(ny, nx)};
  for (std::size_t i = 0; i < ny; ++i) {
    out.grad_y[i] = full.grad[nx + i];
    for (std::size_t j = 0; j < ny; ++j) {
      out.hess_yy(i, j) = full.hess(nx + i, nx + j);
    }
    for (std::size_t j = 0; j < nx; ++j) {
      out.hess_xy(i, j) = full.hess(nx + i, j);
    }
  }
  return out;
}

/**
 * @brief Jacobian of a vector function with respect to [x; y].
 * @param func callable with spans of Tangent<S>, returning std::vector<Tangent<S>>.
 */
template <typename S, typename F>
JacobianResult<S> jacobian(const F &func, std::span<const S> x, std::span<const S> y) {
  using T = Tangent<S>;
  const std::size_t n = x.size() + y.size();
  const std::vector<T> tx = seeded(x, n, 0);
  const std::vector<T> ty = seeded(y, n, x.size());
  const std::vector<T> r = func(std::span<const T>(tx), std::span<const T>(ty));
  JacobianResult<S> out{std::vector<S>(r.size(), S(0.0)), DenseMatrix<S>(r.size(), n)};
  for (std::size_t i = 0; i < r.size(); ++i) {
    out.value[i] = r[i].value();
    for (std::size_t j = 0; j < n; ++j) {
      out.jac(i, j) = r[i].deriv(j);
    }
  }
  return out;
}

} // namespace daeo

#endif
