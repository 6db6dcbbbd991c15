#include "daeo/interval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fmt/format.h"

#include "daeo/errors.hpp"

namespace daeo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Below this magnitude the fma residual of a product or quotient may itself
// be inexact, so directed rounding falls back to unconditional widening.
constexpr double kResidualFloor = 0x1p-960;

double next_down(double v) { return std::nextafter(v, -kInf); }
double next_up(double v) { return std::nextafter(v, kInf); }

double checked(double v) {
  if (!std::isfinite(v)) {
    throw DomainError("interval endpoint overflow");
  }
  return v;
}

// Directed rounding from a round-to-nearest result plus its exact error term.
// err is (true result - rounded result) up to a positive factor.
double round_down(double rounded, double err) {
  return err < 0 ? next_down(rounded) : rounded;
}
double round_up(double rounded, double err) {
  return err > 0 ? next_up(rounded) : rounded;
}

// Knuth's TwoSum error term: a + b == s + err exactly.
double sum_error(double a, double b, double s) {
  double bb = s - a;
  return (a - (s - bb)) + (b - bb);
}

double add_down(double a, double b) {
  double s = checked(a + b);
  return round_down(s, sum_error(a, b, s));
}
double add_up(double a, double b) {
  double s = checked(a + b);
  return round_up(s, sum_error(a, b, s));
}

double mul_down(double a, double b) {
  double p = checked(a * b);
  if (a == 0.0 || b == 0.0) {
    return p;
  }
  if (std::abs(p) < kResidualFloor) {
    return next_down(p);
  }
  return round_down(p, std::fma(a, b, -p));
}
double mul_up(double a, double b) {
  double p = checked(a * b);
  if (a == 0.0 || b == 0.0) {
    return p;
  }
  if (std::abs(p) < kResidualFloor) {
    return next_up(p);
  }
  return round_up(p, std::fma(a, b, -p));
}

// a/b - q == r/b with r = a - q*b computed exactly by fma.
double div_down(double a, double b) {
  double q = checked(a / b);
  if (a == 0.0) {
    return q;
  }
  if (std::abs(q) < kResidualFloor) {
    return next_down(q);
  }
  double r = std::fma(-q, b, a);
  return round_down(q, b > 0 ? r : -r);
}
double div_up(double a, double b) {
  double q = checked(a / b);
  if (a == 0.0) {
    return q;
  }
  if (std::abs(q) < kResidualFloor) {
    return next_up(q);
  }
  double r = std::fma(-q, b, a);
  return round_up(q, b > 0 ? r : -r);
}

// libm transcendental functions are not correctly rounded; two ulps covers
// every mainstream implementation.
Interval widen2(double lo, double hi) {
  return Interval(next_down(next_down(checked(lo))),
                  next_up(next_up(checked(hi))));
}

// True if offset + 2k*pi lies in [lo, hi] (slightly widened) for some k.
bool has_critical_point(double lo, double hi, double offset) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
  double slack = 8.0 * std::numeric_limits<double>::epsilon() * scale;
  double k0 = std::floor((lo - offset) / two_pi);
  for (double k = k0 - 1.0; k <= k0 + 2.0; k += 1.0) {
    double p = offset + two_pi * k;
    if (p >= lo - slack && p <= hi + slack) {
      return true;
    }
  }
  return false;
}

Interval trig_envelope(double lo, double hi, double v_lo, double v_hi,
                       double max_offset, double min_offset) {
  if (hi - lo >= 2.0 * std::numbers::pi) {
    return Interval(-1.0, 1.0);
  }
  Interval r = widen2(std::min(v_lo, v_hi), std::max(v_lo, v_hi));
  double out_lo = r.lo();
  double out_hi = r.hi();
  if (has_critical_point(lo, hi, max_offset)) {
    out_hi = 1.0;
  }
  if (has_critical_point(lo, hi, min_offset)) {
    out_lo = -1.0;
  }
  return Interval(std::max(out_lo, -1.0), std::min(out_hi, 1.0));
}

// Bounds on v^n for v >= 0 by repeated directed multiplication.
std::pair<double, double> power_bounds(double v, int n) {
  double lo = 1.0;
  double hi = 1.0;
  for (int i = 0; i < n; ++i) {
    lo = mul_down(lo, v);
    hi = mul_up(hi, v);
  }
  return {lo, hi};
}

} // namespace

Interval::Interval(double lo, double hi) : m_lo(lo), m_hi(hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw DomainError("interval endpoints must be finite");
  }
  if (lo > hi) {
    throw DomainError(fmt::format("invalid interval [{}, {}]", lo, hi));
  }
}

Interval &Interval::operator+=(const Interval &rhs) {
  return *this = *this + rhs;
}
Interval &Interval::operator-=(const Interval &rhs) {
  return *this = *this - rhs;
}
Interval &Interval::operator*=(const Interval &rhs) {
  return *this = *this * rhs;
}
Interval &Interval::operator/=(const Interval &rhs) {
  return *this = *this / rhs;
}

Interval operator+(const Interval &a, const Interval &b) {
  return Interval(add_down(a.lo(), b.lo()), add_up(a.hi(), b.hi()));
}

Interval operator-(const Interval &a, const Interval &b) {
  return Interval(add_down(a.lo(), -b.hi()), add_up(a.hi(), -b.lo()));
}

Interval operator-(const Interval &a) { return Interval(-a.hi(), -a.lo()); }

Interval operator*(const Interval &a, const Interval &b) {
  const double lo = std::min({mul_down(a.lo(), b.lo()), mul_down(a.lo(), b.hi()),
                              mul_down(a.hi(), b.lo()), mul_down(a.hi(), b.hi())});
  const double hi = std::max({mul_up(a.lo(), b.lo()), mul_up(a.lo(), b.hi()),
                              mul_up(a.hi(), b.lo()), mul_up(a.hi(), b.hi())});
  return Interval(lo, hi);
}

Interval operator/(const Interval &a, const Interval &b) {
  if (contains(b, 0.0)) {
    throw DomainError(
        fmt::format("division by zero-containing interval {}", to_string(b)));
  }
  const double lo = std::min({div_down(a.lo(), b.lo()), div_down(a.lo(), b.hi()),
                              div_down(a.hi(), b.lo()), div_down(a.hi(), b.hi())});
  const double hi = std::max({div_up(a.lo(), b.lo()), div_up(a.lo(), b.hi()),
                              div_up(a.hi(), b.lo()), div_up(a.hi(), b.hi())});
  return Interval(lo, hi);
}

Interval sin(const Interval &a) {
  constexpr double half_pi = std::numbers::pi / 2.0;
  return trig_envelope(a.lo(), a.hi(), std::sin(a.lo()), std::sin(a.hi()),
                       half_pi, -half_pi);
}

Interval cos(const Interval &a) {
  return trig_envelope(a.lo(), a.hi(), std::cos(a.lo()), std::cos(a.hi()), 0.0,
                       std::numbers::pi);
}

Interval exp(const Interval &a) {
  Interval r = widen2(std::exp(a.lo()), std::exp(a.hi()));
  return Interval(std::max(r.lo(), 0.0), r.hi());
}

Interval log(const Interval &a) {
  if (!(a.lo() > 0.0)) {
    throw DomainError(fmt::format("log of non-positive interval {}", to_string(a)));
  }
  return widen2(std::log(a.lo()), std::log(a.hi()));
}

Interval sqrt(const Interval &a) {
  if (a.lo() < 0.0) {
    throw DomainError(fmt::format("sqrt of negative interval {}", to_string(a)));
  }
  // IEEE sqrt is correctly rounded, one ulp suffices.
  return Interval(std::max(next_down(std::sqrt(a.lo())), 0.0),
                  next_up(std::sqrt(a.hi())));
}

Interval pow_int(const Interval &a, int n) {
  if (n < 0) {
    throw DomainError("pow_int requires a non-negative exponent");
  }
  if (n == 0) {
    return Interval(1.0);
  }
  if (n == 1) {
    return a;
  }
  const auto [lo_abs_lo, lo_abs_hi] = power_bounds(std::abs(a.lo()), n);
  const auto [hi_abs_lo, hi_abs_hi] = power_bounds(std::abs(a.hi()), n);
  if (n % 2 == 1) {
    const double lo = a.lo() < 0 ? -lo_abs_hi : lo_abs_lo;
    const double hi = a.hi() < 0 ? -hi_abs_lo : hi_abs_hi;
    return Interval(checked(lo), checked(hi));
  }
  if (contains(a, 0.0)) {
    return Interval(0.0, checked(std::max(lo_abs_hi, hi_abs_hi)));
  }
  if (a.lo() > 0.0) {
    return Interval(lo_abs_lo, checked(hi_abs_hi));
  }
  return Interval(hi_abs_lo, checked(lo_abs_hi));
}

double width(const Interval &a) { return add_up(a.hi(), -a.lo()); }

double midpoint(const Interval &a) {
  const double m = 0.5 * a.lo() + 0.5 * a.hi();
  return std::clamp(m, a.lo(), a.hi());
}

bool contains(const Interval &a, double v) { return a.lo() <= v && v <= a.hi(); }

bool contains(const Interval &a, const Interval &b) {
  return a.lo() <= b.lo() && b.hi() <= a.hi();
}

bool intersects(const Interval &a, const Interval &b) {
  return a.lo() <= b.hi() && b.lo() <= a.hi();
}

std::optional<Interval> intersect(const Interval &a, const Interval &b) {
  if (!intersects(a, b)) {
    return std::nullopt;
  }
  return Interval(std::max(a.lo(), b.lo()), std::min(a.hi(), b.hi()));
}

Interval hull(const Interval &a, const Interval &b) {
  return Interval(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

std::pair<Interval, Interval> bisect(const Interval &a) {
  if (!(a.hi() > a.lo())) {
    throw DegenerateIntervalError(
        fmt::format("cannot bisect degenerate interval {}", to_string(a)));
  }
  const double m = midpoint(a);
  return {Interval(a.lo(), m), Interval(m, a.hi())};
}

std::string to_string(const Interval &a) {
  return fmt::format("[{:.17g}, {:.17g}]", a.lo(), a.hi());
}

std::ostream &operator<<(std::ostream &os, const Interval &a) {
  return os << to_string(a);
}

double sin(double v) { return std::sin(v); }
double cos(double v) { return std::cos(v); }
double exp(double v) { return std::exp(v); }
double log(double v) { return std::log(v); }
double sqrt(double v) { return std::sqrt(v); }

double pow_int(double v, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) {
    r *= v;
  }
  return r;
}

} // namespace daeo
