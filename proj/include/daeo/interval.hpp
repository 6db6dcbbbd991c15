/**
 * @file interval.hpp
 * @brief Closed real intervals with outward-rounded endpoints.
 *
 * Every operation returns an interval containing all pointwise results over
 * its arguments. Endpoints are computed in round-to-nearest and then widened
 * by one ulp, unless an error-free transformation proves the endpoint exact.
 * Transcendental functions are widened by two ulps unconditionally.
 */
#ifndef DAEO_INTERVAL_HPP
#define DAEO_INTERVAL_HPP

#include <optional>
#include <ostream>
#include <string>
#include <utility>

namespace daeo {

class Interval {
public:
  constexpr Interval() = default;
  /// Degenerate interval [v, v]. Implicit so that constants mix freely with
  /// intervals inside user functions.
  constexpr Interval(double v) : m_lo(v), m_hi(v) {}
  /// @throws DomainError if lo > hi or either endpoint is not finite.
  Interval(double lo, double hi);

  constexpr double lo() const { return m_lo; }
  constexpr double hi() const { return m_hi; }

  Interval &operator+=(const Interval &rhs);
  Interval &operator-=(const Interval &rhs);
  Interval &operator*=(const Interval &rhs);
  Interval &operator/=(const Interval &rhs);

private:
  double m_lo = 0.0;
  double m_hi = 0.0;
};

Interval operator+(const Interval &a, const Interval &b);
Interval operator-(const Interval &a, const Interval &b);
Interval operator*(const Interval &a, const Interval &b);
/// @throws DomainError if 0 is in b.
Interval operator/(const Interval &a, const Interval &b);
Interval operator-(const Interval &a);
inline Interval operator+(const Interval &a) { return a; }

Interval sin(const Interval &a);
Interval cos(const Interval &a);
Interval exp(const Interval &a);
/// @throws DomainError unless a.lo() > 0.
Interval log(const Interval &a);
/// @throws DomainError unless a.lo() >= 0.
Interval sqrt(const Interval &a);
/// Integer power, n >= 0. Even powers of zero-containing intervals have
/// lower bound exactly 0.
Interval pow_int(const Interval &a, int n);

/// hi - lo, rounded up.
double width(const Interval &a);
/// A representable point inside a.
double midpoint(const Interval &a);
bool contains(const Interval &a, double v);
/// True if b is a subset of a.
bool contains(const Interval &a, const Interval &b);
/// Empty result when the intervals are disjoint.
std::optional<Interval> intersect(const Interval &a, const Interval &b);
bool intersects(const Interval &a, const Interval &b);
Interval hull(const Interval &a, const Interval &b);
/// Split at the midpoint.
/// @throws DegenerateIntervalError if width(a) == 0.
std::pair<Interval, Interval> bisect(const Interval &a);

/// Exact endpoint comparison.
inline bool operator==(const Interval &a, const Interval &b) {
  return a.lo() == b.lo() && a.hi() == b.hi();
}

/// "[lo, hi]" with 17 significant digits.
std::string to_string(const Interval &a);
std::ostream &operator<<(std::ostream &os, const Interval &a);

// Real overloads so that generic user code can call these unqualified for
// every carrier type.
double sin(double v);
double cos(double v);
double exp(double v);
double log(double v);
double sqrt(double v);
double pow_int(double v, int n);

} // namespace daeo

#endif
