/**
 * @file errors.hpp
 * @brief Exception hierarchy shared by every part of the solver.
 */
#ifndef DAEO_ERRORS_HPP
#define DAEO_ERRORS_HPP

#include <optional>
#include <stdexcept>
#include <string>

namespace daeo {

/**
 * @brief Base class of all recoverable solver errors.
 * @details The trajectory driver stamps the simulation time at which the
 * failure happened before re-throwing, so callers can report it.
 */
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;

  void set_time(double t) { m_time = t; }
  std::optional<double> time() const { return m_time; }

private:
  std::optional<double> m_time;
};

/// Interval operation outside its domain (division by zero, log of x <= 0).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Bisection of a zero-width interval.
class DegenerateIntervalError : public Error {
public:
  using Error::Error;
};

class UsageError : public Error {
public:
  using Error::Error;
};

/// Branch-and-bound work list grew past its configured cap.
class ResourceError : public Error {
public:
  ResourceError(const std::string &what, int depth)
      : Error(what), m_depth(depth) {}
  int depth() const { return m_depth; }

private:
  int m_depth;
};

/// Newton iteration of an integration step did not converge.
class StepFailure : public Error {
public:
  StepFailure(const std::string &what, double residual)
      : Error(what), m_residual(residual) {}
  double residual() const { return m_residual; }

private:
  double m_residual;
};

class SingularityError : public Error {
public:
  SingularityError(const std::string &what, double condition)
      : Error(what), m_condition(condition) {}
  /// Estimated condition number (infinite when exactly singular).
  double condition() const { return m_condition; }

private:
  double m_condition;
};

/// The global optimizer changed identity but the event function has no sign
/// change over the step.
class EventInconsistency : public Error {
public:
  using Error::Error;
};

/// Root finder for the event time stagnated.
class EventLocationFailure : public Error {
public:
  using Error::Error;
};

/// Precondition of an internal routine was violated by the caller.
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

} // namespace daeo

#endif
