/**
 * @file problem.hpp
 * @brief Problem definitions and solver configuration.
 *
 * A problem is given by the dynamics f(x, y) and the objective h(x, y). Both
 * are registered once as generic callables and instantiated for every
 * carrier the solver needs (reals, intervals, and their first- and
 * second-order tangents), so one definition serves point evaluation, interval
 * bounding and differentiation alike.
 */
#ifndef DAEO_PROBLEM_HPP
#define DAEO_PROBLEM_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "Eigen/Dense"

#include "daeo/ad.hpp"
#include "daeo/interval.hpp"

namespace daeo {

/// Every carrier type a problem function is instantiated for.
using Carriers = std::tuple<double, Interval, Tangent<double>, Tangent<Interval>,
                            Tangent<Tangent<double>>, Tangent<Tangent<Interval>>>;

template <typename T>
using ObjectiveFn = std::function<T(std::span<const T>, std::span<const T>)>;
template <typename T>
using DynamicsFn = std::function<std::vector<T>(std::span<const T>, std::span<const T>)>;

namespace detail {
template <template <typename> class Fn, typename Tuple> struct FnTuple;
template <template <typename> class Fn, typename... Ts>
struct FnTuple<Fn, std::tuple<Ts...>> {
  using type = std::tuple<Fn<Ts>...>;
};
} // namespace detail

/// Type-erased scalar objective h(x, y), callable for every carrier.
class Objective {
public:
  Objective() = default;

  template <typename G> static Objective from_generic(G g) {
    Objective o;
    std::apply([&](auto &...fns) { ((fns = g), ...); }, o.m_fns);
    return o;
  }

  template <typename T> T operator()(std::span<const T> x, std::span<const T> y) const {
    return std::get<ObjectiveFn<T>>(m_fns)(x, y);
  }
  template <typename T>
  T operator()(const std::vector<T> &x, const std::vector<T> &y) const {
    return (*this)(std::span<const T>(x), std::span<const T>(y));
  }

private:
  typename detail::FnTuple<ObjectiveFn, Carriers>::type m_fns;
};

/// Type-erased vector dynamics f(x, y), callable for every carrier.
class Dynamics {
public:
  Dynamics() = default;

  template <typename G> static Dynamics from_generic(G g) {
    Dynamics d;
    std::apply([&](auto &...fns) { ((fns = g), ...); }, d.m_fns);
    return d;
  }

  template <typename T>
  std::vector<T> operator()(std::span<const T> x, std::span<const T> y) const {
    return std::get<DynamicsFn<T>>(m_fns)(x, y);
  }
  template <typename T>
  std::vector<T> operator()(const std::vector<T> &x, const std::vector<T> &y) const {
    return (*this)(std::span<const T>(x), std::span<const T>(y));
  }

private:
  typename detail::FnTuple<DynamicsFn, Carriers>::type m_fns;
};

/// Analytic facts shipped with a problem for verification.
struct ReferenceSolution {
  std::function<double(double)> x_exact;
  std::vector<double> event_times;
};

struct ProblemSpec {
  std::string name;
  std::size_t n_x = 0;
  std::size_t n_y = 0;
  Dynamics f;
  Objective h;
  Eigen::VectorXd x0;
  double t0 = 0.0;
  double t_end = 1.0;
  std::vector<Interval> y_domain;
  std::optional<ReferenceSolution> reference;
  /// Optional bound on |dy^k/dt|, used only to sanity-check tracking drift.
  std::optional<double> drift_bound;
};

/**
 * @brief Build a problem from generic callables.
 * @details @c f and @c h must accept @c (std::span<const T> x,
 * std::span<const T> y) for every carrier @c T; @c f returns
 * @c std::vector<T> of length @c n_x and @c h returns @c T.
 * @throws UsageError if the invariants of ProblemSpec do not hold.
 */
template <typename F, typename H>
ProblemSpec make_problem(std::string name, std::size_t n_x, std::size_t n_y, F f, H h,
                         Eigen::VectorXd x0, double t0, double t_end,
                         std::vector<Interval> y_domain);

/// Throws UsageError if dimensions disagree or f, h fail at (x0, mid(domain)).
void validate(const ProblemSpec &spec);

/// "simple", "robust" or a name added by register_problem.
/// @throws UsageError for any other name.
ProblemSpec builtin_problem(const std::string &name);
/// Make a user problem available by name (replaces an existing entry).
/// Not thread-safe; register before solving.
void register_problem(const std::string &name, std::function<ProblemSpec()> factory);
/// Sorted names of all known problems.
std::vector<std::string> builtin_problem_names();

enum class SolverMode { TrackingWithEvents, TrackingNoEvents, AlwaysGlobalOptimize };

/// "events", "no-events", "always-opt".
std::string to_string(SolverMode mode);
/// @throws UsageError for an unknown name.
SolverMode parse_mode(const std::string &name);

struct SolverConfig {
  double dt = 0.01;
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  /// Width below which boxes are neither split nor narrowed further.
  double opt_width_tol = 1e-8;
  /// Termination threshold of the event root finder.
  double event_tol = 1e-10;
  /// Minimum swing of the event function across a step treated as an event.
  double min_event_size = 1e-4;
  /// Global search every this many steps; 0 searches only at t0.
  int reopt_period = 0;
  SolverMode mode = SolverMode::TrackingWithEvents;
  /// Discard boxes by value, keeping only the global minimizer.
  bool global_only = false;
  std::size_t max_work_list = 1'000'000;
};

/// @throws UsageError if a tolerance is non-positive or dt does not fit the
/// integration window.
void validate(const SolverConfig &cfg, double t0, double t_end);

/**
 * @brief Apply "key = value" lines onto @c base. Blank lines and lines
 * starting with '#' are ignored; keys are SolverConfig field names.
 * @throws UsageError on unknown keys or malformed values.
 */
SolverConfig parse_config(const std::string &text, SolverConfig base = {});
SolverConfig load_config_file(const std::string &path, SolverConfig base = {});

/// Config echoed as key/value pairs, in field order.
std::vector<std::pair<std::string, std::string>> config_entries(const SolverConfig &cfg);

// ---------------------------------------------------------------------------

template <typename F, typename H>
ProblemSpec make_problem(std::string name, std::size_t n_x, std::size_t n_y, F f, H h,
                         Eigen::VectorXd x0, double t0, double t_end,
                         std::vector<Interval> y_domain) {
  ProblemSpec spec;
  spec.name = std::move(name);
  spec.n_x = n_x;
  spec.n_y = n_y;
  spec.f = Dynamics::from_generic(std::move(f));
  spec.h = Objective::from_generic(std::move(h));
  spec.x0 = std::move(x0);
  spec.t0 = t0;
  spec.t_end = t_end;
  spec.y_domain = std::move(y_domain);
  validate(spec);
  return spec;
}

/// Copy an Eigen vector into a std::vector of carrier T.
template <typename T = double> std::vector<T> to_vector(const Eigen::VectorXd &v) {
  return std::vector<T>(v.data(), v.data() + v.size());
}

inline Eigen::VectorXd to_eigen(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace daeo

#endif
