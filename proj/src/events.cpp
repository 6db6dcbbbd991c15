#include "daeo/events.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "fmt/format.h"

#include "daeo/errors.hpp"

namespace daeo {

namespace {

constexpr int kMaxRootIterations = 200;
constexpr int kMaxEventsPerStep = 16;

struct Located {
  double tau;
  SolverState state;
  double residual;
  std::size_t to_index;
};

double pair_value(const ProblemSpec &spec, const SolverState &s, std::size_t i,
                  std::size_t j) {
  return event_function(spec.h, s.x, s.optimizers.records[i].point,
                        s.optimizers.records[j].point);
}

/// Root of H(from, to) along partial steps prev -> prev.t + s, s in (0, dt].
Located locate(const SolverState &prev, double dt, std::size_t from, std::size_t to,
               const SolverConfig &cfg, const ProblemSpec &spec, StepStats *stats) {
  auto partial = [&](double s) { return step(prev, s, cfg, spec, stats); };

  double a = 0.0;
  double ga = pair_value(spec, prev, from, to);
  double b = dt;
  SolverState sb = partial(b);
  double gb = pair_value(spec, sb, from, to);
  if (!(ga <= 0.0 && gb > 0.0)) {
    throw EventInconsistency(fmt::format(
        "event function has no sign change on [{:.17g}, {:.17g}] (H = {:.3e} -> {:.3e}); "
        "check min_event_size",
        prev.t, prev.t + dt, ga, gb));
  }
  if (ga == 0.0) {
    return Located{prev.t, prev, 0.0, to};
  }

  SolverState sa = prev;
  double last_width = b - a;
  bool force_bisection = false;
  for (int it = 0; it < kMaxRootIterations; ++it) {
    double c = a - ga * (b - a) / (gb - ga);
    if (force_bisection || !(c > a && c < b)) {
      c = 0.5 * (a + b);
    }
    SolverState sc = partial(c);
    const double gc = pair_value(spec, sc, from, to);
    if (std::abs(gc) <= cfg.event_tol) {
      return Located{prev.t + c, std::move(sc), gc, to};
    }
    if (gc < 0.0) {
      a = c;
      ga = gc;
      sa = std::move(sc);
    } else {
      b = c;
      gb = gc;
      sb = std::move(sc);
    }
    const double w = b - a;
    if (w <= cfg.event_tol) {
      if (std::abs(ga) <= std::abs(gb)) {
        return Located{prev.t + a, std::move(sa), ga, to};
      }
      return Located{prev.t + b, std::move(sb), gb, to};
    }
    // Secant steps that keep one end fixed shrink the bracket slowly.
    force_bisection = w > 0.5 * last_width;
    last_width = w;
  }
  throw EventLocationFailure(fmt::format("event location stagnated in [{:.17g}, {:.17g}]",
                                         prev.t + a, prev.t + b));
}

void correct(const SolverState &prev, const SolverState &next, const SolverConfig &cfg,
             const ProblemSpec &spec, StepStats *stats, EventCorrection &out, int depth) {
  const std::size_t from = prev.optimizers.star_index;
  const std::size_t from_id = prev.star_id();
  if (from_id == next.star_id()) {
    out.states.push_back(next);
    return;
  }
  if (next.optimizers.find(from_id) == next.optimizers.size() ||
      prev.optimizers.find(next.star_id()) == prev.optimizers.size()) {
    out.uncorrectable_switch = true;
    out.states.push_back(next);
    return;
  }
  if (depth >= kMaxEventsPerStep) {
    throw EventLocationFailure(
        fmt::format("more than {} events inside the step ending at t = {:.17g}",
                    kMaxEventsPerStep, next.t));
  }

  const double dt = next.t - prev.t;
  const std::size_t from_next = next.optimizers.find(from_id);
  std::optional<Located> earliest;
  for (std::size_t k = 0; k < prev.optimizers.size(); ++k) {
    if (k == from) {
      continue;
    }
    const std::size_t k_next = next.optimizers.find(prev.optimizers.records[k].id);
    if (k_next == next.optimizers.size()) {
      continue;
    }
    const double h_before = pair_value(spec, prev, from, k);
    const double h_after = pair_value(spec, next, from_next, k_next);
    // Grazing contact or no overtaking: not an event for this pair.
    if (!(h_after > 0.0) || std::abs(h_after - h_before) < cfg.min_event_size) {
      continue;
    }
    Located loc = locate(prev, dt, from, k, cfg, spec, stats);
    if (!earliest || loc.tau < earliest->tau) {
      earliest = std::move(loc);
    }
  }
  if (!earliest) {
    out.states.push_back(next);
    return;
  }

  SolverState at_tau = std::move(earliest->state);
  at_tau.t = earliest->tau;
  at_tau.optimizers.star_index = earliest->to_index;
  out.events.push_back(EventRecord{earliest->tau, from, earliest->to_index, from_id,
                                   at_tau.optimizers.records[earliest->to_index].id, at_tau.x,
                                   earliest->residual});

  const double remaining = next.t - at_tau.t;
  if (!(remaining > 1e-14 * std::max(1.0, std::abs(next.t)))) {
    at_tau.t = next.t;
    out.states.push_back(std::move(at_tau));
    return;
  }
  out.states.push_back(at_tau);
  SolverState rest = step(at_tau, remaining, cfg, spec, stats);
  rest.t = next.t;
  correct(at_tau, rest, cfg, spec, stats, out, depth + 1);
}

} // namespace

double event_function(const Objective &h, const Eigen::VectorXd &x, const Eigen::VectorXd &y1,
                      const Eigen::VectorXd &y2) {
  const std::vector<double> xv = to_vector(x);
  return h(xv, to_vector(y1)) - h(xv, to_vector(y2));
}

EventCorrection detect_and_correct(const SolverState &prev, const SolverState &next,
                                   const SolverConfig &cfg, const ProblemSpec &spec,
                                   StepStats *stats) {
  EventCorrection out;
  correct(prev, next, cfg, spec, stats, out, 0);
  return out;
}

} // namespace daeo
