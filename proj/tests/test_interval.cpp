#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"

#include "daeo/errors.hpp"
#include "daeo/interval.hpp"

using daeo::Interval;

namespace {

double ulps_below(double v, int n) {
  for (int i = 0; i < n; ++i) {
    v = std::nextafter(v, -std::numeric_limits<double>::infinity());
  }
  return v;
}
double ulps_above(double v, int n) {
  for (int i = 0; i < n; ++i) {
    v = std::nextafter(v, std::numeric_limits<double>::infinity());
  }
  return v;
}

struct Sample {
  Interval box;
  double point;
};

// Random interval with endpoints in [lo, hi] and a point inside it.
Sample random_sample(std::mt19937_64 &rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  double a = u(rng);
  double b = u(rng);
  if (a > b) {
    std::swap(a, b);
  }
  if (t(rng) < 0.05) {
    b = a;
  }
  double p = a + t(rng) * (b - a);
  p = std::clamp(p, a, b);
  return {Interval(a, b), p};
}

} // namespace

TEST_CASE("interval arithmetic examples") {
  CHECK(Interval(1, 2) + Interval(3, 4) == Interval(4, 6));
  CHECK(Interval(-1, 2) * Interval(3, 4) == Interval(-4, 8));
  CHECK_THROWS_AS(Interval(1, 2) / Interval(0, 1), daeo::DomainError);
  CHECK(Interval(1, 2) - Interval(3, 4) == Interval(-3, -1));
  CHECK(Interval(1, 2) / Interval(2, 4) == Interval(0.25, 1));
  CHECK(-Interval(1, 2) == Interval(-2, -1));
}

TEST_CASE("construction rejects inverted or non-finite endpoints") {
  CHECK_THROWS_AS(Interval(2, 1), daeo::DomainError);
  CHECK_THROWS_AS(Interval(0, std::numeric_limits<double>::infinity()), daeo::DomainError);
  CHECK_THROWS_AS(Interval(std::nan(""), 1), daeo::DomainError);
}

TEST_CASE("outward rounding of inexact sums") {
  const Interval r = Interval(0.1) + Interval(0.2);
  CHECK(r.lo() < r.hi());
  CHECK(contains(r, 0.1 + 0.2));
  CHECK(r.hi() <= ulps_above(0.1 + 0.2, 1));
  CHECK(r.lo() >= ulps_below(0.1 + 0.2, 1));
}

TEST_CASE("elementary function examples") {
  SUBCASE("sin over [0, pi]") {
    const Interval s = sin(Interval(0.0, std::numbers::pi));
    CHECK(s.lo() <= 0.0);
    CHECK(s.lo() >= -4.0 * std::numeric_limits<double>::denorm_min() - 1e-300);
    CHECK(s.hi() == 1.0);
  }
  SUBCASE("exp of zero") {
    const Interval e = exp(Interval(0.0));
    CHECK(contains(e, 1.0));
    CHECK(e.lo() >= ulps_below(1.0, 2));
    CHECK(e.hi() <= ulps_above(1.0, 2));
  }
  SUBCASE("even power of a zero-containing interval") {
    CHECK(pow_int(Interval(-1, 2), 2) == Interval(0, 4));
    CHECK(pow_int(Interval(-3, -2), 3) == Interval(-27, -8));
    CHECK(pow_int(Interval(-3, 2), 0) == Interval(1));
  }
  SUBCASE("cos envelopes are clamped") {
    const Interval c = cos(Interval(-1.0, 7.0));
    CHECK(c == Interval(-1, 1));
    const Interval c2 = cos(Interval(-0.5, 0.5));
    CHECK(c2.hi() == 1.0);
    CHECK(contains(c2, std::cos(0.5)));
  }
  SUBCASE("domain errors") {
    CHECK_THROWS_AS(log(Interval(-1, 1)), daeo::DomainError);
    CHECK_THROWS_AS(log(Interval(0, 1)), daeo::DomainError);
    CHECK_THROWS_AS(sqrt(Interval(-1, 1)), daeo::DomainError);
  }
}

TEST_CASE("set operations") {
  CHECK(width(Interval(1, 1.5)) == 0.5);
  CHECK(contains(Interval(-1, 1), 0.0));
  CHECK_FALSE(contains(Interval(-1, 1), 1.5));
  CHECK(contains(Interval(-1, 1), Interval(-0.5, 1)));
  CHECK(intersect(Interval(0, 2), Interval(1, 3)) == Interval(1, 2));
  CHECK_FALSE(intersect(Interval(0, 1), Interval(2, 3)).has_value());
  CHECK(intersects(Interval(0, 1), Interval(1, 3)));
  CHECK(hull(Interval(0, 1), Interval(2, 3)) == Interval(0, 3));
  CHECK(midpoint(Interval(1, 3)) == 2.0);
  const double big = std::numeric_limits<double>::max();
  CHECK(contains(Interval(-big, big), midpoint(Interval(-big, big))));
}

TEST_CASE("bisection") {
  auto [l, r] = bisect(Interval(0, 4));
  CHECK(l == Interval(0, 2));
  CHECK(r == Interval(2, 4));
  std::tie(l, r) = bisect(Interval(-1, 1));
  CHECK(l == Interval(-1, 0));
  CHECK(r == Interval(0, 1));
  CHECK_THROWS_AS(bisect(Interval(2, 2)), daeo::DegenerateIntervalError);
}

TEST_CASE("text rendering uses 17 significant digits") {
  CHECK(to_string(Interval(0.1, 2)) == "[0.10000000000000001, 2]");
  std::ostringstream os;
  os << Interval(-1, 1);
  CHECK(os.str() == "[-1, 1]");
}

TEST_CASE("inclusion fuzz over 1e5 random cases per operation") {
  std::mt19937_64 rng(20240611);
  constexpr int kCases = 100000;

  using Binary = std::function<Interval(const Interval &, const Interval &)>;
  using BinaryReal = std::function<double(double, double)>;
  const std::vector<std::tuple<const char *, Binary, BinaryReal>> binary{
      {"add", [](auto &a, auto &b) { return a + b; }, [](double a, double b) { return a + b; }},
      {"sub", [](auto &a, auto &b) { return a - b; }, [](double a, double b) { return a - b; }},
      {"mul", [](auto &a, auto &b) { return a * b; }, [](double a, double b) { return a * b; }},
      {"div", [](auto &a, auto &b) { return a / b; }, [](double a, double b) { return a / b; }},
  };
  for (const auto &[name, op, real] : binary) {
    int violations = 0;
    for (int i = 0; i < kCases; ++i) {
      const Sample a = random_sample(rng, -10.0, 10.0);
      Sample b = random_sample(rng, -10.0, 10.0);
      if (std::string(name) == "div") {
        b = random_sample(rng, 0.01, 10.0);
        if (i % 2 == 1) {
          b = {-b.box, -b.point};
        }
      }
      violations += contains(op(a.box, b.box), real(a.point, b.point)) ? 0 : 1;
    }
    INFO(name);
    CHECK(violations == 0);
  }

  using Unary = std::function<Interval(const Interval &)>;
  using UnaryReal = std::function<double(double)>;
  const std::vector<std::tuple<const char *, Unary, UnaryReal, double, double>> unary{
      {"sin", [](auto &a) { return sin(a); }, [](double v) { return std::sin(v); }, -50, 50},
      {"cos", [](auto &a) { return cos(a); }, [](double v) { return std::cos(v); }, -50, 50},
      {"exp", [](auto &a) { return exp(a); }, [](double v) { return std::exp(v); }, -30, 30},
      {"log", [](auto &a) { return log(a); }, [](double v) { return std::log(v); }, 1e-6, 1e3},
      {"sqrt", [](auto &a) { return sqrt(a); }, [](double v) { return std::sqrt(v); }, 0, 1e3},
      {"neg", [](auto &a) { return -a; }, [](double v) { return -v; }, -10, 10},
      {"pow2", [](auto &a) { return pow_int(a, 2); }, [](double v) { return v * v; }, -10, 10},
      {"pow3", [](auto &a) { return pow_int(a, 3); }, [](double v) { return std::pow(v, 3); },
       -10, 10},
      {"pow5", [](auto &a) { return pow_int(a, 5); }, [](double v) { return std::pow(v, 5); },
       -10, 10},
  };
  for (const auto &[name, op, real, lo, hi] : unary) {
    int violations = 0;
    for (int i = 0; i < kCases; ++i) {
      const Sample a = random_sample(rng, lo, hi);
      violations += contains(op(a.box), real(a.point)) ? 0 : 1;
    }
    INFO(name);
    CHECK(violations == 0);
  }
}

TEST_CASE("enclosures are monotone under inclusion") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  const std::vector<std::pair<const char *, std::function<Interval(const Interval &)>>> ops{
      {"sin", [](auto &a) { return sin(a); }},       {"cos", [](auto &a) { return cos(a); }},
      {"exp", [](auto &a) { return exp(a); }},       {"log", [](auto &a) { return log(a); }},
      {"sqrt", [](auto &a) { return sqrt(a); }},     {"pow2", [](auto &a) { return pow_int(a, 2); }},
      {"pow3", [](auto &a) { return pow_int(a, 3); }}};
  for (const auto &[name, op] : ops) {
    int violations = 0;
    for (int i = 0; i < 20000; ++i) {
      const bool positive = std::string(name) == "log" || std::string(name) == "sqrt";
      const Sample outer = random_sample(rng, positive ? 1e-3 : -20.0, 20.0);
      const double w = width(outer.box);
      const double a = outer.box.lo() + t(rng) * w;
      const double b = a + t(rng) * (outer.box.hi() - a);
      const Interval inner(a, std::min(b, outer.box.hi()));
      violations += contains(op(outer.box), op(inner)) ? 0 : 1;
    }
    INFO(name);
    CHECK(violations == 0);
  }
}

TEST_CASE("degenerate intervals reproduce the scalar result") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 20.0);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    const double w = u(rng);
    const Interval s = Interval(v) + Interval(w);
    CHECK(s.lo() >= ulps_below(v + w, 1));
    CHECK(s.hi() <= ulps_above(v + w, 1));
    const Interval m = Interval(v) * Interval(w);
    CHECK(m.lo() >= ulps_below(v * w, 1));
    CHECK(m.hi() <= ulps_above(v * w, 1));
    // Transcendental functions are widened by two ulps on each side.
    for (const auto &[r, exact] :
         {std::pair{sin(Interval(v)), std::sin(v)}, std::pair{exp(Interval(v)), std::exp(v)},
          std::pair{log(Interval(v)), std::log(v)}, std::pair{sqrt(Interval(v)), std::sqrt(v)}}) {
      CHECK(contains(r, exact));
      CHECK(r.lo() >= ulps_below(exact, 3));
      CHECK(r.hi() <= ulps_above(exact, 3));
    }
  }
}
