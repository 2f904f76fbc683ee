#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "stokpp/errors.hpp"
#include "stokpp/markers.hpp"

using namespace stokpp;

namespace {

Field ramp(double length, double dx = 0.01) {
  const auto g = GridSpec::window(0.0, 3.0, dx);
  std::vector<double> v(g.n);
  for (std::size_t i = 0; i < g.n; ++i) v[i] = std::max(0.0, 1.0 - g.x(i) / length);
  return Field(g, v);
}

Field sampled(const GridSpec& g, double (*fn)(double)) {
  std::vector<double> v(g.n);
  for (std::size_t i = 0; i < g.n; ++i) v[i] = fn(g.x(i));
  return Field(g, v);
}

// Min-max formula for the decreasing isotonic fit.
std::vector<double> isotonic_oracle(const std::vector<double>& y) {
  const std::size_t n = y.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = INFINITY;
    for (std::size_t s = 0; s <= i; ++s) {
      double hi = -INFINITY;
      for (std::size_t t = i; t < n; ++t) {
        double sum = 0.0;
        for (std::size_t k = s; k <= t; ++k) sum += y[k];
        hi = std::max(hi, sum / static_cast<double>(t - s + 1));
      }
      best = std::min(best, hi);
    }
    out[i] = best;
  }
  return out;
}

}  // namespace

TEST_CASE("a_marker on simple profiles") {
  CHECK(a_marker(ramp(1.0), 0.25).position == doctest::Approx(0.75));
  const auto ic = make_initial_condition(1.0, GridSpec::window(-2.0, 6.0, 0.01));
  CHECK(a_marker(ic, 0.5).position == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(a_marker(ic, 0.25).position == doctest::Approx(std::numbers::ln2).epsilon(1e-4));
  CHECK_FALSE(a_marker(ic, 0.25).regularized);
  CHECK_THROWS_AS(a_marker(ic, 1.0), LevelNotAttainedError);
  CHECK_THROWS_AS(a_marker(ramp(1.0), 0.0), LevelNotAttainedError);
}

TEST_CASE("a_marker regularizes non-monotone profiles") {
  const auto g = GridSpec::window(0.0, 4.0, 1.0);
  const auto hit = a_marker(Field(g, {1.0, 0.4, 0.6, 0.2, 0.0}), 0.5);
  CHECK(hit.regularized);
  CHECK(hit.position == doctest::Approx(0.5 / 0.6));
}

TEST_CASE("isotonic regression matches the min-max formula") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> y(1 + trial % 9);
    for (auto& v : y) v = z(rng);
    const auto fit = isotonic_decreasing(y);
    const auto ref = isotonic_oracle(y);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(fit[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  }
  const std::vector<double> sorted{3, 2, 2, 1};
  CHECK(isotonic_decreasing(sorted) == sorted);
}

TEST_CASE("expectation markers") {
  SUBCASE("mean of identical fields") {
    const auto ic = make_initial_condition(2.0, GridSpec::window(-2.0, 6.0, 0.01));
    const std::vector<Field> same{ic, ic, ic};
    CHECK(expectation_marker(mean_field(same), 0.3) == doctest::Approx(a_marker(ic, 0.3).position).epsilon(1e-14));
  }
  SUBCASE("two ramps") {
    // mean of the ramps on [0,1] and [0,2] is 1 - 3x/4 on [0,1]: level 1/2 at x = 2/3
    const std::vector<Field> pair{ramp(1.0), ramp(2.0)};
    CHECK(expectation_marker(mean_field(pair), 0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  }
  SUBCASE("grids must match") {
    const std::vector<Field> mixed{ramp(1.0), ramp(2.0, 0.02)};
    CHECK_THROWS(mean_field(mixed));
    CHECK_THROWS_AS(mean_field(std::vector<Field>{}), MisuseError);
  }
}

TEST_CASE("speed estimates") {
  MarkerTrack line, flat, bramson;
  for (int k = 0; k <= 100; ++k) {
    const double t = k;
    line.push(t, 2.0 * t);
    flat.push(t, 3.0);
  }
  for (int k = 0; k <= 200; ++k) {
    const double t = 50.0 + 0.5 * k;
    bramson.push(t, std::numbers::sqrt2 * t - 3.0 / (2.0 * std::numbers::sqrt2) * std::log(t));
  }
  const auto s = speed_estimate(line, {0.5, 1.0});
  CHECK(s.value == doctest::Approx(2.0));
  CHECK(s.half_width == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(speed_estimate(flat, {0.0, 1.0}).value == doctest::Approx(0.0));
  const auto b = speed_estimate_between(bramson, 50.0, 150.0);
  CHECK(std::abs(b.value / std::numbers::sqrt2 - 1.0) < 0.015);
  CHECK_THROWS_AS(speed_estimate_between(line, 10.0, 15.0), MisuseError);

  MarkerTrack bad;
  bad.push(1.0, 0.0);
  CHECK_THROWS_AS(bad.push(1.0, 1.0), MisuseError);
  CHECK_THROWS_AS(bad.push(2.0, NAN), DomainError);
}

TEST_CASE("decay estimates") {
  const auto g = GridSpec::window(-5.0, 30.0, 0.05);
  const auto e = decay_estimate(sampled(g, [](double x) { return std::exp(-3.0 * x); }), 0.0, {5.0, 15.0});
  CHECK(e.value == doctest::Approx(3.0).epsilon(1e-9));
  const auto ic = make_initial_condition(2.0, g);
  CHECK(decay_estimate(ic, 0.0, {1.0, 10.0}).value == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS_AS(decay_estimate(ic, 0.0, {40.0, 50.0}), InsufficientDomainError);
  std::vector<double> z(g.n, 0.0);
  CHECK_THROWS_AS(decay_estimate(Field(g, z), 0.0, {1.0, 2.0}), DomainError);
}

TEST_CASE("instantaneous speed identity on a pure exponential") {
  // theta = N everywhere: g' = kappa N / 2 + v (1 - a) / N
  const double N = 1.7, kappa = 0.8, v = 1.0, a = 1e-9;
  const auto g = GridSpec::window(-10.0, 40.0, 0.05);
  const auto u = sampled(g, [](double x) { return 0.5 * std::exp(-1.7 * x); });
  const Field theta(g, std::vector<double>(g.n, N));
  CHECK(instantaneous_speed(u, theta, kappa, v, 0.25) == doctest::Approx(kappa * N / 2 + v * 0.75 / N));
  const auto tiny = sampled(g, [](double x) { return std::exp(-1.7 * x); });
  CHECK(instantaneous_speed(tiny, theta, kappa, v, a) == doctest::Approx(kappa * N / 2 + 1.0 / N).epsilon(1e-8));
  const Field zero(g, std::vector<double>(g.n, 0.0));
  CHECK_THROWS_AS(instantaneous_speed(u, zero, kappa, v, 0.25), DegenerateFrontError);
}
