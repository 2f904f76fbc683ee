#include <doctest.h>

#include <cmath>
#include <numbers>

#include "stokpp/errors.hpp"
#include "stokpp/grid_field.hpp"

using namespace stokpp;

namespace {

double value_at(const Field& f, double x) {
  const auto i = static_cast<std::size_t>(std::llround((x - f.grid.left()) / f.grid.dx));
  REQUIRE(std::abs(f.x(i) - x) < 1e-12);
  return f.values[i];
}

Field sampled(const GridSpec& g, double (*fn)(double)) {
  std::vector<double> v(g.n);
  for (std::size_t i = 0; i < g.n; ++i) v[i] = fn(g.x(i));
  return Field(g, v);
}

}  // namespace

TEST_CASE("grid window spans the requested length") {
  const auto g = GridSpec::window(-5.0, 10.0, 0.25);
  CHECK(g.n == 41);
  CHECK(g.left() == doctest::Approx(-5.0));
  CHECK(g.right() == doctest::Approx(5.0));
  CHECK_THROWS_AS(GridSpec::window(0.0, 1.0, 0.0), ConfigError);
  GridSpec bad;
  bad.n = 2;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("initial condition values") {
  const double ln2 = std::numbers::ln2;
  const auto g = GridSpec::window(-4.0, 8.0, 1e-3);
  const auto f = make_initial_condition(1.0, g);
  CHECK(value_at(f, 0.0) == doctest::Approx(0.5));
  CHECK(interpolate(f, ln2) == doctest::Approx(0.25).epsilon(1e-5));
  CHECK(interpolate(f, -ln2 + 1e-3) == doctest::Approx(1.0).epsilon(2e-3));
  CHECK(value_at(f, -3.0) == 1.0);
  CHECK_THROWS_AS(make_initial_condition(0.0, g), ConfigError);
  CHECK_THROWS_AS(make_initial_condition(1.0, GridSpec::window(1.0, 5.0, 0.1)), ConfigError);
}

TEST_CASE("shift_frame") {
  const auto g = GridSpec::window(0.0, 10.0, 0.1);
  SUBCASE("zero shift is the identity") {
    const auto f = make_initial_condition(1.0, GridSpec::window(-2.0, 10.0, 0.1));
    const auto s = shift_frame(f, 0, 1.0, 1.0);
    CHECK(s.values == f.values);
    CHECK(s.grid.frame_offset == f.grid.frame_offset);
  }
  SUBCASE("constant field stays constant") {
    const Field f(g, std::vector<double>(g.n, 1.0));
    const auto s = shift_frame(f, 10, 1.0, 0.0);
    for (double v : s.values) CHECK(v == 1.0);
    CHECK(s.grid.frame_offset == doctest::Approx(10 * 0.1));
    const auto back = shift_frame(f, -10, 1.0, 0.0);
    for (double v : back.values) CHECK(v == 1.0);
  }
  SUBCASE("exponential continues exactly in physical coordinates") {
    const auto f = sampled(g, [](double x) { return std::exp(-x); });
    const auto s = shift_frame(f, 5, 1.0, fit_tail_rate(f));
    double err = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) err = std::max(err, std::abs(s.values[i] - std::exp(-s.x(i))) / std::exp(-s.x(i)));
    CHECK(err < 1e-12);
  }
  SUBCASE("errors") {
    const Field f(g, std::vector<double>(g.n, 1.0));
    CHECK_THROWS_AS(shift_frame(f, static_cast<std::ptrdiff_t>(g.n), 1.0, 0.0), MisuseError);
    CHECK_THROWS_AS(shift_frame(f, -3, -1.0, 0.0), NumericError);
  }
}

TEST_CASE("fit_tail_rate") {
  const auto g = GridSpec::window(0.0, 20.0, 0.05);
  CHECK(fit_tail_rate(sampled(g, [](double x) { return 3.0 * std::exp(-1.7 * x); })) == doctest::Approx(1.7));
  CHECK(fit_tail_rate(Field(g, std::vector<double>(g.n, 0.3))) == 0.0);
  CHECK(fit_tail_rate(sampled(g, [](double x) { return std::exp(x); })) == 0.0);
}

TEST_CASE("log_gradient") {
  SUBCASE("constant field gives zero") {
    const auto g = GridSpec::window(0.0, 5.0, 0.1);
    for (double v : log_gradient(Field(g, std::vector<double>(g.n, 0.7))).values) CHECK(v == 0.0);
  }
  SUBCASE("exponential gives its rate everywhere") {
    const auto g = GridSpec::window(-3.0, 7.0, 0.1);
    for (double v : log_gradient(sampled(g, [](double x) { return std::exp(-2.0 * x); })).values) {
      CHECK(v == doctest::Approx(2.0).epsilon(1e-10));
    }
  }
  SUBCASE("second-order convergence on the logistic profile") {
    // -(log f)' = 1 - f for f = 1 / (1 + e^x)
    auto err = [](double dx) {
      const auto g = GridSpec::window(-5.0, 10.0, dx);
      const auto th = log_gradient(sampled(g, [](double x) { return 1.0 / (1.0 + std::exp(x)); }));
      double e = 0.0;
      for (std::size_t i = 0; i < g.n; ++i) e = std::max(e, std::abs(th.values[i] - 1.0 / (1.0 + std::exp(-g.x(i)))));
      return e;
    };
    const double ratio = err(0.1) / err(0.05);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
  }
  SUBCASE("initial condition ahead of the junction has rate N") {
    const auto g = GridSpec::window(-3.0, 10.0, 0.05);
    const auto th = log_gradient(make_initial_condition(1.5, g));
    for (std::size_t i = 0; i < g.n; ++i) {
      if (g.x(i) > 0.1) CHECK(th.values[i] == doctest::Approx(1.5).epsilon(1e-10));
    }
  }
  SUBCASE("nonpositive values are rejected") {
    const auto g = GridSpec::window(0.0, 1.0, 0.1);
    std::vector<double> v(g.n, 1.0);
    v[4] = 0.0;
    CHECK_THROWS_AS(log_gradient(Field(g, v)), DomainError);
  }
}

TEST_CASE("interpolate clamps and interpolates") {
  const auto g = GridSpec::window(0.0, 1.0, 0.5);
  const Field f(g, {1.0, 0.5, 0.0});
  CHECK(interpolate(f, 0.25) == doctest::Approx(0.75));
  CHECK(interpolate(f, -1.0) == 1.0);
  CHECK(interpolate(f, 2.0) == 0.0);
}

TEST_CASE("field validation") {
  const auto g = GridSpec::window(0.0, 1.0, 0.5);
  CHECK_THROWS_AS(Field(g, {1.0, 2.0}).validate(), DomainError);
  CHECK_THROWS_AS(Field(g, {1.0, NAN, 0.0}).validate(), DomainError);
  CHECK_NOTHROW(Field(g, {1.0, 0.5, 0.0}).validate());
}
