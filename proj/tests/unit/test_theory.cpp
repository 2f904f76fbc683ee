#include <doctest.h>

#include <cmath>
#include <numbers>

#include "stokpp/errors.hpp"
#include "stokpp/theory.hpp"

using namespace stokpp;

constexpr double kSqrt2 = std::numbers::sqrt2;

TEST_CASE("Ito scalar prediction") {
  const auto p = ito_scalar_prediction(1.0, 0.0, 3.0);
  CHECK(*p.speed == doctest::Approx(kSqrt2));
  CHECK(*p.decay == doctest::Approx(kSqrt2));
  const auto q = ito_scalar_prediction(1.0, 1.0, 3.0);
  CHECK(*q.speed == doctest::Approx(1.0));
  CHECK(*q.decay == doctest::Approx(1.0));
  CHECK(*q.v_bar == doctest::Approx(0.5));
  const auto r = ito_scalar_prediction(1.0, 1.0, 0.5);
  CHECK(*r.speed == doctest::Approx(1.25));
  CHECK(*r.decay == doctest::Approx(0.5));
  CHECK(ito_scalar_prediction(1.0, 1.5, 1.0).degenerate());
  CHECK(ito_scalar_prediction(1.0, kSqrt2, 1.0).degenerate());
  CHECK_FALSE(ito_scalar_prediction(1.0, std::nextafter(kSqrt2, 0.0), 1.0).degenerate());
}

TEST_CASE("Stratonovich and correlated predictions ignore epsilon") {
  CHECK(*stratonovich_scalar_prediction(1.0, 3.0).speed == doctest::Approx(kSqrt2));
  CHECK(*stratonovich_scalar_prediction(1.0, 0.5).speed == doctest::Approx(2.25));
  CHECK(*stratonovich_scalar_prediction(2.0, 2.0).speed == doctest::Approx(2.0));
  const auto c = correlated_prediction(2.0, 2.0);
  CHECK(*c.speed == doctest::Approx(2.0));
  CHECK(*c.decay == doctest::Approx(1.0));
  CHECK(*correlated_prediction(1.0, 1.0).speed == doctest::Approx(1.5));
  CHECK(*predict(Regime::ito_correlated, 1.0, 7.0, 1.0).speed == doctest::Approx(1.5));
  CHECK(*predict(Regime::stratonovich_scalar, 1.0, 3.0, 3.0).speed == doctest::Approx(kSqrt2));
}

TEST_CASE("branches meet at the threshold") {
  const auto p = correlated_prediction(1.0, kSqrt2);
  CHECK(p.threshold == doctest::Approx(kSqrt2));
  CHECK(*p.speed == doctest::Approx(kSqrt2));
  const double below = *correlated_prediction(1.0, std::nextafter(kSqrt2, 0.0)).speed;
  const double above = *correlated_prediction(1.0, std::nextafter(kSqrt2, 2.0)).speed;
  CHECK(std::abs(below - above) < 1e-12);
}

TEST_CASE("dispersion roots") {
  const auto d = dispersion_roots(1.0, kSqrt2);
  REQUIRE(d.has_value());
  CHECK(d->first == doctest::Approx(kSqrt2));
  CHECK(d->second == doctest::Approx(kSqrt2));
  const auto r = dispersion_roots(1.0, 1.5);
  REQUIRE(r.has_value());
  CHECK(r->first == doctest::Approx(1.0));
  CHECK(r->second == doctest::Approx(2.0));
  CHECK_FALSE(dispersion_roots(1.0, 1.0).has_value());
  // roots satisfy the quadratic for a general kappa
  const auto q = dispersion_roots(0.7, 3.0);
  REQUIRE(q.has_value());
  for (double mu : {q->first, q->second}) CHECK(mu * mu - (2 * 3.0 / 0.7) * mu + 2 / 0.7 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("w covariance prediction") {
  const auto se = CovarianceKernel::squared_exponential(1.0, 2.0);
  CHECK(w_covariance_prediction(se, 1.0, 1.0, kSqrt2, 0.0) == doctest::Approx(3.0));
  CHECK(w_covariance_prediction(se, 1.0, 0.0, 1.3, 2.0) == doctest::Approx(1.69));
  CHECK(w_covariance_prediction(se, 1.0, 1.0, 1.0, 200.0) == doctest::Approx(1.0));
}

TEST_CASE("regime names and argument checks") {
  CHECK(parse_regime("correlated") == Regime::ito_correlated);
  CHECK(parse_regime(to_string(Regime::stratonovich_scalar)) == Regime::stratonovich_scalar);
  CHECK_THROWS_AS(parse_regime("levy"), ConfigError);
  CHECK_THROWS_AS(ito_scalar_prediction(0.0, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(correlated_prediction(1.0, -1.0), ConfigError);
  CHECK_THROWS_AS(ito_scalar_prediction(1.0, -0.5, 1.0), ConfigError);
}
