#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "stokpp/errors.hpp"
#include "stokpp/kpp_solver.hpp"
#include "stokpp/logistic_sde.hpp"
#include "stokpp/markers.hpp"

using namespace stokpp;

namespace {

KppParams base(double epsilon = 0.0, double N = 3.0) {
  KppParams p;
  p.epsilon = epsilon;
  p.N = N;
  p.noise.seed = 17;
  return p;
}

}  // namespace

TEST_CASE("u = 1 is an equilibrium") {
  const auto g = GridSpec::window(-5.0, 10.0, 0.05);
  KppParams p = base();
  p.frame.enabled = false;
  KppSolver s(p, Field(g, std::vector<double>(g.n, 1.0)));
  for (int k = 0; k < 500; ++k) s.step_spde();
  for (double v : s.field().values) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("heat equation oracle with the reaction switched off") {
  // u0 = erfc(x / sqrt(2 s0)) / 2 solves u_t = u_xx / 2 with s0 -> s0 + t
  const auto g = GridSpec::window(-15.0, 30.0, 0.05);
  std::vector<double> v(g.n);
  for (std::size_t i = 0; i < g.n; ++i) v[i] = 0.5 * std::erfc(g.x(i) / std::sqrt(2.0));
  KppParams p = base();
  p.frame.enabled = false;
  KppSolver s(p, Field(g, v));
  for (int k = 0; k < 500; ++k) s.step_normalized(0.0);
  double err = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) err = std::max(err, std::abs(s.field().values[i] - 0.5 * std::erfc(g.x(i) / std::sqrt(2.0 * 6.0))));
  CHECK(err < 2e-3);
  CHECK(s.time() == doctest::Approx(5.0));
}

TEST_CASE("normalized step with v = 1 equals the deterministic SPDE step") {
  const auto g = GridSpec::window(-20.0, 60.0, 0.05);
  const auto ic = make_initial_condition(3.0, g);
  KppSolver a(base(), ic), b(base(), ic);
  for (int k = 0; k < 300; ++k) {
    a.step_spde();
    b.step_normalized(1.0);
  }
  CHECK(a.field().values == b.field().values);
  CHECK(a.field().grid.frame_offset == b.field().grid.frame_offset);
}

TEST_CASE("flat SPDE reproduces the scalar SDE bit for bit") {
  const auto g = GridSpec::window(0.0, 5.0, 0.1);
  KppParams p = base(1.0);
  p.frame.enabled = false;
  const auto dw = scalar_increments(p.noise, p.dt, 400);
  const auto path = simulate_v(1.0, Interpretation::ito, 0.7, p.dt, dw);
  KppSolver s(p, Field(g, std::vector<double>(g.n, 0.7)));
  for (std::size_t k = 0; k < dw.size(); ++k) {
    s.step_spde(std::span<const double>(&dw[k], 1));
    for (double v : s.field().values) REQUIRE(v == path.values[k + 1]);
  }
}

TEST_CASE("deterministic front speed and decay") {
  // minimal speed sqrt(2 kappa) and decay sqrt(2 / kappa) for kappa = 1
  KppParams p = base();
  const auto g = default_grid();
  SdePath ones;
  ones.dt = p.dt;
  ones.values.assign(6001, 1.0);
  MarkerTrack track;
  Field last;
  run_normalized(ones, p, g, 60.0, 0.5, [&](const Field& f, double) {
    track.push(f.time, a_marker(f, 0.5).position);
    last = f;
  });
  const auto s = speed_estimate_between(track, 30.0, 60.0);
  CHECK(std::abs(s.value / std::numbers::sqrt2 - 1.0) < 0.07);
  const double g60 = a_marker(last, 0.5).position;
  const auto d = decay_estimate(last, g60, {5.0, 15.0});
  CHECK(std::abs(d.value / std::numbers::sqrt2 - 1.0) < 0.10);
}

TEST_CASE("moving window keeps the front inside and preserves positions") {
  KppParams p = base();
  const auto g = GridSpec::window(-20.0, 60.0, 0.05);
  KppSolver s(p, make_initial_condition(p.N, g));
  double prev = a_marker(s.field(), 0.5).position;
  for (int k = 0; k < 4000; ++k) {
    s.step_spde();
    const double x = a_marker(s.field(), 0.5).position;
    CHECK(x >= prev - 1e-9);
    CHECK(x - prev < 0.05);
    prev = x;
  }
  CHECK(s.shifts() > 0);
  CHECK(s.field().grid.frame_offset > 0.0);
}

TEST_CASE("drift frame moves the grid at the requested speed") {
  KppParams p = base();
  p.drift_shift = 1.2;
  p.frame.enabled = false;
  const auto g = GridSpec::window(-20.0, 60.0, 0.05);
  KppSolver s(p, make_initial_condition(p.N, g));
  for (int k = 0; k < 1000; ++k) s.step_spde();
  CHECK(s.field().grid.frame_offset == doctest::Approx(12.0));
}

TEST_CASE("factorization through the shared Wiener path") {
  const auto g = GridSpec::window(-20.0, 60.0, 0.05);
  KppParams p = base(0.0);
  CHECK(verify_factorization(p, g, 2.0) <= 1e-10);
  p.epsilon = 1.0;
  p.dt = 1e-3;
  const double coarse = verify_factorization(p, g, 3.0);
  p.dt = 5e-4;
  const double fine = verify_factorization(p, g, 3.0);
  CHECK(coarse <= 5e-2);
  CHECK(coarse / fine >= 1.5);
  NoiseModel other = p.noise;
  other.stream_id = 3;
  CHECK_THROWS_AS(verify_factorization(p, g, 1.0, other), MisuseError);
}

TEST_CASE("correlated noise keeps solutions nonnegative") {
  KppParams p = base(1.2);
  p.noise.kernel = CovarianceKernel::squared_exponential(1.0, 2.0);
  const auto g = GridSpec::window(-20.0, 60.0, 0.05);
  KppSolver s(p, make_initial_condition(p.N, g));
  for (int k = 0; k < 1000; ++k) {
    s.step_spde();
    REQUIRE(*std::min_element(s.field().values.begin(), s.field().values.end()) >= 0.0);
  }
}

TEST_CASE("parameter validation") {
  const auto g = GridSpec::window(-5.0, 10.0, 0.05);
  const auto ic = make_initial_condition(1.0, g);
  KppParams p = base();
  p.dt = 0.0;
  CHECK_THROWS_AS(KppSolver(p, ic), ConfigError);
  p = base();
  p.frame.target = 0.7;
  CHECK_THROWS_AS(KppSolver(p, ic), ConfigError);
  p = base();
  p.kappa = -1.0;
  CHECK_THROWS_AS(KppSolver(p, ic), ConfigError);
  p = base(1.0);
  KppSolver s(p, ic);
  const std::vector<double> two(2, 0.0);
  CHECK_THROWS_AS(s.step_spde(two), MisuseError);
  CHECK_THROWS_AS(s.step_normalized(-1.0), DomainError);
  p = base();
  p.dt = 0.1;
  CHECK_FALSE(p.warnings(GridSpec::window(0.0, 1.0, 0.05)).empty());
  SdePath short_path;
  short_path.dt = p.dt;
  short_path.values.assign(5, 1.0);
  CHECK_THROWS_AS(run_normalized(short_path, p, g, 10.0, 1.0, nullptr), MisuseError);
}
