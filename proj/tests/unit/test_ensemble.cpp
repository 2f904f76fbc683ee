#include <doctest.h>

#include <cmath>

#include "stokpp/ensemble.hpp"
#include "stokpp/errors.hpp"
#include "stokpp/report_json.hpp"

using namespace stokpp;

namespace {

ExperimentConfig small(double epsilon, std::size_t paths) {
  ExperimentConfig c;
  c.params.kappa = 1.0;
  c.params.epsilon = epsilon;
  c.params.N = 3.0;
  c.params.noise.seed = 21;
  c.grid = default_grid(80.0);
  c.T = 20.0;
  c.paths = paths;
  c.speed_window = {0.5, 1.0};
  return c;
}

ExperimentConfig expectation(double epsilon, std::size_t paths, bool correlated) {
  auto c = small(epsilon, paths);
  c.route = Route::spde;
  c.marker_kind = MarkerKind::expectation;
  if (correlated) c.params.noise.kernel = CovarianceKernel::squared_exponential(1.0, 2.0);
  c.a_star_offset = 10.0;
  return c;
}

}  // namespace

TEST_CASE("single deterministic path equals a direct run") {
  const auto c = small(0.0, 1);
  const auto s = run_experiment(c);
  REQUIRE(s.tracks.size() == 1);
  REQUIRE(s.tracks[0].size() == 1);

  MarkerTrack direct;
  SdePath ones;
  ones.dt = c.params.dt;
  ones.values.assign(2001, 1.0);
  run_normalized(ones, c.params, c.grid, c.T, c.stride,
                 [&](const Field& f, double) { direct.push(f.time, a_marker(f, 0.5).position); });
  CHECK(s.tracks[0][0].positions == direct.positions);
  const auto ref = speed_estimate_between(direct, 10.0, 20.0);
  CHECK(s.reports[0].speed.value == ref.value);
  CHECK(s.reports[0].speed.half_width == ref.half_width);
  CHECK(s.kind == MarkerKind::pathwise);
}

TEST_CASE("summaries are reproducible and independent of the job count") {
  auto c = small(1.0, 3);
  c.jobs = 1;
  const auto a = summary_json(c, run_experiment(c));
  CHECK(a == summary_json(c, run_experiment(c)));
  c.jobs = 3;
  CHECK(a == summary_json(c, run_experiment(c)));
  c.params.noise.seed = 22;
  CHECK(a != summary_json(c, run_experiment(c)));
}

TEST_CASE("expectation runs are reproducible across job counts") {
  auto c = expectation(0.5, 3, true);
  c.T = 10.0;
  c.w_lags = {0.0, 2.0};
  c.jobs = 1;
  const auto a = summary_json(c, run_experiment(c));
  c.jobs = 2;
  CHECK(a == summary_json(c, run_experiment(c)));
}

TEST_CASE("noiseless expectation run") {
  auto c = expectation(0.0, 3, true);
  c.w_lags = {0.0, 2.0};
  const auto s = run_experiment(c);
  REQUIRE(s.a_star.has_value());
  CHECK(std::abs(s.a_star->value - 1.0) < 1e-3);
  for (const auto& row : s.w_cov) CHECK(std::abs(row.covariance.value) < 1e-12);

  // the expectation marker of identical paths is the pathwise marker of one of them
  KppParams p = c.params;
  p.frame.enabled = false;
  p.drift_shift = *predict(Regime::ito_correlated, 1.0, 0.0, 3.0).speed;
  KppSolver solver(p, make_initial_condition(p.N, c.grid));
  const auto& track = s.tracks[0][0];
  std::size_t k = 0;
  for (std::size_t step = 0; step <= 2000; ++step) {
    if (step % 50 == 0) {
      CHECK(track.positions[k] == doctest::Approx(a_marker(solver.field(), 0.5).position).epsilon(1e-12));
      ++k;
    }
    if (step < 2000) solver.step_spde();
  }
}

TEST_CASE("a* for scalar noise follows the flat logistic mean") {
  auto c = expectation(1.0, 8, false);
  c.T = 30.0;
  c.speed_window = {0.4, 1.0};
  const auto a = estimate_a_star(c, 10.0);
  CHECK(std::abs(a.value - 0.5) < 4.0 * a.std_error + 0.02);
}

TEST_CASE("a* is positive for correlated noise") {
  auto c = expectation(1.0, 4, true);
  const auto a = estimate_a_star(c, 10.0);
  CHECK(a.value > 3.0 * a.std_error);
  CHECK(a.value < 1.0);
}

TEST_CASE("w covariance rows") {
  auto c = expectation(0.5, 6, true);
  c.T = 10.0;
  const auto rows = estimate_w_covariance(c, {0.0, 1.0}, {2.0, 6.0});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].lag == 0.0);
  CHECK(rows[1].lag == doctest::Approx(1.0));
  CHECK(rows[0].covariance.value > 0.0);
  CHECK(rows[0].covariance.std_error > 0.0);
  CHECK(rows[0].second_moment.value > rows[0].mean_w * rows[0].mean_w * 0.5);
  CHECK_THROWS_AS(estimate_w_covariance(c, {}, {2.0, 6.0}), MisuseError);
}

TEST_CASE("configuration checks") {
  auto c = small(1.0, 2);
  c.params.noise.kernel = CovarianceKernel::squared_exponential(1.0, 1.0);
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
  c = small(1.0, 2);
  c.stride = 5.0;
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
  c = small(1.0, 2);
  c.marker_kind = MarkerKind::expectation;
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
  c = small(1.0, 2);
  c.levels = {1.5};
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
  c = expectation(1.0, 2, true);
  c.params.noise.interpretation = Interpretation::stratonovich;
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
  CHECK(parse_route(to_string(Route::spde)) == Route::spde);
  CHECK_THROWS_AS(parse_route("fast"), ConfigError);
}
