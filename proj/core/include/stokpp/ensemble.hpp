#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "stokpp/grid_field.hpp"
#include "stokpp/kpp_solver.hpp"
#include "stokpp/markers.hpp"
#include "stokpp/stats.hpp"
#include "stokpp/theory.hpp"

namespace stokpp {

/// normalized: v from the scalar SDE, then the random PDE for u/v (scalar
/// noise only). spde: the stochastic equation itself.
enum class Route { normalized, spde };

std::string to_string(Route route);
Route parse_route(const std::string& s);

struct ExperimentConfig {
  KppParams params;
  GridSpec grid = default_grid();
  double T = 120.0;
  std::size_t paths = 16;
  Route route = Route::normalized;
  /// Pathwise markers follow each path in its own moving window; expectation
  /// markers invert the ensemble-mean field on a shared co-moving grid.
  /// Unset: pathwise for scalar noise, expectation for correlated noise.
  std::optional<MarkerKind> marker_kind;
  std::vector<double> levels{0.5};
  double stride = 0.5;  ///< snapshot spacing, time units
  std::pair<double, double> speed_window{0.4, 0.9};  ///< fractions of T
  std::pair<double, double> decay_offsets{5.0, 15.0};  ///< ahead of the first level's marker
  double a_star_offset = 30.0;  ///< plateau starts this far behind the first level's marker
  /// Expectation runs: frame speed of the shared grid. Unset: predicted speed.
  std::optional<double> frame_speed;
  std::vector<double> w_lags;                     ///< space units; empty disables w statistics
  std::pair<double, double> w_window{5.0, 15.0};  ///< ahead of the first level's marker
  unsigned jobs = 0;                              ///< 0: all cores

  void validate() const;
  MarkerKind effective_marker_kind() const;
  Regime regime() const;
};

struct WCovRow {
  double lag = 0.0;
  Estimate covariance;     ///< Cov[w(x), w(x + lag)] across paths, averaged over the tail window
  Estimate second_moment;  ///< E[w(x) w(x + lag)]
  double mean_w = 0.0;
};

struct EnsembleSummary {
  MarkerKind kind = MarkerKind::pathwise;
  Regime regime = Regime::ito_scalar;
  std::vector<double> snapshot_times;
  /// Ensemble-mean u at each snapshot (expectation runs only).
  std::vector<Field> mean_fields;
  /// Expectation runs: one track per level. Pathwise runs: the track of every
  /// surviving path, level-major ([level][path]).
  std::vector<std::vector<MarkerTrack>> tracks;
  std::vector<FrontReport> reports;  ///< one per level
  std::optional<Estimate> a_star;
  std::vector<WCovRow> w_cov;
  std::vector<std::uint64_t> survivors;
  std::vector<std::uint64_t> failed_streams;
  std::vector<double> final_max;  ///< sup_x u(T, x) per survivor
  std::size_t regularized_markers = 0;
  std::size_t skipped_markers = 0;  ///< snapshots where a level was not attained
  std::size_t dropped_decay = 0;    ///< paths without a usable decay fit
  std::size_t dropped_w = 0;        ///< paths with nonpositive u in the w window
};

/// Runs `paths` paths on streams 0..paths-1 and aggregates markers, speeds,
/// decay rates and (expectation runs) a* and w statistics. Deterministic in
/// (seed, config) and independent of `jobs`. Throws EstimationError when
/// fewer than 80% of the paths survive.
EnsembleSummary run_experiment(const ExperimentConfig& config);

/// Plateau level a* of the ensemble mean behind the first level's expectation
/// marker, averaged over the speed window.
Estimate estimate_a_star(const ExperimentConfig& config, double behind_offset);

/// Tail-window covariance of w = -(log u)_x at the requested lags, measured
/// per path relative to the expectation marker.
std::vector<WCovRow> estimate_w_covariance(const ExperimentConfig& config, const std::vector<double>& lags,
                                           std::pair<double, double> tail_window);

}  // namespace stokpp
