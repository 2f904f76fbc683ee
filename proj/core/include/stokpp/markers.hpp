#pragma once

#include <span>
#include <utility>
#include <vector>

#include "stokpp/grid_field.hpp"
#include "stokpp/theory.hpp"

namespace stokpp {

enum class MarkerKind { pathwise, expectation };

/// Positions g(t) of the level-a crossing, in physical coordinates.
struct MarkerTrack {
  double level = 0.5;
  MarkerKind kind = MarkerKind::pathwise;
  std::vector<double> times;
  std::vector<double> positions;

  void push(double t, double x);
  std::size_t size() const noexcept { return times.size(); }
};

/// An estimate with a symmetric 95% confidence half-width.
struct Interval {
  double value = 0.0;
  double half_width = 0.0;
};

struct FrontReport {
  Interval speed;
  Interval decay;
  double t_lo = 0.0;
  double t_hi = 0.0;
  TheoryPrediction theory;
};

struct MarkerHit {
  double position = 0.0;
  bool regularized = false;  ///< the profile was not monotone and was regularized first
};

/// Crossing of level a by linear interpolation on a decreasing profile. A
/// profile that rises by more than 1e-8 somewhere is replaced by its running
/// minimum from the left first (and flagged). Throws LevelNotAttainedError
/// unless min < a < max.
MarkerHit a_marker(const Field& field, double a);

/// Level-a crossing of an ensemble-mean profile after isotonic (decreasing)
/// regression.
double expectation_marker(const Field& mean_field, double a);

/// Pointwise mean of fields that share one grid.
Field mean_field(std::span<const Field> fields);

/// Best decreasing fit in least squares (pool adjacent violators).
std::vector<double> isotonic_decreasing(std::span<const double> values);

/// Least-squares slope of positions against times for t in [lo*T, hi*T]
/// (T = last time). Needs at least 10 samples in the window.
Interval speed_estimate(const MarkerTrack& track, std::pair<double, double> window_fraction);

/// Same fit over an absolute time window [t_lo, t_hi].
Interval speed_estimate_between(const MarkerTrack& track, double t_lo, double t_hi);

/// Least-squares slope of -log u against x over [marker + lo, marker + hi].
Interval decay_estimate(const Field& field, double marker, std::pair<double, double> offset_range);

/// Same fit when the caller already holds log u (e.g. an ensemble mean of log u).
Interval decay_estimate_from_log(const Field& log_field, double marker, std::pair<double, double> offset_range);

/// Instantaneous marker speed from the identity
///   g' = -(kappa/2) (log theta)_x + kappa theta / 2 + v (1 - a) / theta
/// evaluated at the level-a marker of u_field, where theta = -(log u)_x.
double instantaneous_speed(const Field& u_field, const Field& theta_field, double kappa, double v, double a);

}  // namespace stokpp
