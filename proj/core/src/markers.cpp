#include "stokpp/markers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stokpp/errors.hpp"
#include "stokpp/stats.hpp"

namespace stokpp {
namespace {

constexpr double kMonotoneTolerance = 1e-8;

// Crossing of level a on a non-increasing sequence.
double crossing(const Field& field, std::span<const double> w, double a) {
  if (!(w.front() > a) || !(w.back() < a)) {
    throw LevelNotAttainedError("level " + std::to_string(a) + " not attained inside the window");
  }
  std::size_t j = 1;
  while (w[j] > a) ++j;
  const double frac = (w[j - 1] - a) / (w[j - 1] - w[j]);
  return field.x(j - 1) + frac * field.grid.dx;
}

}  // namespace

void MarkerTrack::push(double t, double x) {
  if (!times.empty() && !(t > times.back())) throw MisuseError("marker track: times must increase");
  if (!std::isfinite(x)) throw DomainError("marker track: non-finite position");
  times.push_back(t);
  positions.push_back(x);
}

MarkerHit a_marker(const Field& field, double a) {
  if (field.size() < 2) throw MisuseError("a_marker: field too small");
  MarkerHit hit;
  std::vector<double> w(field.values);
  double running = w[0];
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (w[i] > running + kMonotoneTolerance) hit.regularized = true;
    running = std::min(running, w[i]);
    w[i] = running;
  }
  hit.position = crossing(field, w, a);
  return hit;
}

std::vector<double> isotonic_decreasing(std::span<const double> values) {
  struct Block {
    double sum;
    std::size_t count;
    double mean() const { return sum / static_cast<double>(count); }
  };
  std::vector<Block> blocks;
  blocks.reserve(values.size());
  for (double v : values) {
    blocks.push_back({v, 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() < blocks.back().mean()) {
      const Block top = blocks.back();
      blocks.pop_back();
      blocks.back().sum += top.sum;
      blocks.back().count += top.count;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& b : blocks) out.insert(out.end(), b.count, b.mean());
  return out;
}

double expectation_marker(const Field& mean_field, double a) {
  const auto fitted = isotonic_decreasing(mean_field.values);
  return crossing(mean_field, fitted, a);
}

Field mean_field(std::span<const Field> fields) {
  if (fields.empty()) throw MisuseError("mean_field: empty ensemble");
  const auto& g = fields.front().grid;
  std::vector<double> acc(fields.front().size(), 0.0);
  for (const auto& f : fields) {
    if (f.size() != acc.size() || f.grid.dx != g.dx ||
        std::abs(f.grid.left() - g.left()) > 1e-9 * std::max(1.0, std::abs(g.left()))) {
      throw MisuseError("mean_field: fields live on different grids");
    }
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += f.values[i];
  }
  const double inv = 1.0 / static_cast<double>(fields.size());
  for (auto& v : acc) v *= inv;
  return Field(g, std::move(acc), fields.front().time);
}

Interval speed_estimate_between(const MarkerTrack& track, double t_lo, double t_hi) {
  std::vector<double> ts;
  std::vector<double> xs;
  for (std::size_t i = 0; i < track.size(); ++i) {
    if (track.times[i] >= t_lo - 1e-9 && track.times[i] <= t_hi + 1e-9) {
      ts.push_back(track.times[i]);
      xs.push_back(track.positions[i]);
    }
  }
  if (ts.size() < 10) throw MisuseError("speed_estimate: fewer than 10 samples in the window");
  const auto fit = fit_line(ts, xs);
  return {fit.slope, kZ95 * fit.slope_se};
}

Interval speed_estimate(const MarkerTrack& track, std::pair<double, double> window_fraction) {
  if (track.size() == 0) throw MisuseError("speed_estimate: empty track");
  const double T = track.times.back();
  return speed_estimate_between(track, window_fraction.first * T, window_fraction.second * T);
}

Interval decay_estimate_from_log(const Field& log_field, double marker, std::pair<double, double> offset_range) {
  const double lo = marker + offset_range.first;
  const double hi = marker + offset_range.second;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < log_field.size(); ++i) {
    const double x = log_field.x(i);
    if (x < lo || x > hi) continue;
    if (!std::isfinite(log_field.values[i])) throw DomainError("decay_estimate: nonpositive value in window");
    xs.push_back(x);
    ys.push_back(-log_field.values[i]);
  }
  if (xs.size() < 3) throw InsufficientDomainError("decay_estimate: window not resolved by the grid");
  const auto fit = fit_line(xs, ys);
  return {fit.slope, kZ95 * fit.slope_se};
}

Interval decay_estimate(const Field& field, double marker, std::pair<double, double> offset_range) {
  const double lo = marker + offset_range.first;
  const double hi = marker + offset_range.second;
  Field logs = field;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double x = field.x(i);
    if (x < lo || x > hi) continue;
    if (!(field.values[i] > 0.0)) {
      throw DomainError("decay_estimate: nonpositive value at node " + std::to_string(i));
    }
    logs.values[i] = std::log(field.values[i]);
  }
  return decay_estimate_from_log(logs, marker, offset_range);
}

double instantaneous_speed(const Field& u_field, const Field& theta_field, double kappa, double v, double a) {
  const double g = a_marker(u_field, a).position;
  const double h = theta_field.grid.dx;
  const double theta = interpolate(theta_field, g);
  const double left = interpolate(theta_field, g - h);
  const double right = interpolate(theta_field, g + h);
  if (!(theta > 0.0) || !(left > 0.0) || !(right > 0.0)) {
    throw DegenerateFrontError("instantaneous_speed: theta <= 0 at the marker");
  }
  const double dlog_theta = (std::log(right) - std::log(left)) / (2.0 * h);
  return -0.5 * kappa * dlog_theta + 0.5 * kappa * theta + v * (1.0 - a) / theta;
}

}  // namespace stokpp
