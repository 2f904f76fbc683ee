#include "stokpp/grid_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "stokpp/errors.hpp"

namespace stokpp {

void GridSpec::validate() const {
  if (!(dx > 0.0) || !std::isfinite(dx)) throw ConfigError("grid: dx must be positive");
  if (n < 3) throw ConfigError("grid: need at least 3 nodes");
  if (!std::isfinite(x0) || !std::isfinite(frame_offset)) throw ConfigError("grid: non-finite origin");
}

GridSpec GridSpec::window(double left, double length, double dx) {
  if (!(dx > 0.0) || !(length > 0.0)) throw ConfigError("grid: window length and dx must be positive");
  GridSpec g;
  g.x0 = left;
  g.dx = dx;
  g.n = static_cast<std::size_t>(std::llround(length / dx)) + 1;
  g.validate();
  return g;
}

Field::Field(GridSpec g, std::vector<double> v, double t) : grid(g), values(std::move(v)), time(t) {}

void Field::validate() const {
  grid.validate();
  if (values.size() != grid.n) throw DomainError("field: value count does not match grid");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw DomainError("field: non-finite value at node " + std::to_string(i));
  }
}

Field make_initial_condition(double decay_rate, const GridSpec& grid) {
  grid.validate();
  if (!(decay_rate > 0.0)) throw ConfigError("initial condition: N must be positive");
  const double junction = -std::numbers::ln2 / decay_rate;
  if (junction < grid.left() || junction > grid.right()) {
    throw ConfigError("initial condition: grid does not contain the junction x = -log(2)/N");
  }
  std::vector<double> v(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    v[i] = x < junction ? 1.0 : 0.5 * std::exp(-decay_rate * x);
  }
  return Field(grid, std::move(v), 0.0);
}

Field shift_frame(const Field& field, std::ptrdiff_t cells, double left_fill, double right_fill_rate) {
  if (cells == 0) return field;
  const auto n = static_cast<std::ptrdiff_t>(field.size());
  if (std::abs(cells) >= n) throw MisuseError("shift_frame: shift exceeds window");
  if (!std::isfinite(right_fill_rate)) throw NumericError("shift_frame: non-finite fill rate");

  Field out = field;
  out.grid.frame_offset += static_cast<double>(cells) * field.grid.dx;
  auto& v = out.values;
  const auto& src = field.values;

  if (cells > 0) {
    std::copy(src.begin() + cells, src.end(), v.begin());
    const double last = src.back();
    if (last < 0.0) throw NumericError("shift_frame: right fill would be negative");
    const double step = std::exp(-right_fill_rate * field.grid.dx);
    double fill = last;
    for (std::ptrdiff_t i = n - cells; i < n; ++i) {
      fill *= step;
      v[static_cast<std::size_t>(i)] = fill;
    }
  } else {
    if (left_fill < 0.0) throw NumericError("shift_frame: left fill would be negative");
    const std::ptrdiff_t k = -cells;
    std::copy(src.begin(), src.end() - k, v.begin() + k);
    std::fill(v.begin(), v.begin() + k, left_fill);
  }
  return out;
}

double fit_tail_rate(const Field& field, double fraction) {
  const std::size_t n = field.size();
  const auto span = std::max<std::size_t>(2, static_cast<std::size_t>(fraction * static_cast<double>(n)));
  const std::size_t a = n - 1 - std::min(span, n - 1);
  const double ua = field.values[a];
  const double ub = field.values[n - 1];
  if (!(ua > 0.0) || !(ub > 0.0)) return 0.0;
  const double rate = std::log(ua / ub) / (static_cast<double>(n - 1 - a) * field.grid.dx);
  return std::max(rate, 0.0);
}

Field log_gradient(const Field& field) {
  const std::size_t n = field.size();
  if (n < 3) throw MisuseError("log_gradient: need at least 3 nodes");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(field.values[i] > 0.0)) {
      throw DomainError("log_gradient: nonpositive value at node " + std::to_string(i));
    }
  }
  const auto& f = field.values;
  const double h = field.grid.dx;
  Field out(field.grid, std::vector<double>(n), field.time);
  auto& th = out.values;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    th[i] = -std::log(f[i + 1] / f[i - 1]) / (2.0 * h);
  }
  th[0] = -(4.0 * std::log(f[1] / f[0]) - std::log(f[2] / f[0])) / (2.0 * h);
  th[n - 1] = (4.0 * std::log(f[n - 2] / f[n - 1]) - std::log(f[n - 3] / f[n - 1])) / (2.0 * h);
  return out;
}

double interpolate(const Field& field, double x) {
  const double s = (x - field.grid.left()) / field.grid.dx;
  if (s <= 0.0) return field.values.front();
  const double last = static_cast<double>(field.size() - 1);
  if (s >= last) return field.values.back();
  const auto i = static_cast<std::size_t>(s);
  const double w = s - static_cast<double>(i);
  return (1.0 - w) * field.values[i] + w * field.values[i + 1];
}

}  // namespace stokpp
