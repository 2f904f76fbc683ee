#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stokpp {

/// Uniform 1-D grid. Node i sits at x0 + frame_offset + i*dx in physical
/// coordinates; frame_offset accumulates every shift of the window.
struct GridSpec {
  double x0 = 0.0;
  double dx = 0.05;
  std::size_t n = 3;
  double frame_offset = 0.0;

  double x(std::size_t i) const noexcept {
    return x0 + frame_offset + static_cast<double>(i) * dx;
  }
  double left() const noexcept { return x(0); }
  double right() const noexcept { return x(n - 1); }
  double length() const noexcept { return static_cast<double>(n - 1) * dx; }

  /// Throws ConfigError unless dx > 0 and n >= 3.
  void validate() const;

  /// Grid of `length` space units starting at `left`.
  static GridSpec window(double left, double length, double dx);
};

/// Real-valued profile on a grid at a given time.
struct Field {
  GridSpec grid;
  std::vector<double> values;
  double time = 0.0;

  Field() = default;
  Field(GridSpec g, std::vector<double> v, double t = 0.0);

  std::size_t size() const noexcept { return values.size(); }
  double x(std::size_t i) const noexcept { return grid.x(i); }
  std::span<const double> view() const noexcept { return values; }

  /// Throws DomainError on non-finite values or a size mismatch.
  void validate() const;
};

/// The front-like initial profile: 1 left of x = -log(2)/N, (1/2) e^{-N x}
/// from there on. Continuous, equal to 1/2 at the origin.
Field make_initial_condition(double decay_rate, const GridSpec& grid);

/// Shifts the window by `cells` nodes (positive moves it right). Nodes entering
/// on the left take `left_fill`; nodes entering on the right continue the last
/// retained value as exp(-right_fill_rate * distance). Values in the overlap
/// are copied unchanged.
Field shift_frame(const Field& field, std::ptrdiff_t cells, double left_fill, double right_fill_rate);

/// Exponential decay rate of the rightmost `fraction` of the nodes, from the
/// log-ratio of the end points of that stretch. Exactly zero on a constant
/// tail; clamped at zero for a rising tail.
double fit_tail_rate(const Field& field, double fraction = 0.1);

/// -(log f)_x by central differences (second-order one-sided at the ends).
/// Throws DomainError if any value is <= 0.
Field log_gradient(const Field& field);

/// Linear interpolation of the values at physical coordinate x (clamped to
/// the window).
double interpolate(const Field& field, double x);

}  // namespace stokpp
