#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stokpp {

/// One backward-Euler substep of u_t = (kappa/2) u_xx + drift u_x on a uniform
/// grid, written in increment form so that constant profiles are reproduced
/// exactly. Boundary rows: zero flux on the left, exponential continuation
/// u[n-1] = ratio * u[n-2] on the right. The system matrix is an M-matrix, so
/// nonnegative profiles stay nonnegative and monotone profiles stay monotone.
class ImplicitDiffusion {
 public:
  ImplicitDiffusion(std::size_t n, double dx, double kappa, double drift, double substep);

  /// Advances `u` in place. `right_ratio` in [0, 1] sets the right boundary row.
  void apply(std::span<double> u, double right_ratio);

  bool upwinded() const noexcept { return upwind_; }

 private:
  std::size_t n_;
  double lower_;
  double diag_;
  double upper_;
  double r_;   // h kappa / (2 dx^2)
  double s_;   // h drift / (2 dx)
  bool upwind_ = false;
  std::vector<double> cprime_;     // forward-sweep coefficients for rows 0..n-2
  std::vector<double> inv_denom_;  // 1 / pivot for rows 0..n-2
  std::vector<double> rhs_;
};

/// Plain Thomas solve of a general tridiagonal system; `rhs` is overwritten with
/// the solution. lower[0] and upper[n-1] are ignored.
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag, std::span<const double> upper,
                       std::span<double> rhs);

}  // namespace stokpp
