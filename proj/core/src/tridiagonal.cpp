#include "stokpp/tridiagonal.hpp"

#include <cmath>

#include "stokpp/errors.hpp"

namespace stokpp {

ImplicitDiffusion::ImplicitDiffusion(std::size_t n, double dx, double kappa, double drift, double substep)
    : n_(n), cprime_(n), inv_denom_(n), rhs_(n) {
  if (n < 3) throw MisuseError("diffusion: need at least 3 nodes");
  r_ = substep * kappa / (2.0 * dx * dx);
  s_ = substep * drift / (2.0 * dx);

  // Central differencing keeps the M-matrix property only while r >= |s|.
  upwind_ = r_ < std::abs(s_);
  if (!upwind_) {
    lower_ = -(r_ - s_);
    diag_ = 1.0 + 2.0 * r_;
    upper_ = -(r_ + s_);
  } else if (s_ > 0.0) {
    lower_ = -r_;
    diag_ = 1.0 + 2.0 * r_ + 2.0 * s_;
    upper_ = -(r_ + 2.0 * s_);
  } else {
    lower_ = -(r_ - 2.0 * s_);
    diag_ = 1.0 + 2.0 * r_ - 2.0 * s_;
    upper_ = -r_;
  }

  // Row 0: u0 - u1 = 0 after the step (zero flux).
  inv_denom_[0] = 1.0;
  cprime_[0] = -1.0;
  for (std::size_t i = 1; i + 1 < n_; ++i) {
    const double denom = diag_ - lower_ * cprime_[i - 1];
    inv_denom_[i] = 1.0 / denom;
    cprime_[i] = upper_ * inv_denom_[i];
  }
}

void ImplicitDiffusion::apply(std::span<double> u, double right_ratio) {
  if (u.size() != n_) throw MisuseError("diffusion: size mismatch");
  const std::size_t last = n_ - 1;
  double* rhs = rhs_.data();

  rhs[0] = u[1] - u[0];
  if (!upwind_) {
    for (std::size_t i = 1; i < last; ++i) {
      rhs[i] = r_ * ((u[i - 1] - 2.0 * u[i]) + u[i + 1]) + s_ * (u[i + 1] - u[i - 1]);
    }
  } else if (s_ > 0.0) {
    for (std::size_t i = 1; i < last; ++i) {
      rhs[i] = r_ * ((u[i - 1] - 2.0 * u[i]) + u[i + 1]) + 2.0 * s_ * (u[i + 1] - u[i]);
    }
  } else {
    for (std::size_t i = 1; i < last; ++i) {
      rhs[i] = r_ * ((u[i - 1] - 2.0 * u[i]) + u[i + 1]) - 2.0 * s_ * (u[i - 1] - u[i]);
    }
  }
  rhs[last] = right_ratio * u[last - 1] - u[last];

  // Forward sweep with the prefactored pivots; only the last row varies.
  rhs[0] *= inv_denom_[0];
  for (std::size_t i = 1; i < last; ++i) {
    rhs[i] = (rhs[i] - lower_ * rhs[i - 1]) * inv_denom_[i];
  }
  const double denom_last = 1.0 + right_ratio * cprime_[last - 1];
  rhs[last] = (rhs[last] + right_ratio * rhs[last - 1]) / denom_last;

  // Back substitution, accumulating the increment into u.
  double next = rhs[last];
  u[last] += next;
  for (std::size_t i = last; i-- > 0;) {
    next = rhs[i] - cprime_[i] * next;
    u[i] += next;
  }
}

void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag, std::span<const double> upper,
                       std::span<double> rhs) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n || n == 0) {
    throw MisuseError("solve_tridiagonal: size mismatch");
  }
  std::vector<double> cprime(n);
  cprime[0] = upper[0] / diag[0];
  rhs[0] /= diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double denom = diag[i] - lower[i] * cprime[i - 1];
    cprime[i] = upper[i] / denom;
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= cprime[i] * rhs[i + 1];
}

}  // namespace stokpp
