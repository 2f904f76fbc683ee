#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "stokpp/errors.hpp"
#include "stokpp/tridiagonal.hpp"

using namespace stokpp;

namespace {

// Backward-Euler step assembled as a dense system: zero-flux row, interior
// rows (I - h L) u_new = u_old, exponential-continuation row.
std::vector<double> dense_step(const std::vector<double>& u, double dx, double kappa, double drift, double h,
                               double ratio) {
  const auto n = static_cast<Eigen::Index>(u.size());
  const double r = h * kappa / (2 * dx * dx);
  const double s = h * drift / (2 * dx);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  A(0, 0) = 1.0;
  A(0, 1) = -1.0;
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    A(i, i - 1) = -(r - s);
    A(i, i) = 1.0 + 2.0 * r;
    A(i, i + 1) = -(r + s);
    b(i) = u[static_cast<std::size_t>(i)];
  }
  A(n - 1, n - 1) = 1.0;
  A(n - 1, n - 2) = -ratio;
  const Eigen::VectorXd x = A.fullPivLu().solve(b);
  return {x.data(), x.data() + n};
}

}  // namespace

TEST_CASE("Thomas solve against a dense solve") {
  const std::size_t n = 12;
  std::vector<double> lo(n), di(n), up(n), rhs(n);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = -0.3 - 0.01 * i;
    up[i] = -0.5 + 0.02 * i;
    di[i] = 2.0 + 0.1 * i;
    rhs[i] = std::sin(static_cast<double>(i));
    const auto k = static_cast<Eigen::Index>(i);
    A(k, k) = di[i];
    if (i > 0) A(k, k - 1) = lo[i];
    if (i + 1 < n) A(k, k + 1) = up[i];
    b(k) = rhs[i];
  }
  const Eigen::VectorXd x = A.partialPivLu().solve(b);
  solve_tridiagonal(lo, di, up, rhs);
  for (std::size_t i = 0; i < n; ++i) CHECK(rhs[i] == doctest::Approx(x(static_cast<Eigen::Index>(i))).epsilon(1e-12));
  std::vector<double> short_rhs(3);
  CHECK_THROWS_AS(solve_tridiagonal(lo, di, up, short_rhs), MisuseError);
}

TEST_CASE("implicit diffusion matches the dense backward-Euler system") {
  const std::size_t n = 40;
  const double dx = 0.1, kappa = 1.3, h = 0.02;
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = 1.0 / (1.0 + std::exp(0.4 * (static_cast<double>(i) - 15.0)));
  for (double drift : {0.0, 0.7, -0.4}) {
    for (double ratio : {1.0, 0.93, 0.0}) {
      auto a = u;
      ImplicitDiffusion d(n, dx, kappa, drift, h);
      CHECK_FALSE(d.upwinded());
      d.apply(a, ratio);
      const auto b = dense_step(u, dx, kappa, drift, h, ratio);
      for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("constant profiles are reproduced exactly") {
  std::vector<double> u(25, 0.37);
  ImplicitDiffusion d(u.size(), 0.05, 1.0, 0.8, 0.005);
  for (int k = 0; k < 100; ++k) d.apply(u, 1.0);
  for (double v : u) CHECK(v == 0.37);
}

TEST_CASE("positivity and monotonicity survive large steps and strong drift") {
  const std::size_t n = 60;
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = i < 20 ? 1.0 : std::exp(-3.0 * (static_cast<double>(i) - 20.0) * 0.05);
  ImplicitDiffusion d(n, 0.05, 0.5, 40.0, 0.05);
  CHECK(d.upwinded());
  for (int k = 0; k < 50; ++k) {
    d.apply(u, std::exp(-3.0 * 0.05));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(u[i] >= 0.0);
      if (i) CHECK(u[i] <= u[i - 1] + 1e-14);
    }
  }
}

TEST_CASE("misuse") {
  CHECK_THROWS_AS(ImplicitDiffusion(2, 0.1, 1.0, 0.0, 0.01), MisuseError);
  ImplicitDiffusion d(5, 0.1, 1.0, 0.0, 0.01);
  std::vector<double> u(4, 1.0);
  CHECK_THROWS_AS(d.apply(u, 1.0), MisuseError);
}
