#pragma once

// Scalar building blocks shared by the SDE and SPDE integrators. Both routes
// must evaluate these exactly the same way so that spatially flat SPDE runs
// reproduce the scalar SDE bit for bit.

#include <cmath>

#include "stokpp/noise.hpp"

namespace stokpp::scheme {

/// Growth factors of the logistic flow over one step of length rate * dt.
struct LogisticStep {
  double growth;     ///< e^{rate dt}
  double growth_m1;  ///< e^{rate dt} - 1

  explicit LogisticStep(double rate_dt) : growth(std::exp(rate_dt)), growth_m1(std::expm1(rate_dt)) {}
};

/// Exact solution of u' = rate * u(1 - u) after one step.
inline double logistic(double u, const LogisticStep& s) { return u * s.growth / (1.0 + u * s.growth_m1); }

/// Log-drift added to the noise exponent: the Ito correction -eps^2 Gamma(0) dt / 2,
/// cancelled exactly by the Stratonovich conversion drift.
inline double noise_log_drift(double epsilon, double gamma0, double dt, Interpretation interp) {
  return interp == Interpretation::ito ? -0.5 * epsilon * epsilon * gamma0 * dt : 0.0;
}

/// Exact geometric factor for du = eps u dW over one step.
inline double noise_factor(double epsilon, double increment, double log_drift) {
  return std::exp(epsilon * increment + log_drift);
}

}  // namespace stokpp::scheme
