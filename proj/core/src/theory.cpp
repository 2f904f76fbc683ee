#include "stokpp/theory.hpp"

#include <cmath>
#include <limits>

#include "stokpp/errors.hpp"

namespace stokpp {
namespace {

void check(double kappa, double N) {
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (!(N > 0.0)) throw ConfigError("N must be positive");
}

// Speed and decay of a front whose flat part grows at mean rate v_bar. The
// tail keeps the initial rate N when it is slower than the critical rate;
// the speed follows from the tail rate through v_bar/theta + kappa theta/2.
TheoryPrediction kpp_branch(Regime regime, double kappa, double N, double v_bar) {
  TheoryPrediction p;
  p.regime = regime;
  p.v_bar = v_bar;
  p.threshold = std::sqrt(2.0 * v_bar / kappa);
  const double theta = std::min(N, p.threshold);
  p.decay = theta;
  p.speed = N >= p.threshold ? std::sqrt(2.0 * kappa * v_bar) : v_bar / theta + 0.5 * kappa * theta;
  return p;
}

}  // namespace

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::ito_scalar: return "ito_scalar";
    case Regime::stratonovich_scalar: return "stratonovich_scalar";
    case Regime::ito_correlated: return "ito_correlated";
  }
  return "?";
}

Regime parse_regime(const std::string& s) {
  if (s == "ito_scalar" || s == "ito") return Regime::ito_scalar;
  if (s == "stratonovich_scalar" || s == "strat_scalar" || s == "strat" || s == "stratonovich") {
    return Regime::stratonovich_scalar;
  }
  if (s == "ito_correlated" || s == "correlated") return Regime::ito_correlated;
  throw ConfigError("unknown regime '" + s + "'");
}

TheoryPrediction ito_scalar_prediction(double kappa, double epsilon, double N) {
  check(kappa, N);
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
  const double half_eps2 = 0.5 * epsilon * epsilon;
  if (half_eps2 >= 1.0) {
    TheoryPrediction p;
    p.regime = Regime::ito_scalar;
    p.threshold = 0.0;
    return p;
  }
  return kpp_branch(Regime::ito_scalar, kappa, N, 1.0 - half_eps2);
}

TheoryPrediction stratonovich_scalar_prediction(double kappa, double N) {
  check(kappa, N);
  return kpp_branch(Regime::stratonovich_scalar, kappa, N, 1.0);
}

TheoryPrediction correlated_prediction(double kappa, double N) {
  check(kappa, N);
  return kpp_branch(Regime::ito_correlated, kappa, N, 1.0);
}

TheoryPrediction predict(Regime regime, double kappa, double epsilon, double N) {
  switch (regime) {
    case Regime::ito_scalar: return ito_scalar_prediction(kappa, epsilon, N);
    case Regime::stratonovich_scalar: return stratonovich_scalar_prediction(kappa, N);
    case Regime::ito_correlated: return correlated_prediction(kappa, N);
  }
  throw ConfigError("unknown regime");
}

std::optional<std::pair<double, double>> dispersion_roots(double kappa, double gamma) {
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
  const double half_b = gamma / kappa;
  double disc = half_b * half_b - 2.0 / kappa;
  // Rounding of gamma = sqrt(2 kappa) leaves a residue of a few ulps.
  const double slack = 8.0 * std::numeric_limits<double>::epsilon() * (half_b * half_b + 2.0 / kappa);
  if (disc < 0.0) {
    if (-disc > slack) return std::nullopt;
    disc = 0.0;
  } else if (disc <= slack) {
    disc = 0.0;
  }
  const double root = std::sqrt(disc);
  return std::pair{half_b - root, half_b + root};
}

double w_covariance_prediction(const CovarianceKernel& kernel, double kappa, double epsilon, double mu, double lag) {
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
  return mu * mu + epsilon * epsilon / kappa * kernel_eval(kernel, lag);
}

}  // namespace stokpp
