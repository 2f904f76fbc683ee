#pragma once

#include <optional>
#include <string>
#include <utility>

#include "stokpp/noise.hpp"

namespace stokpp {

enum class Regime { ito_scalar, stratonovich_scalar, ito_correlated };

std::string to_string(Regime regime);
/// Accepts ito_scalar, stratonovich_scalar (or strat_scalar), ito_correlated
/// (or correlated).
Regime parse_regime(const std::string& s);

/// Closed-form asymptotic speed and tail decay of the front.
struct TheoryPrediction {
  Regime regime = Regime::ito_scalar;
  std::optional<double> speed;  ///< nullopt iff the front degenerates
  std::optional<double> decay;
  std::optional<double> v_bar;  ///< long-run mean of the flat logistic factor
  double threshold = 0.0;       ///< N at which the speed formula changes branch

  bool degenerate() const noexcept { return !speed.has_value(); }
};

/// Scalar Wiener noise, Ito: v_bar = 1 - eps^2/2, decay = min(N, sqrt(2 v_bar / kappa)),
/// speed = v_bar / decay + kappa decay / 2. Degenerate when eps >= sqrt(2).
TheoryPrediction ito_scalar_prediction(double kappa, double epsilon, double N);

/// Scalar Wiener noise, Stratonovich: the noiseless formulas for every eps.
TheoryPrediction stratonovich_scalar_prediction(double kappa, double N);

/// Integrable spatial covariance, Ito: the noiseless formulas for every eps.
TheoryPrediction correlated_prediction(double kappa, double N);

/// Dispatch on regime (epsilon is ignored outside ito_scalar).
TheoryPrediction predict(Regime regime, double kappa, double epsilon, double N);

/// Real roots of mu^2 - (2 gamma / kappa) mu + 2 / kappa = 0, smaller first;
/// nullopt when gamma < sqrt(2 kappa).
std::optional<std::pair<double, double>> dispersion_roots(double kappa, double gamma);

/// Predicted E[w(x) w(x + lag)] far ahead of the front, w = -(log u)_x:
/// mu^2 + (eps^2 / kappa) Gamma(lag).
double w_covariance_prediction(const CovarianceKernel& kernel, double kappa, double epsilon, double mu, double lag);

}  // namespace stokpp
