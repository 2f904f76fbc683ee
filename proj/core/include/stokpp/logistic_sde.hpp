#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "stokpp/noise.hpp"
#include "stokpp/stats.hpp"

namespace stokpp {

/// Sampled path of the spatially flat logistic SDE dv = v(1-v)dt + eps v dW.
/// values[k] is v at time k * dt.
struct SdePath {
  double dt = 0.01;
  double epsilon = 0.0;
  Interpretation interpretation = Interpretation::ito;
  std::vector<double> values;

  std::size_t steps() const noexcept { return values.empty() ? 0 : values.size() - 1; }
  double duration() const noexcept { return dt * static_cast<double>(steps()); }
};

/// Splitting scheme in log space: exact logistic flow, then the exact
/// geometric noise factor exp(eps dW - eps^2 Gamma(0) dt / 2) (Ito) or
/// exp(eps dW) (Stratonovich, i.e. Ito plus the conversion drift eps^2 v / 2).
/// Positive by construction. Throws InstabilityError once v exceeds 1e15.
SdePath simulate_v(double epsilon, Interpretation interp, double v0, double dt, std::size_t steps,
                   const NoiseModel& model);

/// Same scheme driven by supplied increments (variance gamma0 * dt each).
SdePath simulate_v(double epsilon, Interpretation interp, double v0, double dt,
                   std::span<const double> increments, double gamma0 = 1.0);

/// Stratonovich reference route: Heun midpoint in log space,
/// log v += (1 - v_mid) dt + eps dW with v_mid the average of v and its predictor.
SdePath simulate_v_midpoint(double epsilon, double v0, double dt, std::span<const double> increments);

/// `paths` independent paths on streams 0..paths-1 of `model`.
std::vector<SdePath> simulate_v_ensemble(double epsilon, Interpretation interp, double v0, double dt,
                                         std::size_t steps, const NoiseModel& model, std::size_t paths,
                                         unsigned jobs = 0);

/// Stationary mean 1 - eps^2/2 of the Ito equation; nullopt when eps >= sqrt(2)
/// (v tends to 0 almost surely).
std::optional<double> stationary_mean(double epsilon);

/// E[exp(lambda v)] under the stationary law: (1 - eps^2 lambda / 2)^(1 - 2/eps^2).
/// Throws DomainError for lambda >= 2/eps^2 or eps outside [0, sqrt(2)).
double stationary_laplace(double lambda, double epsilon);

/// Time average of v over t > burn_in.
double time_average(const SdePath& path, double burn_in);

/// Time-and-ensemble average of exp(lambda v(t)) over t > burn_in; the standard
/// error comes from the spread of per-path averages.
Estimate estimate_laplace(std::span<const SdePath> paths, double lambda, double burn_in);

}  // namespace stokpp
