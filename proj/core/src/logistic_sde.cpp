#include "stokpp/logistic_sde.hpp"

#include <cmath>
#include <numbers>

#include "stokpp/errors.hpp"
#include "stokpp/parallel.hpp"
#include "stokpp/scheme.hpp"

namespace stokpp {
namespace {

constexpr double kOverflow = 1e15;

void check_inputs(double epsilon, double v0, double dt) {
  if (!(epsilon >= 0.0)) throw ConfigError("sde: epsilon must be >= 0");
  if (!(v0 > 0.0)) throw ConfigError("sde: v0 must be positive");
  if (!(dt > 0.0)) throw ConfigError("sde: dt must be positive");
}

}  // namespace

SdePath simulate_v(double epsilon, Interpretation interp, double v0, double dt, std::span<const double> increments,
                   double gamma0) {
  check_inputs(epsilon, v0, dt);
  SdePath path;
  path.dt = dt;
  path.epsilon = epsilon;
  path.interpretation = interp;
  path.values.resize(increments.size() + 1);
  path.values[0] = v0;

  const scheme::LogisticStep reaction(dt);
  const double drift = scheme::noise_log_drift(epsilon, gamma0, dt, interp);
  double v = v0;
  for (std::size_t k = 0; k < increments.size(); ++k) {
    v = scheme::logistic(v, reaction);
    v *= scheme::noise_factor(epsilon, increments[k], drift);
    if (!(v <= kOverflow)) throw InstabilityError("sde: v overflow", static_cast<std::int64_t>(k + 1));
    path.values[k + 1] = v;
  }
  return path;
}

SdePath simulate_v(double epsilon, Interpretation interp, double v0, double dt, std::size_t steps,
                   const NoiseModel& model) {
  check_inputs(epsilon, v0, dt);
  const auto increments = scalar_increments(model, dt, steps);
  return simulate_v(epsilon, interp, v0, dt, increments, model.kernel.sigma2);
}

SdePath simulate_v_midpoint(double epsilon, double v0, double dt, std::span<const double> increments) {
  check_inputs(epsilon, v0, dt);
  SdePath path;
  path.dt = dt;
  path.epsilon = epsilon;
  path.interpretation = Interpretation::stratonovich;
  path.values.resize(increments.size() + 1);
  path.values[0] = v0;

  double y = std::log(v0);
  double v = v0;
  for (std::size_t k = 0; k < increments.size(); ++k) {
    const double shock = epsilon * increments[k];
    const double predicted = std::exp(y + (1.0 - v) * dt + shock);
    const double v_mid = 0.5 * (v + predicted);
    y += (1.0 - v_mid) * dt + shock;
    v = std::exp(y);
    if (!(v <= kOverflow)) throw InstabilityError("sde: v overflow", static_cast<std::int64_t>(k + 1));
    path.values[k + 1] = v;
  }
  return path;
}

std::vector<SdePath> simulate_v_ensemble(double epsilon, Interpretation interp, double v0, double dt,
                                         std::size_t steps, const NoiseModel& model, std::size_t paths,
                                         unsigned jobs) {
  std::vector<SdePath> out(paths);
  parallel_for(paths, jobs, [&](std::size_t p) {
    out[p] = simulate_v(epsilon, interp, v0, dt, steps, model.with_stream(p));
  });
  return out;
}

std::optional<double> stationary_mean(double epsilon) {
  if (!(epsilon >= 0.0)) throw DomainError("stationary_mean: epsilon must be >= 0");
  const double half_eps2 = 0.5 * epsilon * epsilon;
  if (half_eps2 >= 1.0) return std::nullopt;
  return 1.0 - half_eps2;
}

double stationary_laplace(double lambda, double epsilon) {
  if (!(epsilon >= 0.0) || 0.5 * epsilon * epsilon >= 1.0) {
    throw DomainError("stationary_laplace: needs 0 <= epsilon < sqrt(2)");
  }
  if (epsilon == 0.0) return std::exp(lambda);  // degenerate law at v = 1
  const double e2 = epsilon * epsilon;
  const double base = 1.0 - 0.5 * e2 * lambda;
  if (!(base > 0.0)) throw DomainError("stationary_laplace: lambda >= 2/eps^2 diverges");
  return std::pow(base, 1.0 - 2.0 / e2);
}

double time_average(const SdePath& path, double burn_in) {
  std::vector<double> tail;
  tail.reserve(path.values.size());
  for (std::size_t k = 0; k < path.values.size(); ++k) {
    if (static_cast<double>(k) * path.dt > burn_in) tail.push_back(path.values[k]);
  }
  if (tail.empty()) throw MisuseError("time_average: burn-in covers the whole path");
  return mean(tail);
}

Estimate estimate_laplace(std::span<const SdePath> paths, double lambda, double burn_in) {
  if (paths.empty()) throw MisuseError("estimate_laplace: empty ensemble");
  std::vector<double> per_path;
  per_path.reserve(paths.size());
  std::vector<double> samples;
  for (const auto& path : paths) {
    if (!(burn_in < path.duration())) throw MisuseError("estimate_laplace: burn-in exceeds path duration");
    samples.clear();
    for (std::size_t k = 0; k < path.values.size(); ++k) {
      if (static_cast<double>(k) * path.dt > burn_in) samples.push_back(std::exp(lambda * path.values[k]));
    }
    per_path.push_back(mean(samples));
  }
  return mean_estimate(per_path);
}

}  // namespace stokpp
