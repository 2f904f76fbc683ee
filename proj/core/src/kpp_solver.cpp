#include "stokpp/kpp_solver.hpp"

#include <algorithm>
#include <cmath>

#include "stokpp/errors.hpp"
#include "stokpp/scheme.hpp"

namespace stokpp {

void KppParams::validate() const {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ConfigError("kappa must be positive");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be >= 0");
  if (!(N > 0.0) || !std::isfinite(N)) throw ConfigError("N must be positive");
  if (!(dt > 0.0) || dt > 0.1) throw ConfigError("dt must lie in (0, 0.1]");
  if (!std::isfinite(drift_shift)) throw ConfigError("drift_shift must be finite");
  if (frame.enabled && !(frame.target > 0.0 && frame.target < frame.trigger && frame.trigger < 1.0)) {
    throw ConfigError("frame: need 0 < target < trigger < 1");
  }
  if (frame.enabled && !(frame.level > 0.0 && frame.level < 1.0)) throw ConfigError("frame: level must be in (0,1)");
  noise.kernel.validate();
}

std::vector<std::string> KppParams::warnings(const GridSpec& grid) const {
  std::vector<std::string> out;
  if (dt > grid.dx) out.push_back("dt exceeds dx; dt <= dx is recommended");
  if (std::abs(drift_shift) > kappa / grid.dx) {
    out.push_back("drift_shift exceeds kappa/dx; the drift term is upwinded (first order)");
  }
  return out;
}

GridSpec default_grid(double length, double dx) { return GridSpec::window(-0.4 * length, length, dx); }

KppSolver::KppSolver(const KppParams& params, Field initial)
    : params_(params),
      diffusion_(initial.size(), initial.grid.dx, params.kappa, params.drift_shift, 0.5 * params.dt) {
  params_.validate();
  initial.validate();
  state_.field = std::move(initial);
  state_.step = 0;
  gamma0_ = kernel_eval(params_.noise.kernel, 0.0);
}

void KppSolver::diffuse_half() {
  auto& f = state_.field;
  const double ratio = std::exp(-fit_tail_rate(f) * f.grid.dx);
  diffusion_.apply(f.values, ratio);
}

void KppSolver::step_spde() {
  if (params_.epsilon == 0.0) {
    step_spde(std::span<const double>{});
    return;
  }
  if (!noise_) {
    noise_ = std::make_unique<FieldNoise>(params_.noise, state_.field.grid, params_.dt);
    increments_.resize(state_.field.size());
  }
  if (noise_->rank_one()) {
    noise_->next(increments_);
    step_spde(std::span<const double>(increments_.data(), 1));
  } else {
    noise_->next(increments_);
    step_spde(increments_);
  }
}

void KppSolver::step_spde(std::span<const double> increments) {
  auto& u = state_.field.values;
  const bool noisy = params_.epsilon != 0.0;
  if (noisy && increments.size() != 1 && increments.size() != u.size()) {
    throw MisuseError("step_spde: need one increment or one per node");
  }

  diffuse_half();

  const scheme::LogisticStep reaction(params_.dt);
  for (auto& x : u) x = scheme::logistic(x, reaction);

  if (noisy) {
    const double drift =
        scheme::noise_log_drift(params_.epsilon, gamma0_, params_.dt, params_.noise.interpretation);
    if (increments.size() == 1) {
      const double factor = scheme::noise_factor(params_.epsilon, increments[0], drift);
      for (auto& x : u) x *= factor;
    } else {
      for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] *= scheme::noise_factor(params_.epsilon, increments[i], drift);
      }
    }
  }

  diffuse_half();
  state_.v_current = 1.0;
  finish_step();
}

void KppSolver::step_normalized(double v) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("step_normalized: v must be finite and >= 0");
  diffuse_half();
  const scheme::LogisticStep reaction(v * params_.dt);
  for (auto& x : state_.field.values) x = scheme::logistic(x, reaction);
  diffuse_half();
  state_.v_current = v;
  finish_step();
}

void KppSolver::finish_step() {
  ++state_.step;
  auto& f = state_.field;
  f.time = static_cast<double>(state_.step) * params_.dt;
  if (params_.drift_shift != 0.0) f.grid.frame_offset += params_.drift_shift * params_.dt;

  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double x = f.values[i];
    if (!std::isfinite(x) || x < 0.0) {
      throw InstabilityError(std::isfinite(x) ? "negative value" : "non-finite value", state_.step,
                             static_cast<std::int64_t>(i));
    }
  }
  if (params_.frame.enabled) recenter();
}

void KppSolver::recenter() {
  auto& f = state_.field;
  const std::size_t n = f.size();
  const double threshold = params_.frame.level * f.values[0];
  const auto trigger = static_cast<std::size_t>(params_.frame.trigger * static_cast<double>(n - 1));
  std::size_t j = 0;
  while (j < n && f.values[j] >= threshold) ++j;
  if (j <= trigger || j >= n) return;
  const auto target = static_cast<std::size_t>(params_.frame.target * static_cast<double>(n - 1));
  const auto cells = static_cast<std::ptrdiff_t>(j - target);
  f = shift_frame(f, cells, f.values[0], fit_tail_rate(f));
  ++shifts_;
}

// ---------------------------------------------------------------------------

void run_normalized(const SdePath& v_path, const KppParams& params, const GridSpec& grid, double T, double stride,
                    const FieldObserver& observe) {
  if (std::abs(v_path.dt - params.dt) > 1e-12 * params.dt) {
    throw MisuseError("run_normalized: v path and solver use different dt");
  }
  const auto steps = static_cast<std::size_t>(std::llround(T / params.dt));
  if (v_path.steps() < steps) throw MisuseError("run_normalized: v path shorter than the horizon");
  const auto every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(stride / params.dt)));

  KppSolver solver(params, make_initial_condition(params.N, grid));
  if (observe) observe(solver.field(), v_path.values[0]);
  for (std::size_t k = 0; k < steps; ++k) {
    solver.step_normalized(v_path.values[k]);
    if (observe && ((k + 1) % every == 0 || k + 1 == steps)) observe(solver.field(), v_path.values[k]);
  }
}

std::vector<Field> solve_normalized(const SdePath& v_path, const KppParams& params, const GridSpec& grid, double T,
                                    std::span<const double> times) {
  std::vector<Field> out;
  std::vector<std::size_t> wanted;
  for (double t : times) wanted.push_back(static_cast<std::size_t>(std::llround(t / params.dt)));

  if (std::abs(v_path.dt - params.dt) > 1e-12 * params.dt) {
    throw MisuseError("solve_normalized: v path and solver use different dt");
  }
  const auto steps = static_cast<std::size_t>(std::llround(T / params.dt));
  if (v_path.steps() < steps) throw MisuseError("solve_normalized: v path shorter than the horizon");

  KppSolver solver(params, make_initial_condition(params.N, grid));
  auto capture = [&](std::size_t k) {
    for (std::size_t w : wanted) {
      if (w == k) out.push_back(solver.field());
    }
  };
  capture(0);
  for (std::size_t k = 0; k < steps; ++k) {
    solver.step_normalized(v_path.values[k]);
    capture(k + 1);
  }
  return out;
}

double verify_factorization(const KppParams& params, const GridSpec& grid, double T, const NoiseModel& v_noise) {
  if (params.noise.kernel.kind != KernelKind::constant) {
    throw MisuseError("verify_factorization: requires a constant kernel");
  }
  if (v_noise.seed != params.noise.seed || v_noise.stream_id != params.noise.stream_id) {
    throw MisuseError("verify_factorization: u and v routes must share one Wiener path");
  }
  KppParams p = params;
  p.frame.enabled = false;
  p.drift_shift = 0.0;
  p.validate();

  const auto steps = static_cast<std::size_t>(std::llround(T / p.dt));
  const auto increments = scalar_increments(p.noise, p.dt, steps);
  const auto v_path = simulate_v(p.epsilon, p.noise.interpretation, 1.0, p.dt, increments, p.noise.kernel.sigma2);

  const Field initial = make_initial_condition(p.N, grid);
  KppSolver full(p, initial);
  KppSolver normalized(p, initial);

  double worst = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    full.step_spde(std::span<const double>(&increments[k], 1));
    normalized.step_normalized(v_path.values[k]);
    const double v = v_path.values[k + 1];
    const auto& u = full.field().values;
    const auto& w = normalized.field().values;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double product = v * w[i];
      worst = std::max(worst, std::abs(u[i] - product) / (product + 1e-12));
    }
  }
  return worst;
}

double verify_factorization(const KppParams& params, const GridSpec& grid, double T) {
  return verify_factorization(params, grid, T, params.noise);
}

}  // namespace stokpp
