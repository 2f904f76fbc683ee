#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stokpp/grid_field.hpp"
#include "stokpp/logistic_sde.hpp"
#include "stokpp/noise.hpp"
#include "stokpp/tridiagonal.hpp"

namespace stokpp {

/// Moving-window policy: once the front (where the profile drops below
/// `level` times its left value) passes `trigger` of the window, shift so it
/// sits at `target`.
struct FrameOptions {
  bool enabled = true;
  double trigger = 0.6;
  double target = 0.4;
  double level = 0.5;
};

/// Scalars of the stochastic KPP problem plus discretization settings.
struct KppParams {
  double kappa = 1.0;        ///< diffusion coefficient
  double epsilon = 0.0;      ///< noise amplitude
  double N = 1.0;            ///< initial exponential decay rate
  NoiseModel noise;          ///< kernel, interpretation, seed, stream
  double dt = 0.01;
  double drift_shift = 0.0;  ///< co-moving frame speed (adds drift_shift * u_x)
  FrameOptions frame;

  void validate() const;
  /// Non-fatal advice (dt > dx, upwinded drift term, ...).
  std::vector<std::string> warnings(const GridSpec& grid) const;
};

struct SolverState {
  Field field;
  std::int64_t step = 0;
  double v_current = 1.0;  ///< reaction coefficient of the last normalized step
};

/// Strang-split integrator. The SPDE step is half a backward-Euler diffusion
/// step, the exact logistic flow, the exact multiplicative noise factor, and
/// another half diffusion step; every substep preserves positivity. The
/// normalized step replaces the noise by a time-dependent reaction rate v(t).
class KppSolver {
 public:
  KppSolver(const KppParams& params, Field initial);

  const SolverState& state() const noexcept { return state_; }
  const Field& field() const noexcept { return state_.field; }
  const KppParams& params() const noexcept { return params_; }
  double time() const noexcept { return state_.field.time; }
  std::int64_t shifts() const noexcept { return shifts_; }

  /// SPDE step drawing from the solver's own noise stream.
  void step_spde();
  /// SPDE step with supplied increments: one value (shared by every node) or
  /// one per node.
  void step_spde(std::span<const double> increments);
  /// Step of the normalized random PDE with reaction coefficient v.
  void step_normalized(double v);

 private:
  void diffuse_half();
  void finish_step();
  void recenter();

  KppParams params_;
  SolverState state_;
  ImplicitDiffusion diffusion_;
  std::unique_ptr<FieldNoise> noise_;
  std::vector<double> increments_;
  double gamma0_;
  std::int64_t shifts_ = 0;
};

/// Default window: `length` space units with the initial front at 40% of it.
GridSpec default_grid(double length = 200.0, double dx = 0.05);

/// Called with the current field and the v used for the last step.
using FieldObserver = std::function<void(const Field&, double v)>;

/// Solves the normalized PDE along `v_path` up to time T, calling `observe`
/// at t = 0 and every `stride` time units. Throws MisuseError if the path is
/// shorter than T.
void run_normalized(const SdePath& v_path, const KppParams& params, const GridSpec& grid, double T, double stride,
                    const FieldObserver& observe);

/// Snapshots of the normalized solution at the requested times.
std::vector<Field> solve_normalized(const SdePath& v_path, const KppParams& params, const GridSpec& grid, double T,
                                    std::span<const double> times);

/// Runs the SPDE (scalar noise) and the normalized PDE on one shared Wiener
/// path and returns max |u - v u~| / (v u~ + 1e-12) over all steps and nodes.
/// `v_noise` must name the same (seed, stream) as params.noise.
double verify_factorization(const KppParams& params, const GridSpec& grid, double T, const NoiseModel& v_noise);
double verify_factorization(const KppParams& params, const GridSpec& grid, double T);

}  // namespace stokpp
