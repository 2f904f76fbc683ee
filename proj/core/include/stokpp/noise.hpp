#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "stokpp/grid_field.hpp"

namespace stokpp {

enum class KernelKind { constant, squared_exponential, tabulated };

/// Spatial covariance Gamma of the driving field. A constant kernel is one
/// Wiener process shared by every point.
struct CovarianceKernel {
  KernelKind kind = KernelKind::constant;
  double sigma2 = 1.0;  ///< Gamma(0)
  double length = 1.0;  ///< correlation length; unused for constant kernels
  std::vector<double> table_lags;    ///< tabulated: increasing, starting at 0
  std::vector<double> table_values;  ///< tabulated: Gamma at table_lags

  static CovarianceKernel constant(double sigma2 = 1.0);
  static CovarianceKernel squared_exponential(double sigma2, double length);
  static CovarianceKernel tabulated(std::vector<double> lags, std::vector<double> values);

  void validate() const;
};

/// Gamma(x). Symmetric in x; tabulated kernels interpolate linearly and are
/// zero beyond the last lag.
double kernel_eval(const CovarianceKernel& kernel, double x);

/// Two-column CSV (lag, gamma); a non-numeric first row is taken as a header.
CovarianceKernel load_kernel_table(std::istream& in);
CovarianceKernel load_kernel_table(const std::string& path);

enum class Interpretation { ito, stratonovich };

std::string to_string(KernelKind kind);
std::string to_string(Interpretation interp);
KernelKind parse_kernel_kind(const std::string& s);
Interpretation parse_interpretation(const std::string& s);

/// Everything needed to reproduce a noise sequence: (seed, stream_id) fixes
/// every draw.
struct NoiseModel {
  CovarianceKernel kernel;
  Interpretation interpretation = Interpretation::ito;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  NoiseModel with_stream(std::uint64_t stream) const {
    NoiseModel m = *this;
    m.stream_id = stream;
    return m;
  }
};

using Engine = std::mt19937_64;

/// Engine keyed by (seed, stream). Streams are derived through seed_seq
/// mixing, so any stream can be created directly without replaying others.
Engine make_engine(std::uint64_t seed, std::uint64_t stream_id);

/// Scalar Wiener increments, each Normal(0, sigma2 * dt).
class ScalarNoise {
 public:
  ScalarNoise(const NoiseModel& model, double dt);

  double next();
  void fill(std::span<double> out);

 private:
  Engine engine_;
  std::normal_distribution<double> normal_;
  double scale_;
};

/// Increments of the spatially correlated field on a grid: one call gives a
/// Gaussian vector with Cov[i, j] = dt * Gamma((i - j) dx).
class FieldNoise {
 public:
  enum class Method { automatic, embedding, dense };

  FieldNoise(const NoiseModel& model, const GridSpec& grid, double dt, Method method = Method::automatic);
  ~FieldNoise();
  FieldNoise(FieldNoise&&) noexcept;
  FieldNoise& operator=(FieldNoise&&) noexcept;
  FieldNoise(const FieldNoise&) = delete;
  FieldNoise& operator=(const FieldNoise&) = delete;

  void next(std::span<double> out);

  std::size_t size() const noexcept { return n_; }
  /// True when every entry is the same draw (constant kernel).
  bool rank_one() const noexcept { return rank_one_; }
  bool uses_embedding() const noexcept;
  std::size_t ring_size() const noexcept;
  /// Negative spectral mass of the embedding relative to its total (0 if unused).
  double negative_mass() const noexcept;

 private:
  struct Embedding;
  struct Dense;

  static std::unique_ptr<Embedding> build_embedding(const CovarianceKernel& kernel, const GridSpec& grid,
                                                    double& negative_mass_out);

  Engine engine_;
  std::normal_distribution<double> normal_;
  std::size_t n_;
  double sqrt_dt_;
  double scalar_scale_ = 0.0;
  bool rank_one_ = false;
  std::unique_ptr<Embedding> embedding_;
  std::unique_ptr<Dense> dense_;
};

/// `steps` scalar increments from the model's stream (kernel must be constant).
std::vector<double> scalar_increments(const NoiseModel& model, double dt, std::size_t steps);

/// One field increment from a fresh generator for the model's stream.
std::vector<double> field_increments(const NoiseModel& model, const GridSpec& grid, double dt);

}  // namespace stokpp
