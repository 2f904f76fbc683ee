#include "stokpp/noise.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>

#include "stokpp/errors.hpp"

namespace stokpp {

// ---------------------------------------------------------------------------
// Kernels

CovarianceKernel CovarianceKernel::constant(double sigma2) {
  CovarianceKernel k;
  k.kind = KernelKind::constant;
  k.sigma2 = sigma2;
  k.validate();
  return k;
}

CovarianceKernel CovarianceKernel::squared_exponential(double sigma2, double length) {
  CovarianceKernel k;
  k.kind = KernelKind::squared_exponential;
  k.sigma2 = sigma2;
  k.length = length;
  k.validate();
  return k;
}

CovarianceKernel CovarianceKernel::tabulated(std::vector<double> lags, std::vector<double> values) {
  CovarianceKernel k;
  k.kind = KernelKind::tabulated;
  k.table_lags = std::move(lags);
  k.table_values = std::move(values);
  if (!k.table_values.empty()) k.sigma2 = k.table_values.front();
  k.validate();
  return k;
}

void CovarianceKernel::validate() const {
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw ConfigError("kernel: sigma2 must be >= 0");
  switch (kind) {
    case KernelKind::constant:
      break;
    case KernelKind::squared_exponential:
      if (!(length > 0.0) || !std::isfinite(length)) throw ConfigError("kernel: length must be > 0");
      break;
    case KernelKind::tabulated: {
      if (table_lags.size() < 2 || table_lags.size() != table_values.size()) {
        throw ConfigError("kernel table: need at least two (lag, gamma) rows");
      }
      if (table_lags.front() != 0.0) throw ConfigError("kernel table: first lag must be 0");
      for (std::size_t i = 1; i < table_lags.size(); ++i) {
        if (!(table_lags[i] > table_lags[i - 1])) throw ConfigError("kernel table: lags must increase");
      }
      for (double v : table_values) {
        if (!std::isfinite(v)) throw ConfigError("kernel table: non-finite value");
        if (std::abs(v) > table_values.front() * (1.0 + 1e-12)) {
          throw ConfigError("kernel table: |gamma(x)| exceeds gamma(0)");
        }
      }
      if (sigma2 != table_values.front()) throw ConfigError("kernel table: sigma2 must equal gamma(0)");
      break;
    }
  }
}

double kernel_eval(const CovarianceKernel& kernel, double x) {
  const double r = std::abs(x);
  switch (kernel.kind) {
    case KernelKind::constant:
      return kernel.sigma2;
    case KernelKind::squared_exponential: {
      const double s = r / kernel.length;
      return kernel.sigma2 * std::exp(-0.5 * s * s);
    }
    case KernelKind::tabulated: {
      const auto& lags = kernel.table_lags;
      const auto& vals = kernel.table_values;
      if (r > lags.back()) return 0.0;
      auto it = std::upper_bound(lags.begin(), lags.end(), r);
      if (it == lags.end()) return vals.back();
      const auto i = static_cast<std::size_t>(it - lags.begin());
      const double w = (r - lags[i - 1]) / (lags[i] - lags[i - 1]);
      return (1.0 - w) * vals[i - 1] + w * vals[i];
    }
  }
  return 0.0;
}

CovarianceKernel load_kernel_table(std::istream& in) {
  std::vector<double> lags;
  std::vector<double> vals;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double lag = 0.0;
    double val = 0.0;
    if (!(row >> lag >> val)) {
      if (lags.empty() && lineno == 1) continue;  // header
      throw ConfigError("kernel table: cannot parse line " + std::to_string(lineno));
    }
    lags.push_back(lag);
    vals.push_back(val);
  }
  return CovarianceKernel::tabulated(std::move(lags), std::move(vals));
}

CovarianceKernel load_kernel_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("kernel table: cannot open " + path);
  return load_kernel_table(in);
}

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::constant: return "constant";
    case KernelKind::squared_exponential: return "squared_exponential";
    case KernelKind::tabulated: return "tabulated";
  }
  return "?";
}

std::string to_string(Interpretation interp) {
  return interp == Interpretation::ito ? "ito" : "stratonovich";
}

KernelKind parse_kernel_kind(const std::string& s) {
  if (s == "constant") return KernelKind::constant;
  if (s == "squared_exponential" || s == "se") return KernelKind::squared_exponential;
  if (s == "tabulated") return KernelKind::tabulated;
  throw ConfigError("unknown noise.kind '" + s + "'");
}

Interpretation parse_interpretation(const std::string& s) {
  if (s == "ito") return Interpretation::ito;
  if (s == "strat" || s == "stratonovich") return Interpretation::stratonovich;
  throw ConfigError("unknown noise.interpretation '" + s + "'");
}

// ---------------------------------------------------------------------------
// Streams

Engine make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32),
                    0x6b707020u};
  return Engine(seq);
}

ScalarNoise::ScalarNoise(const NoiseModel& model, double dt)
    : engine_(make_engine(model.seed, model.stream_id)) {
  if (!(dt > 0.0)) throw MisuseError("scalar noise: dt must be positive");
  if (model.kernel.kind != KernelKind::constant) {
    throw MisuseError("scalar noise requires a constant kernel");
  }
  scale_ = std::sqrt(model.kernel.sigma2 * dt);
}

double ScalarNoise::next() { return scale_ * normal_(engine_); }

void ScalarNoise::fill(std::span<double> out) {
  for (auto& v : out) v = next();
}

std::vector<double> scalar_increments(const NoiseModel& model, double dt, std::size_t steps) {
  ScalarNoise gen(model, dt);
  std::vector<double> out(steps);
  gen.fill(out);
  return out;
}

// ---------------------------------------------------------------------------
// Correlated field

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr double kNegativeMassTolerance = 1e-6;
constexpr double kPadTolerance = 1e-12;
constexpr std::size_t kDenseLimit = 512;

}  // namespace

struct FieldNoise::Embedding {
  std::size_t ring = 0;
  std::vector<double> sqrt_eigen;  // sqrt(lambda_k / ring)
  double negative_mass = 0.0;
  fftw_complex* buffer = nullptr;
  fftw_plan plan = nullptr;
  std::vector<double> cached;  // imaginary-part sample awaiting use
  bool has_cached = false;

  ~Embedding() {
    std::lock_guard lock(planner_mutex());
    if (plan) fftw_destroy_plan(plan);
    if (buffer) fftw_free(buffer);
  }
};

struct FieldNoise::Dense {
  Eigen::MatrixXd factor;  // Q sqrt(D)
  Eigen::VectorXd z;
};

FieldNoise::FieldNoise(const NoiseModel& model, const GridSpec& grid, double dt, Method method)
    : engine_(make_engine(model.seed, model.stream_id)), n_(grid.n), sqrt_dt_(std::sqrt(dt)) {
  if (!(dt > 0.0)) throw MisuseError("field noise: dt must be positive");
  grid.validate();
  model.kernel.validate();

  if (model.kernel.kind == KernelKind::constant) {
    rank_one_ = true;
    scalar_scale_ = std::sqrt(model.kernel.sigma2 * dt);
    return;
  }

  double neg_mass = 0.0;
  if (method != Method::dense) {
    embedding_ = build_embedding(model.kernel, grid, neg_mass);
    if (embedding_) {
      embedding_->cached.resize(n_);
      return;
    }
    if (method == Method::embedding) {
      throw KernelNotRepresentableError("circulant embedding has negative spectral mass " +
                                        std::to_string(neg_mass));
    }
  }
  if (n_ > kDenseLimit) {
    const std::string limit = "grid of " + std::to_string(n_) + " nodes exceeds the dense limit of " +
                              std::to_string(kDenseLimit);
    if (method == Method::dense) throw KernelNotRepresentableError(limit);
    throw KernelNotRepresentableError("circulant embedding failed (negative mass " + std::to_string(neg_mass) +
                                      ") and " + limit);
  }

  Eigen::MatrixXd cov(n_, n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          kernel_eval(model.kernel, (static_cast<double>(i) - static_cast<double>(j)) * grid.dx);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw KernelNotRepresentableError("dense factorization failed");
  Eigen::VectorXd d = eig.eigenvalues();
  double neg = 0.0;
  double total = 0.0;
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    total += std::abs(d[k]);
    if (d[k] < 0.0) {
      neg += -d[k];
      d[k] = 0.0;
    }
  }
  if (total > 0.0 && neg / total > kNegativeMassTolerance) {
    throw KernelNotRepresentableError("kernel is not positive semi-definite on this grid");
  }
  dense_ = std::make_unique<Dense>();
  dense_->factor = eig.eigenvectors() * d.cwiseSqrt().asDiagonal();
  dense_->z.resize(static_cast<Eigen::Index>(n_));
}

FieldNoise::~FieldNoise() = default;
FieldNoise::FieldNoise(FieldNoise&&) noexcept = default;
FieldNoise& FieldNoise::operator=(FieldNoise&&) noexcept = default;

bool FieldNoise::uses_embedding() const noexcept { return embedding_ != nullptr; }
std::size_t FieldNoise::ring_size() const noexcept { return embedding_ ? embedding_->ring : 0; }
double FieldNoise::negative_mass() const noexcept { return embedding_ ? embedding_->negative_mass : 0.0; }

void FieldNoise::next(std::span<double> out) {
  if (out.size() != n_) throw MisuseError("field noise: output size does not match grid");
  if (rank_one_) {
    const double v = scalar_scale_ * normal_(engine_);
    std::fill(out.begin(), out.end(), v);
    return;
  }
  if (embedding_) {
    auto& e = *embedding_;
    if (e.has_cached) {
      std::copy(e.cached.begin(), e.cached.end(), out.begin());
      e.has_cached = false;
      return;
    }
    for (std::size_t k = 0; k < e.ring; ++k) {
      const double re = normal_(engine_);
      const double im = normal_(engine_);
      e.buffer[k][0] = e.sqrt_eigen[k] * re;
      e.buffer[k][1] = e.sqrt_eigen[k] * im;
    }
    fftw_execute(e.plan);
    for (std::size_t j = 0; j < n_; ++j) {
      out[j] = sqrt_dt_ * e.buffer[j][0];
      e.cached[j] = sqrt_dt_ * e.buffer[j][1];
    }
    e.has_cached = true;
    return;
  }
  auto& d = *dense_;
  for (Eigen::Index k = 0; k < d.z.size(); ++k) d.z[k] = normal_(engine_);
  Eigen::Map<Eigen::VectorXd> dst(out.data(), static_cast<Eigen::Index>(n_));
  dst.noalias() = sqrt_dt_ * (d.factor * d.z);
}

std::vector<double> field_increments(const NoiseModel& model, const GridSpec& grid, double dt) {
  FieldNoise gen(model, grid, dt);
  std::vector<double> out(grid.n);
  gen.next(out);
  return out;
}

// Returns nullptr when the spectrum carries too much negative mass.
std::unique_ptr<FieldNoise::Embedding> FieldNoise::build_embedding(const CovarianceKernel& kernel,
                                                                   const GridSpec& grid, double& negative_mass_out) {
  const std::size_t base = grid.n - 1;
  const double gamma0 = std::max(kernel_eval(kernel, 0.0), 1e-300);
  std::size_t half = base;
  while (std::abs(kernel_eval(kernel, static_cast<double>(half) * grid.dx)) > kPadTolerance * gamma0 &&
         half < 8 * base) {
    half = std::min(8 * base, half + std::max<std::size_t>(1, base / 4));
  }
  const std::size_t ring = 2 * half;

  auto e = std::make_unique<Embedding>();
  e->ring = ring;
  {
    std::lock_guard lock(planner_mutex());
    e->buffer = fftw_alloc_complex(ring);
    e->plan = fftw_plan_dft_1d(static_cast<int>(ring), e->buffer, e->buffer, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  if (!e->buffer || !e->plan) throw KernelNotRepresentableError("FFT plan creation failed");

  // First row of the circulant matrix.
  for (std::size_t k = 0; k < ring; ++k) {
    const std::size_t lag = k <= half ? k : ring - k;
    e->buffer[k][0] = kernel_eval(kernel, static_cast<double>(lag) * grid.dx);
    e->buffer[k][1] = 0.0;
  }
  fftw_execute(e->plan);

  double neg = 0.0;
  double total = 0.0;
  e->sqrt_eigen.resize(ring);
  for (std::size_t k = 0; k < ring; ++k) {
    const double lambda = e->buffer[k][0];
    total += std::abs(lambda);
    if (lambda < 0.0) neg += -lambda;
    e->sqrt_eigen[k] = std::sqrt(std::max(lambda, 0.0) / static_cast<double>(ring));
  }
  e->negative_mass = total > 0.0 ? neg / total : 0.0;
  negative_mass_out = e->negative_mass;
  if (e->negative_mass > kNegativeMassTolerance) return nullptr;
  return e;
}

}  // namespace stokpp
