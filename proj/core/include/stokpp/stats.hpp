#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stokpp {

/// A point estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Pairwise (cascade) summation; the result depends only on element order.
double pairwise_sum(std::span<const double> values);

double mean(std::span<const double> values);

/// Unbiased sample variance; zero for fewer than two samples.
double sample_variance(std::span<const double> values);

/// Mean and standard error of the mean (zero error for a single sample).
Estimate mean_estimate(std::span<const double> values);

/// Ordinary least squares y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;  ///< from residual variance, zero for an exact fit
  std::size_t count = 0;
};

LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

/// Normal 97.5% quantile used for confidence half-widths.
inline constexpr double kZ95 = 1.959963984540054;

}  // namespace stokpp
