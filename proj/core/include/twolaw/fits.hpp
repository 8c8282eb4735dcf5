#pragma once

#include <span>
#include <vector>

namespace twolaw {

/// Ordinary (or weighted) least squares y = intercept + slope * x.
struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_stderr = 0.0;
  double r_squared = 0.0;
  int n = 0;
};

LinearFit fit_linear(std::span<const double> x, std::span<const double> y);
LinearFit fit_linear_weighted(std::span<const double> x,
                              std::span<const double> y,
                              std::span<const double> w);

/// Fit y = a * exp(rate * t) through log-linear regression; y must be > 0.
/// Returns the rate (slope of ln y).
LinearFit fit_log_linear(std::span<const double> t, std::span<const double> y);

/// One-sample Kolmogorov-Smirnov statistic against Exp(rate).
/// `samples` need not be sorted.
double ks_statistic_exponential(std::vector<double> samples, double rate);

}  // namespace twolaw
