#include "twolaw/fits.hpp"

#include <algorithm>
#include <cmath>

#include "twolaw/errors.hpp"
#include "twolaw/stats.hpp"

namespace twolaw {

LinearFit fit_linear_weighted(std::span<const double> x,
                              std::span<const double> y,
                              std::span<const double> w) {
  if (x.size() != y.size() || x.size() != w.size())
    throw DimensionError("fit_linear: size mismatch");
  const int n = static_cast<int>(x.size());
  if (n < 2) throw InvariantError("fit_linear: need at least 2 points");

  KahanSum sw, swx, swy;
  for (int i = 0; i < n; ++i) {
    sw.add(w[i]);
    swx.add(w[i] * x[i]);
    swy.add(w[i] * y[i]);
  }
  const double W = sw.value();
  const double xbar = swx.value() / W;
  const double ybar = swy.value() / W;

  KahanSum sxx, sxy;
  for (int i = 0; i < n; ++i) {
    sxx.add(w[i] * (x[i] - xbar) * (x[i] - xbar));
    sxy.add(w[i] * (x[i] - xbar) * (y[i] - ybar));
  }
  LinearFit fit;
  fit.n = n;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = ybar - fit.slope * xbar;

  KahanSum ssr, sst;
  for (int i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ssr.add(w[i] * r * r);
    sst.add(w[i] * (y[i] - ybar) * (y[i] - ybar));
  }
  fit.r_squared = sst.value() > 0.0 ? 1.0 - ssr.value() / sst.value() : 1.0;
  if (n > 2)
    fit.slope_stderr =
        std::sqrt(ssr.value() / (static_cast<double>(n - 2) * sxx.value()));
  return fit;
}

LinearFit fit_linear(std::span<const double> x, std::span<const double> y) {
  std::vector<double> w(x.size(), 1.0);
  return fit_linear_weighted(x, y, w);
}

LinearFit fit_log_linear(std::span<const double> t, std::span<const double> y) {
  std::vector<double> logs(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] > 0.0))
      throw InvariantError("fit_log_linear: nonpositive sample");
    logs[i] = std::log(y[i]);
  }
  return fit_linear(t, logs);
}

double ks_statistic_exponential(std::vector<double> samples, double rate) {
  if (samples.empty()) throw InvariantError("ks: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = 1.0 - std::exp(-rate * samples[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(std::abs(cdf - lo), std::abs(hi - cdf)));
  }
  return d;
}

}  // namespace twolaw
