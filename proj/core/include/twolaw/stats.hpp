#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace twolaw {

/// Neumaier-compensated running sum.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Welford accumulator with Chan-style merge. Merging is associative only up
/// to rounding, so callers must merge partial results in a fixed order.
struct Moments {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n);
    const double nb = static_cast<double>(o.n);
    const double d = o.mean - mean;
    const double nt = na + nb;
    mean += d * nb / nt;
    m2 += o.m2 + d * d * na * nb / nt;
    n += o.n;
  }

  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
};

/// Fixed-bin histogram over [lo, hi); out-of-range samples go to the edges.
class Histogram {
 public:
  Histogram() = default;
  Histogram(double lo, double hi, int bins)
      : lo_(lo), hi_(hi), counts_(static_cast<std::size_t>(bins), 0) {}

  void add(double x) {
    if (counts_.empty()) return;
    const int nb = static_cast<int>(counts_.size());
    int b = static_cast<int>((x - lo_) / (hi_ - lo_) * nb);
    if (b < 0) b = 0;
    if (b >= nb) b = nb - 1;
    ++counts_[static_cast<std::size_t>(b)];
  }

  void merge(const Histogram& o) {
    if (counts_.size() != o.counts_.size()) {
      if (counts_.empty()) *this = o;
      return;
    }
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += o.counts_[i];
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<std::int64_t>& counts() const { return counts_; }

 private:
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::vector<std::int64_t> counts_;
};

}  // namespace twolaw
