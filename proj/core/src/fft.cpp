#include "twolaw/fft.hpp"

#include <cmath>
#include <numbers>

#include "twolaw/errors.hpp"

namespace twolaw {

Fft::Fft(int n) : n_(n) {
  if (n < 2 || (n & (n - 1)) != 0)
    throw InvariantError("Fft: size must be a power of two >= 2");
  rev_.resize(static_cast<std::size_t>(n));
  int log2n = 0;
  while ((1 << log2n) < n) ++log2n;
  for (int i = 0; i < n; ++i) {
    int r = 0;
    for (int b = 0; b < log2n; ++b)
      if (i & (1 << b)) r |= 1 << (log2n - 1 - b);
    rev_[static_cast<std::size_t>(i)] = r;
  }
  twiddle_.resize(static_cast<std::size_t>(n / 2));
  for (int i = 0; i < n / 2; ++i) {
    const double ang = -2.0 * std::numbers::pi * i / n;
    twiddle_[static_cast<std::size_t>(i)] = Complex(std::cos(ang), std::sin(ang));
  }
}

void Fft::transform(VectorXcd& data, bool invert) const {
  if (static_cast<int>(data.size()) != n_)
    throw DimensionError("Fft: data size mismatch");
  for (int i = 0; i < n_; ++i) {
    const int j = rev_[static_cast<std::size_t>(i)];
    if (i < j) std::swap(data(i), data(j));
  }
  for (int len = 2; len <= n_; len <<= 1) {
    const int stride = n_ / len;
    for (int i = 0; i < n_; i += len) {
      for (int k = 0; k < len / 2; ++k) {
        Complex w = twiddle_[static_cast<std::size_t>(k * stride)];
        if (invert) w = std::conj(w);
        const Complex u = data(i + k);
        const Complex v = data(i + k + len / 2) * w;
        data(i + k) = u + v;
        data(i + k + len / 2) = u - v;
      }
    }
  }
}

void Fft::inverse(VectorXcd& data) const {
  transform(data, true);
  data /= static_cast<double>(n_);
}

double Fft::frequency(int j, int n, double length) {
  const int folded = j <= n / 2 - 1 ? j : j - n;
  return 2.0 * std::numbers::pi * folded / length;
}

}  // namespace twolaw
