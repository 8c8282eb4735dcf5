#pragma once

#include <complex>
#include <vector>

#include "twolaw/hilbert.hpp"

namespace twolaw {

/// Iterative radix-2 complex FFT for power-of-two sizes. Forward uses the
/// e^{-ikx} convention; inverse includes the 1/N factor. Plans are immutable
/// after construction and safe to share across threads.
class Fft {
 public:
  explicit Fft(int n);

  int size() const { return n_; }
  void forward(VectorXcd& data) const { transform(data, false); }
  void inverse(VectorXcd& data) const;

  /// FFT frequency k for bin j on a ring of circumference length (2 pi j / L
  /// folded to the symmetric interval).
  static double frequency(int j, int n, double length);

 private:
  void transform(VectorXcd& data, bool invert) const;

  int n_;
  std::vector<int> rev_;
  std::vector<Complex> twiddle_;  // forward twiddles, conjugated for inverse
};

}  // namespace twolaw
