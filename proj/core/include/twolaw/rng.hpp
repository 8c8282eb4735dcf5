#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "twolaw/errors.hpp"

namespace twolaw {

/// Counter-based PRNG (Philox-style 4x64, 10 rounds).
///
/// Each stream is keyed by (master_seed, stream_index), so trajectory i of a
/// run is a pure function of the master seed and i regardless of how work is
/// scheduled across threads. Distinct keys index distinct permutations of the
/// 256-bit counter space, so streams never overlap.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t master_seed, std::uint64_t stream_index)
      : key0_(master_seed), key1_(stream_index) {
    refill();
  }

  std::uint64_t next_u64() {
    if (pos_ == 4) {
      advance_counter();
      refill();
    }
    return out_[pos_++];
  }

  std::uint64_t operator()() { return next_u64(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() {
    return std::numeric_limits<std::uint64_t>::max();
  }

  /// Uniform double in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Exponential variate with the given rate; rate == 0 yields +infinity.
  double exponential(double rate) {
    if (rate < 0.0) throw InvariantError("exponential: negative rate");
    if (rate == 0.0) return std::numeric_limits<double>::infinity();
    return -std::log1p(-uniform01()) / rate;
  }

  /// Index draw from nonnegative weights (renormalized by their sum).
  /// Weights summing to ~zero is reported as an internal error.
  template <typename Vec>
  int pick_discrete(const Vec& weights) {
    double total = 0.0;
    for (int i = 0; i < static_cast<int>(weights.size()); ++i)
      total += weights[i];
    if (!(total > 0.0))
      throw NumericsError("pick_discrete: weights sum to zero");
    const double u = uniform01() * total;
    double acc = 0.0;
    int last_positive = 0;
    for (int i = 0; i < static_cast<int>(weights.size()); ++i) {
      if (weights[i] > 0.0) last_positive = i;
      acc += weights[i];
      if (u < acc) return i;
    }
    return last_positive;
  }

 private:
  static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ull;
  static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ull;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

  static void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                      std::uint64_t& lo) {
    const unsigned __int128 p =
        static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(b);
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
  }

  void advance_counter() {
    if (++ctr_[0] != 0) return;
    if (++ctr_[1] != 0) return;
    if (++ctr_[2] != 0) return;
    ++ctr_[3];
  }

  void refill() {
    std::uint64_t c0 = ctr_[0], c1 = ctr_[1], c2 = ctr_[2], c3 = ctr_[3];
    std::uint64_t k0 = key0_, k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      std::uint64_t hi0, lo0, hi1, lo1;
      mulhilo(kMul0, c0, hi0, lo0);
      mulhilo(kMul1, c2, hi1, lo1);
      const std::uint64_t n0 = hi1 ^ c1 ^ k0;
      const std::uint64_t n1 = lo1;
      const std::uint64_t n2 = hi0 ^ c3 ^ k1;
      const std::uint64_t n3 = lo0;
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    out_[0] = c0;
    out_[1] = c1;
    out_[2] = c2;
    out_[3] = c3;
    pos_ = 0;
  }

  std::uint64_t key0_ = 0;
  std::uint64_t key1_ = 0;
  std::uint64_t ctr_[4] = {0, 0, 0, 0};
  std::uint64_t out_[4] = {0, 0, 0, 0};
  int pos_ = 0;
};

}  // namespace twolaw
