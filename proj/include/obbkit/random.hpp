// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace obbkit {

/// SplitMix64 stream: output n is mix(seed + (n + 1) * 0x9E3779B97F4A7C15).
/// Distributions are implemented here rather than with <random> so that
/// every platform produces the same sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller (one variate per call).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

  /// Independent child stream keyed by `stream`; does not advance this one.
  Rng split(std::uint64_t stream) const;

 private:
  std::uint64_t state_;
};

/// The SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

}  // namespace obbkit
