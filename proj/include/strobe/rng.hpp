// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace strobe {

/// Seed for every stochastic operation. Identical seed + identical
/// operation parameters gives bit-identical output.
struct Seed {
  std::uint64_t value = 0;
  bool operator==(const Seed&) const = default;
};

/// Deterministic generator used by all stochastic operations.
///
/// The algorithm is fixed so sweeps replay byte-identically: mt19937_64
/// keyed directly with the seed value, uniform doubles from the top 53
/// bits of one draw, normals via Box-Muller (with the spare value cached).
/// None of the std::*_distribution adapters are used, so the streams are
/// stable across standard libraries as well.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(seed.value) {}

  /// Uniform in [0, 1).
  double uniform01();

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);

  /// Gaussian with the given mean and standard deviation.
  double normal(double mean, double sigma);

  /// Uniform integer in [0, n). n must be positive.
  std::uint32_t uniform_index(std::uint32_t n);

  /// True with probability p.
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Stable child seed for (base, tag): FNV-1a over the tag folded into the
/// base, then a splitmix64 finalizer. Lets any single sweep record be
/// regenerated in isolation.
Seed derive_seed(Seed base, std::string_view tag);

}  // namespace strobe
