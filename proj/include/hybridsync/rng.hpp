// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors

#pragma once

#include <cstdint>
#include <random>

namespace hybridsync {

std::uint64_t splitmix64(std::uint64_t x);

/// Seeded, splittable random stream. Children derived with split() are
/// independent of each other and of the order in which they are created,
/// which is what keeps replicas reproducible under any parallelism.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  RngStream split(std::uint64_t key) const;
  std::uint64_t seed() const { return seed_; }

  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();   // N(0, 1)

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hybridsync
