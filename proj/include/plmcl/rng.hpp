#pragma once

#include "plmcl/types.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace plmcl {

// Seeded wrapper around std::mt19937_64. The engine is fully specified by the
// standard and the draw transforms below avoid std::*_distribution (whose
// output is implementation-defined), so identical seeds give identical
// streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53-bit resolution.
  Real uniform_real();

  // Uniform on [0, n); unbiased via rejection. n must be positive.
  Index uniform_index(Index n);

  // Standard normal via Box-Muller.
  Real normal();

  // Independent deterministic substream. Does not advance this stream, so
  // per-row draws can be derived in any order (or in parallel).
  Rng split(std::uint64_t key) const;

  // Fisher-Yates permutation of [0, n).
  std::vector<Index> permutation(Index n);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  Real spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace plmcl
