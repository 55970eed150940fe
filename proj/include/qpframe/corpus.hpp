#pragma once

#include <cstdint>
#include <vector>

#include "qpframe/function.hpp"

namespace qpframe {

/// Deterministic 64-bit mixer; the corpus recurrence is pinned, so the same
/// (p, seed, count) produces byte-identical corpora on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4B9F9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

/// One random test function: 1-3 atoms, ball exponents in [-3, 2], center
/// and modulation digit depth at most 3, rational coefficients with
/// numerator in [-16, 16] \ {0} and denominator in [1, 16]. Never zero.
PFunction random_test_function(long p, SplitMix64& rng, bool zero_mean = false);

std::vector<PFunction> corpus_generate(long p, std::uint64_t seed,
                                       std::size_t count,
                                       bool zero_mean = false);

}  // namespace qpframe
