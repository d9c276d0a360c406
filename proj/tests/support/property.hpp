#pragma once

// Seeded property loops: each trial gets its own generator so a failure
// report names a trial that can be replayed in isolation.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "doctest.h"

namespace stlf::test {

template <class Fn>
void for_trials(std::size_t trials, std::uint64_t seed, Fn&& fn) {
  for (std::size_t t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed * 1000003ULL + t);
    CAPTURE(t);
    fn(rng);
  }
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline std::vector<double> uniform_vec(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                                       double hi = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = uniform(rng, lo, hi);
  return v;
}

}  // namespace stlf::test
