#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <random>
#include <vector>

#include "mbf/seeding.hpp"

namespace mbf::detail {

template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
  std::shuffle(values.begin(), values.end(), rng);
}

/// Uniform integer in [lo, hi].
inline std::size_t uniform_between(std::size_t lo, std::size_t hi, Rng& rng) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// k distinct indices from [0, n), in draw order (partial Fisher-Yates).
inline std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  k = std::min(k, n);
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(idx[i], idx[uniform_between(i, n - 1, rng)]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace mbf::detail
