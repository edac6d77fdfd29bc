#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mbf {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to turn structured keys into well-mixed seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Folds a base seed and a list of integer keys into one seed.
/// mix(base, {a, b, c}) = splitmix64(...splitmix64(splitmix64(base) ^ a)... ^ c)
constexpr std::uint64_t mix_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(base);
  for (auto k : keys) h = splitmix64(h ^ k);
  return h;
}

}  // namespace mbf
