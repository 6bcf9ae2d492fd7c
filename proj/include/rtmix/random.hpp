#pragma once

#include <cstdint>
#include <random>

namespace rtmix {

using Rng = std::mt19937_64;

// Seed streams. Every random quantity in a run is derived from one master
// seed as derive_seed(master, stream, index), so chains, folds and
// replicates draw from independent, reproducible generators.
enum class SeedStream : std::uint64_t {
  Chain = 1,
  Fold = 2,
  FoldPlan = 3,
  Replicate = 4,
  Predictive = 5,
  Simulation = 6,
  Selection = 7,
};

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, SeedStream stream,
                                 std::uint64_t index) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  return splitmix64(h ^ index);
}

}  // namespace rtmix
