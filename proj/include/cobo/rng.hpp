#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace cobo {

using Rng = std::mt19937_64;

/// Stream tags for deriving independent seeds from one base seed.
enum class Stream : std::uint64_t {
  warmup_points = 1,
  observation_noise = 2,
  fantasy_draws = 3,
  restarts = 4,
  repetition = 5,
};

/// Counter-based seed split: hashes (base, path...) with SplitMix64 so that
/// each (stream, index) pair gets an independent, reproducible seed.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path);

inline std::uint64_t derive_seed(std::uint64_t base, Stream stream, std::uint64_t index = 0) {
  return derive_seed(base, {static_cast<std::uint64_t>(stream), index});
}

}  // namespace cobo
