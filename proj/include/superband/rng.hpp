#pragma once

#include <cstdint>

namespace superband {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) for draw `index` of stream `stream` under `seed`.
/// Each draw is a pure function of its key, so parallel draws agree with
/// serial ones bit for bit.
constexpr double keyed_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  const std::uint64_t key = splitmix64(splitmix64(seed ^ (stream * 0xD1B54A32D192ED03ULL)) + index);
  return static_cast<double>(key >> 11) * 0x1.0p-53;
}

} // namespace superband
