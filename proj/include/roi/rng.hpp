// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace roi {

/// Uniform double in [0, 1) from the top 53 bits; platform independent,
/// unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Mixes a base seed with a stream index (pixel, ROI, ...) into a new seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t salt = 0) {
  std::uint64_t z = seed ^ (stream * 0x9E3779B97F4A7C15ULL) ^ (salt * 0xD1B54A32D192ED03ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Per-ray generator keyed by (seed, pixel) so thread scheduling never changes output.
inline std::mt19937_64 ray_rng(std::uint64_t seed, std::uint64_t pixel, std::uint64_t salt = 0) {
  return std::mt19937_64(derive_seed(seed, pixel, salt));
}

}  // namespace roi
