#include "discus/engine/codes.hpp"

#include <random>

#include "discus/core/error.hpp"
#include "discus/core/types.hpp"

namespace discus {

void CodeVectors::validate() const {
  if (static_channels < 1 || frames < 1 || ny < 1 || nx < 1) throw DimensionError("code vectors have empty extents");
  if (z_static.size() != static_cast<std::size_t>(static_channels) * pixels())
    throw DimensionError("static code has the wrong size");
  if (z_dynamic.size() != static_cast<std::size_t>(frames) * pixels())
    throw DimensionError("dynamic codes have the wrong size");
  if (!all_finite(std::span<const float>(z_static)) || !all_finite(std::span<const float>(z_dynamic)))
    throw NonFiniteError("code vectors contain non-finite values");
}

CodeVectors random_codes(int static_channels, int frames, int ny, int nx, double stddev, std::uint64_t seed) {
  if (!(stddev >= 0.0)) throw ConfigError("code standard deviation must be non-negative");
  CodeVectors z;
  z.static_channels = static_channels;
  z.frames = frames;
  z.ny = ny;
  z.nx = nx;
  if (static_channels < 1 || frames < 1 || ny < 1 || nx < 1) throw DimensionError("code vectors have empty extents");
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> d(0.0f, static_cast<float>(stddev));
  z.z_static.resize(static_cast<std::size_t>(static_channels) * z.pixels());
  z.z_dynamic.resize(static_cast<std::size_t>(frames) * z.pixels());
  for (auto& v : z.z_static) v = d(rng);
  for (auto& v : z.z_dynamic) v = d(rng);
  return z;
}

}  // namespace discus
