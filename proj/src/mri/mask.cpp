#include "discus/mri/mask.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "discus/core/error.hpp"

namespace discus {

SamplingMask::SamplingMask(int frames, int pe, double accel, int acs_lines, std::vector<std::uint8_t> pattern)
    : frames_(frames), pe_(pe), accel_(accel), acs_(acs_lines), pattern_(std::move(pattern)) {
  if (frames < 1 || pe < 1) throw DimensionError("mask needs frames >= 1 and PE >= 1");
  if (pattern_.size() != static_cast<std::size_t>(frames) * pe)
    throw DimensionError("mask pattern size does not match (frames, PE)");
  for (auto v : pattern_)
    if (v > 1) throw ConfigError("mask entries must be 0 or 1");
}

int SamplingMask::lines_in_frame(int t) const noexcept {
  const auto r = row(t);
  return static_cast<int>(std::count(r.begin(), r.end(), std::uint8_t{1}));
}

int SamplingMask::lines_per_frame(int pe, double accel) {
  if (!(accel >= 1.0)) throw ConfigError("acceleration must be >= 1");
  return static_cast<int>(std::lround(pe / accel));
}

SamplingMask SamplingMask::first_frames(int t) const {
  if (t < 1 || t > frames_) throw DimensionError("first_frames: frame count out of range");
  std::vector<std::uint8_t> p(pattern_.begin(), pattern_.begin() + static_cast<std::ptrdiff_t>(t) * pe_);
  return SamplingMask(t, pe_, accel_, acs_, std::move(p));
}

namespace {

void validate(int pe, double accel, int acs, int frames) {
  if (pe < 2) throw ConfigError("PE must be >= 2");
  if (frames < 1) throw ConfigError("frame count must be >= 1");
  if (acs < 0) throw ConfigError("ACS line count must be >= 0");
  if (!(accel >= 1.0)) throw ConfigError("acceleration must be >= 1");
  if (acs > pe / accel) throw ConfigError("infeasible mask: ACS lines exceed PE/R");
}

std::vector<int> outer_indices(int pe, int acs) {
  const int a0 = SamplingMask::acs_start(pe, acs);
  std::vector<int> outer;
  for (int i = 0; i < pe; ++i)
    if (i < a0 || i >= a0 + acs) outer.push_back(i);
  return outer;
}

}  // namespace

SamplingMask central_random_mask(int pe, double accel, int acs_lines, int frames, std::uint64_t seed) {
  validate(pe, accel, acs_lines, frames);
  const int total = std::min(pe, SamplingMask::lines_per_frame(pe, accel));
  const int a0 = SamplingMask::acs_start(pe, acs_lines);
  const auto outer = outer_indices(pe, acs_lines);
  const int n_outer = std::min<int>(total - acs_lines, static_cast<int>(outer.size()));

  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> pattern(static_cast<std::size_t>(frames) * pe, 0);
  std::vector<int> pool;
  for (int t = 0; t < frames; ++t) {
    std::uint8_t* row = pattern.data() + static_cast<std::size_t>(t) * pe;
    std::fill(row + a0, row + a0 + acs_lines, std::uint8_t{1});
    pool = outer;
    // Partial Fisher-Yates: the first n_outer entries are a uniform draw.
    for (int i = 0; i < n_outer; ++i) {
      std::uniform_int_distribution<int> pick(i, static_cast<int>(pool.size()) - 1);
      std::swap(pool[i], pool[pick(rng)]);
      row[pool[i]] = 1;
    }
  }
  return SamplingMask(frames, pe, accel, acs_lines, std::move(pattern));
}

SamplingMask gro_mask(int pe, int frames, double accel, int acs_lines, double density_power) {
  validate(pe, accel, acs_lines, frames);
  if (!(density_power >= 1.0)) throw ConfigError("GRO density power must be >= 1");
  const int total = std::min(pe, SamplingMask::lines_per_frame(pe, accel));
  const int a0 = SamplingMask::acs_start(pe, acs_lines);
  const auto outer = outer_indices(pe, acs_lines);
  const int n_outer_lines = static_cast<int>(outer.size());
  const int m = std::min(total - acs_lines, n_outer_lines);
  const double golden_step = pe * ((1.0 + std::sqrt(5.0)) / 2.0 - 1.0);

  std::vector<std::uint8_t> pattern(static_cast<std::size_t>(frames) * pe, 0);
  std::vector<std::uint8_t> used(n_outer_lines);
  for (int t = 0; t < frames; ++t) {
    std::uint8_t* row = pattern.data() + static_cast<std::size_t>(t) * pe;
    std::fill(row + a0, row + a0 + acs_lines, std::uint8_t{1});
    std::fill(used.begin(), used.end(), std::uint8_t{0});
    const double offset = std::fmod(t * golden_step, static_cast<double>(pe));
    for (int i = 0; i < m; ++i) {
      const double pos = std::fmod(offset + i * static_cast<double>(pe) / m, static_cast<double>(pe));
      const double v = 2.0 * pos / pe - 1.0;  // [-1, 1)
      const double w = std::copysign(std::pow(std::abs(v), density_power), v);
      int j = static_cast<int>(std::lround((w + 1.0) / 2.0 * (n_outer_lines - 1)));
      j = std::clamp(j, 0, n_outer_lines - 1);
      // Collision: take the nearest free outer line, preferring the outward side.
      if (used[j]) {
        const int outward = j < n_outer_lines / 2 ? -1 : 1;
        for (int d = 1; d < n_outer_lines; ++d) {
          const int c1 = j + outward * d, c2 = j - outward * d;
          if (c1 >= 0 && c1 < n_outer_lines && !used[c1]) { j = c1; break; }
          if (c2 >= 0 && c2 < n_outer_lines && !used[c2]) { j = c2; break; }
        }
      }
      used[j] = 1;
      row[outer[j]] = 1;
    }
  }
  return SamplingMask(frames, pe, accel, acs_lines, std::move(pattern));
}

}  // namespace discus
