#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace discus {

/// Binary (T, PE) phase-encoding pattern, 1 = line acquired. Line index PE/2
/// is the k-space centre; the readout axis is always fully sampled.
class SamplingMask {
public:
  SamplingMask() = default;
  SamplingMask(int frames, int pe, double accel, int acs_lines, std::vector<std::uint8_t> pattern);

  int frames() const noexcept { return frames_; }
  int pe() const noexcept { return pe_; }
  double acceleration() const noexcept { return accel_; }
  int acs_lines() const noexcept { return acs_; }

  std::span<const std::uint8_t> row(int t) const noexcept {
    return {pattern_.data() + static_cast<std::size_t>(t) * pe_, static_cast<std::size_t>(pe_)};
  }
  int lines_in_frame(int t) const noexcept;
  const std::vector<std::uint8_t>& pattern() const noexcept { return pattern_; }

  /// First index of the central ACS block.
  static int acs_start(int pe, int acs_lines) noexcept { return pe / 2 - acs_lines / 2; }
  /// Lines per frame for acceleration R: round(PE / R).
  static int lines_per_frame(int pe, double accel);

  /// Restrict to the first `t` frames.
  SamplingMask first_frames(int t) const;

  friend bool operator==(const SamplingMask&, const SamplingMask&) = default;

private:
  int frames_ = 0;
  int pe_ = 0;
  double accel_ = 1.0;
  int acs_ = 0;
  std::vector<std::uint8_t> pattern_;
};

/// ACS lines always on; the remaining round(PE/R) - acs lines are drawn
/// uniformly without replacement from the outer indices, independently per frame.
SamplingMask central_random_mask(int pe, double accel, int acs_lines, int frames, std::uint64_t seed);

/// Golden-ratio-offset Cartesian pattern. Deterministic; per frame the outer
/// lines sit on a uniform grid whose offset advances by PE*(phi-1) mod PE,
/// warped toward the centre by `density_power` (> 1 densifies the centre).
SamplingMask gro_mask(int pe, int frames, double accel, int acs_lines, double density_power = 1.5);

}  // namespace discus
