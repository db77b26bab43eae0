#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "discus/core/types.hpp"

namespace discus {

enum class MotionMode { rotation_only, translation_only, both };

const char* motion_mode_name(MotionMode m) noexcept;
/// Accepts "rotation", "translation", "both" (and the *_only spellings).
MotionMode motion_mode_from_name(const std::string& name);

struct MotionSpec {
  double rotation_range_deg = 3.0;   // angles drawn from [-r, r]
  double translation_range_px = 3.0; // horizontal shifts drawn from [-t, t]
  MotionMode mode = MotionMode::rotation_only;
  std::uint64_t seed = 0;

  void validate() const;
};

struct MotionSample {
  double angle_deg = 0.0;
  double shift_x = 0.0;
};

/// Ground-truth per-frame motion; frame 0 is the untransformed base.
struct MotionRecord {
  std::vector<MotionSample> frames;
  /// Degrees of freedom of the simulated manifold (1 or 2, 0 for identity motion).
  int true_dimensionality() const;
};

/// Rotates about the grid centre by `angle_deg` (counter-clockwise for
/// y pointing up), then shifts by `shift_x` pixels along x. Bilinear
/// resampling with zero fill outside the grid.
ComplexImage rigid_transform(const ComplexImage& img, double angle_deg, double shift_x);

/// T frames: frame 0 = base, frames 1..T-1 transformed by i.i.d. uniform draws.
std::pair<ImageSeries, MotionRecord> make_dynamic_series(const ComplexImage& base, int frames,
                                                         const MotionSpec& spec);

}  // namespace discus
