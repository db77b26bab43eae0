#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace discus {

struct ManifoldReport {
  std::vector<double> rms;             // per-pixel temporal RMS of the dynamic codes
  std::vector<std::size_t> support;    // pixels with rms > threshold * max rms
  std::size_t dimensionality = 0;
  double threshold = 0.01;
};

inline constexpr double kDefaultSupportThreshold = 0.01;

// z laid out (T, N). An all-zero input has dimensionality 0.
ManifoldReport manifold_dimensionality(std::span<const float> z, int frames, std::size_t pixels,
                                       double rel_threshold = kDefaultSupportThreshold);

}  // namespace discus
