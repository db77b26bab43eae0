#include "discus/engine/manifold.hpp"

#include <algorithm>
#include <cmath>

#include "discus/core/error.hpp"

namespace discus {

ManifoldReport manifold_dimensionality(std::span<const float> z, int frames, std::size_t pixels,
                                       double rel_threshold) {
  if (frames < 1 || z.size() != static_cast<std::size_t>(frames) * pixels)
    throw DimensionError("dynamic codes have the wrong size");
  if (!(rel_threshold >= 0.0 && rel_threshold < 1.0)) throw ConfigError("support threshold must lie in [0, 1)");
  ManifoldReport r;
  r.threshold = rel_threshold;
  r.rms.assign(pixels, 0.0);
  for (int t = 0; t < frames; ++t)
    for (std::size_t n = 0; n < pixels; ++n) {
      const double v = z[static_cast<std::size_t>(t) * pixels + n];
      r.rms[n] += v * v;
    }
  for (double& v : r.rms) v = std::sqrt(v / frames);
  const double peak = pixels ? *std::max_element(r.rms.begin(), r.rms.end()) : 0.0;
  if (peak > 0.0) {
    for (std::size_t n = 0; n < pixels; ++n)
      if (r.rms[n] > rel_threshold * peak) r.support.push_back(n);
  }
  r.dimensionality = r.support.size();
  return r;
}

}  // namespace discus
