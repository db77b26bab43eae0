#include "discus/engine/group_sparsity.hpp"

#include <cmath>
#include <vector>

#include "discus/core/error.hpp"

namespace discus {
namespace {

void check(std::span<const float> z, int frames, std::size_t groups) {
  if (frames < 1) throw DimensionError("group norm needs at least one frame");
  if (z.size() != static_cast<std::size_t>(frames) * groups) throw DimensionError("group norm input has the wrong size");
}

// Per-group sums of squares, accumulated frame-major so each pass is contiguous.
std::vector<double> group_energy(std::span<const float> z, int frames, std::size_t groups) {
  std::vector<double> e(groups, 0.0);
  for (int t = 0; t < frames; ++t) {
    const float* row = z.data() + static_cast<std::size_t>(t) * groups;
    for (std::size_t n = 0; n < groups; ++n) e[n] += static_cast<double>(row[n]) * row[n];
  }
  return e;
}

}  // namespace

double group_sparsity_norm(std::span<const float> z, int frames, std::size_t groups) {
  check(z, frames, groups);
  double total = 0.0;
  for (double e : group_energy(z, frames, groups)) total += std::sqrt(e);
  return total;
}

double group_sparsity_accumulate_gradient(std::span<const float> z, int frames, std::size_t groups, double weight,
                                          std::span<float> grad) {
  check(z, frames, groups);
  if (grad.size() != z.size()) throw DimensionError("group norm gradient has the wrong size");
  std::vector<double> inv = group_energy(z, frames, groups);
  double total = 0.0;
  for (double& e : inv) {
    const double norm = std::sqrt(e);
    total += norm;
    e = norm > 0.0 ? weight / norm : 0.0;
  }
  for (int t = 0; t < frames; ++t) {
    const std::size_t base = static_cast<std::size_t>(t) * groups;
    for (std::size_t n = 0; n < groups; ++n) grad[base + n] += static_cast<float>(inv[n] * z[base + n]);
  }
  return total;
}

}  // namespace discus
