#pragma once

#include <cstddef>
#include <span>

namespace discus {

// sum_n sqrt(sum_t z[t, n]^2) for z laid out (T, N).
double group_sparsity_norm(std::span<const float> z, int frames, std::size_t groups);

// Adds weight * d/dz of the norm into grad (zero subgradient on an all-zero
// group) and returns the norm.
double group_sparsity_accumulate_gradient(std::span<const float> z, int frames, std::size_t groups, double weight,
                                          std::span<float> grad);

}  // namespace discus
