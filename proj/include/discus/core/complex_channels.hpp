#pragma once

#include <vector>

#include "discus/core/types.hpp"

namespace discus {

/// Two real channels stacked as (2, Ny, Nx): real part then imaginary part.
struct ChannelImage {
  int ny = 0;
  int nx = 0;
  std::vector<float> data;
};

/// Throws NonFiniteError on NaN/Inf input.
ChannelImage complex_to_channels(const ComplexImage& img);
ComplexImage channels_to_complex(const ChannelImage& ch);
/// Same mapping reading from a raw (2, Ny, Nx) buffer.
ComplexImage channels_to_complex(std::span<const float> ch, int ny, int nx);

}  // namespace discus
