#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace discus {

// Static code z0 (k, Ny, Nx) shared by every frame and one single-channel
// dynamic code per frame, stored (T, Ny, Nx).
struct CodeVectors {
  int static_channels = 0;
  int frames = 0;
  int ny = 0;
  int nx = 0;
  std::vector<float> z_static;
  std::vector<float> z_dynamic;

  std::size_t pixels() const noexcept { return static_cast<std::size_t>(ny) * nx; }
  std::span<float> dynamic_frame(int t) noexcept { return {z_dynamic.data() + t * pixels(), pixels()}; }
  std::span<const float> dynamic_frame(int t) const noexcept {
    return {z_dynamic.data() + t * pixels(), pixels()};
  }
  void validate() const;
};

// i.i.d. N(0, stddev^2) initialization of both codes.
CodeVectors random_codes(int static_channels, int frames, int ny, int nx, double stddev, std::uint64_t seed);

}  // namespace discus
