#pragma once

#include <complex>
#include <span>
#include <vector>

namespace discus {

// Orthonormal separable 2-D Daubechies-4 (four-tap) wavelet with periodic
// boundaries. Both extents must be divisible by 2^levels and the coarsest
// band must keep at least four samples per axis.
class Wavelet2D {
 public:
  Wavelet2D(int ny, int nx, int levels);

  int ny() const noexcept { return ny_; }
  int nx() const noexcept { return nx_; }
  int levels() const noexcept { return levels_; }

  void forward(std::span<const std::complex<double>> image, std::span<std::complex<double>> coeffs) const;
  void inverse(std::span<const std::complex<double>> coeffs, std::span<std::complex<double>> image) const;

  // Largest level count usable for a grid, capped at `wanted`.
  static int max_levels(int ny, int nx, int wanted);

 private:
  int ny_;
  int nx_;
  int levels_;
  mutable std::vector<std::complex<double>> line_;
  mutable std::vector<std::complex<double>> tmp_;
};

}  // namespace discus
