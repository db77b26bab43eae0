#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "discus/core/types.hpp"

namespace discus {

/// Multi-coil Cartesian operator for one frame:
///   forward: y_c = mask (.) F(S_c (.) x)
///   adjoint: x   = sum_c conj(S_c) (.) F^-1(mask (.) y_c)
/// F is the centred unitary 2-D DFT; the mask row selects phase-encoding
/// lines (rows of k-space). Output k-space is laid out (C, Ny, Nx).
template <class T>
void sense_forward(std::span<const std::complex<T>> image, std::span<const std::complex<T>> maps, int coils, int ny,
                   int nx, std::span<const std::uint8_t> mask_row, std::span<std::complex<T>> kspace);

template <class T>
void sense_adjoint(std::span<const std::complex<T>> kspace, std::span<const std::complex<T>> maps, int coils,
                   int ny, int nx, std::span<const std::uint8_t> mask_row, std::span<std::complex<T>> image);

/// Convenience wrappers over the float path.
std::vector<cfloat> apply_forward(const ComplexImage& x, const CoilSensitivities& s,
                                  std::span<const std::uint8_t> mask_row);
ComplexImage apply_adjoint(std::span<const cfloat> y, const CoilSensitivities& s,
                           std::span<const std::uint8_t> mask_row);

/// Reusable float operator that owns its scratch buffers; one instance per thread.
class SenseOperator {
public:
  explicit SenseOperator(const CoilSensitivities& maps);

  int coils() const noexcept { return maps_.coils(); }
  int ny() const noexcept { return maps_.ny(); }
  int nx() const noexcept { return maps_.nx(); }
  std::size_t kspace_size() const noexcept { return static_cast<std::size_t>(coils()) * ny() * nx(); }

  void forward(std::span<const cfloat> image, std::span<const std::uint8_t> mask_row, std::span<cfloat> kspace);
  void adjoint(std::span<const cfloat> kspace, std::span<const std::uint8_t> mask_row, std::span<cfloat> image);

private:
  CoilSensitivities maps_;
  std::vector<cfloat> scratch_;
};

}  // namespace discus
