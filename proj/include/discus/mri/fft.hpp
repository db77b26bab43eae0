#pragma once

#include <complex>
#include <span>

namespace discus {

/// Centred, unitary 2-D DFT on a row-major (ny, nx) grid, in place.
/// The array centre (ny/2, nx/2) is the origin in both domains and the
/// transform is scaled by 1/sqrt(ny*nx) in each direction.
void fft2c(std::span<std::complex<float>> data, int ny, int nx);
void ifft2c(std::span<std::complex<float>> data, int ny, int nx);
void fft2c(std::span<std::complex<double>> data, int ny, int nx);
void ifft2c(std::span<std::complex<double>> data, int ny, int nx);

/// Unitary 1-D DFT along the leading axis of a (n, stride) row-major block,
/// applied independently to each of the `stride` columns. Not centred.
void fft_axis0(std::span<std::complex<float>> data, int n, int stride, bool inverse);
void fft_axis0(std::span<std::complex<double>> data, int n, int stride, bool inverse);

}  // namespace discus
