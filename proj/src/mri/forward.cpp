#include "discus/mri/forward.hpp"

#include <algorithm>

#include "discus/mri/fft.hpp"
#include "discus/simd/kernels.hpp"

namespace discus {
namespace {

void check(std::size_t image, std::size_t maps, std::size_t kspace, int coils, int ny, int nx, std::size_t mask) {
  const std::size_t n = static_cast<std::size_t>(ny) * nx;
  if (coils < 1 || ny < 1 || nx < 1) throw DimensionError("operator: coils, ny, nx must be >= 1");
  if (image != n) throw DimensionError("operator: image size does not match (ny, nx)");
  if (maps != coils * n) throw DimensionError("operator: coil maps do not match (C, ny, nx)");
  if (kspace != coils * n) throw DimensionError("operator: k-space size does not match (C, ny, nx)");
  if (mask != static_cast<std::size_t>(ny)) throw DimensionError("operator: mask row length must equal ny");
}

template <class T>
void apply_mask(std::span<std::complex<T>> k, int ny, int nx, std::span<const std::uint8_t> mask_row) {
  for (int y = 0; y < ny; ++y)
    if (!mask_row[y]) std::fill_n(k.begin() + static_cast<std::ptrdiff_t>(y) * nx, nx, std::complex<T>{});
}

}  // namespace

template <class T>
void sense_forward(std::span<const std::complex<T>> image, std::span<const std::complex<T>> maps, int coils, int ny,
                   int nx, std::span<const std::uint8_t> mask_row, std::span<std::complex<T>> kspace) {
  check(image.size(), maps.size(), kspace.size(), coils, ny, nx, mask_row.size());
  const std::size_t n = image.size();
  for (int c = 0; c < coils; ++c) {
    auto out = kspace.subspan(c * n, n);
    auto s = maps.subspan(c * n, n);
    for (std::size_t i = 0; i < n; ++i) out[i] = s[i] * image[i];
    fft2c(out, ny, nx);
    apply_mask(out, ny, nx, mask_row);
  }
}

template <class T>
void sense_adjoint(std::span<const std::complex<T>> kspace, std::span<const std::complex<T>> maps, int coils,
                   int ny, int nx, std::span<const std::uint8_t> mask_row, std::span<std::complex<T>> image) {
  check(image.size(), maps.size(), kspace.size(), coils, ny, nx, mask_row.size());
  const std::size_t n = image.size();
  std::vector<std::complex<T>> buf(n);
  std::fill(image.begin(), image.end(), std::complex<T>{});
  for (int c = 0; c < coils; ++c) {
    std::copy_n(kspace.begin() + c * n, n, buf.begin());
    apply_mask(std::span(buf), ny, nx, mask_row);
    ifft2c(std::span(buf), ny, nx);
    auto s = maps.subspan(c * n, n);
    for (std::size_t i = 0; i < n; ++i) image[i] += std::conj(s[i]) * buf[i];
  }
}

template void sense_forward<float>(std::span<const cfloat>, std::span<const cfloat>, int, int, int,
                                   std::span<const std::uint8_t>, std::span<cfloat>);
template void sense_forward<double>(std::span<const cdouble>, std::span<const cdouble>, int, int, int,
                                    std::span<const std::uint8_t>, std::span<cdouble>);
template void sense_adjoint<float>(std::span<const cfloat>, std::span<const cfloat>, int, int, int,
                                   std::span<const std::uint8_t>, std::span<cfloat>);
template void sense_adjoint<double>(std::span<const cdouble>, std::span<const cdouble>, int, int, int,
                                    std::span<const std::uint8_t>, std::span<cdouble>);

std::vector<cfloat> apply_forward(const ComplexImage& x, const CoilSensitivities& s,
                                  std::span<const std::uint8_t> mask_row) {
  if (x.ny() != s.ny() || x.nx() != s.nx()) throw DimensionError("apply_forward: image and maps differ in shape");
  std::vector<cfloat> out(static_cast<std::size_t>(s.coils()) * x.size());
  sense_forward<float>(x.span(), s.values(), s.coils(), x.ny(), x.nx(), mask_row, out);
  return out;
}

ComplexImage apply_adjoint(std::span<const cfloat> y, const CoilSensitivities& s,
                           std::span<const std::uint8_t> mask_row) {
  ComplexImage out(s.ny(), s.nx());
  sense_adjoint<float>(y, s.values(), s.coils(), s.ny(), s.nx(), mask_row, out.span());
  return out;
}

SenseOperator::SenseOperator(const CoilSensitivities& maps) : maps_(maps), scratch_(maps.pixels()) {}

void SenseOperator::forward(std::span<const cfloat> image, std::span<const std::uint8_t> mask_row,
                            std::span<cfloat> kspace) {
  check(image.size(), maps_.values().size(), kspace.size(), coils(), ny(), nx(), mask_row.size());
  const auto& k = simd::kernels();
  const std::size_t n = maps_.pixels();
  for (int c = 0; c < coils(); ++c) {
    auto out = kspace.subspan(c * n, n);
    k.cmul(n, maps_.coil(c).data(), image.data(), out.data());
    fft2c(out, ny(), nx());
    apply_mask(out, ny(), nx(), mask_row);
  }
}

void SenseOperator::adjoint(std::span<const cfloat> kspace, std::span<const std::uint8_t> mask_row,
                            std::span<cfloat> image) {
  check(image.size(), maps_.values().size(), kspace.size(), coils(), ny(), nx(), mask_row.size());
  const auto& k = simd::kernels();
  const std::size_t n = maps_.pixels();
  std::fill(image.begin(), image.end(), cfloat{});
  for (int c = 0; c < coils(); ++c) {
    std::copy_n(kspace.begin() + c * n, n, scratch_.begin());
    apply_mask(std::span(scratch_), ny(), nx(), mask_row);
    ifft2c(std::span(scratch_), ny(), nx());
    k.cmul_conj_acc(n, maps_.coil(c).data(), scratch_.data(), image.data());
  }
}

}  // namespace discus
