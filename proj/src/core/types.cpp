#include "discus/core/types.hpp"

#include <algorithm>
#include <cmath>

namespace discus {

void ImageSeries::validate() const {
  if (frames.empty()) throw DimensionError("image series has no frames");
  const auto& first = frames.front();
  for (const auto& f : frames)
    if (!f.same_shape(first)) throw DimensionError("image series frames differ in shape");
}

CoilSensitivities::CoilSensitivities(int coils, int ny, int nx)
    : coils_(coils), ny_(ny), nx_(nx), maps_(static_cast<std::size_t>(coils) * ny * nx) {
  if (coils < 1 || ny < 1 || nx < 1) throw DimensionError("coil sensitivities need C, Ny, Nx >= 1");
}

CoilSensitivities CoilSensitivities::ones(int ny, int nx) {
  CoilSensitivities s(1, ny, nx);
  std::fill(s.maps_.begin(), s.maps_.end(), cfloat{1.0f, 0.0f});
  return s;
}

bool all_finite(std::span<const cfloat> v) noexcept {
  return std::all_of(v.begin(), v.end(),
                     [](cfloat c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

bool all_finite(std::span<const float> v) noexcept {
  return std::all_of(v.begin(), v.end(), [](float f) { return std::isfinite(f); });
}

}  // namespace discus
