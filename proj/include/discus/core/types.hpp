#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "discus/core/error.hpp"

namespace discus {

using cfloat = std::complex<float>;
using cdouble = std::complex<double>;

/// Dense row-major 2-D grid. Row index is y (phase encoding), column is x.
template <class T>
class Image {
public:
  Image() = default;
  Image(int ny, int nx, T fill = T{}) : ny_(ny), nx_(nx), data_(static_cast<std::size_t>(ny) * nx, fill) {
    if (ny <= 0 || nx <= 0) throw DimensionError("image dimensions must be positive");
  }
  Image(int ny, int nx, std::vector<T> data) : ny_(ny), nx_(nx), data_(std::move(data)) {
    if (ny <= 0 || nx <= 0 || data_.size() != static_cast<std::size_t>(ny) * nx)
      throw DimensionError("image data does not match dimensions");
  }

  int ny() const noexcept { return ny_; }
  int nx() const noexcept { return nx_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(int y, int x) noexcept { return data_[static_cast<std::size_t>(y) * nx_ + x]; }
  const T& operator()(int y, int x) const noexcept { return data_[static_cast<std::size_t>(y) * nx_ + x]; }
  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<T> span() noexcept { return data_; }
  std::span<const T> span() const noexcept { return data_; }
  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }
  std::vector<T>& values() noexcept { return data_; }
  const std::vector<T>& values() const noexcept { return data_; }

  bool same_shape(const Image& o) const noexcept { return ny_ == o.ny_ && nx_ == o.nx_; }
  friend bool operator==(const Image&, const Image&) = default;

private:
  int ny_ = 0;
  int nx_ = 0;
  std::vector<T> data_;
};

using ComplexImage = Image<cfloat>;
using RealImage = Image<float>;

/// T frames of identical shape.
struct ImageSeries {
  std::vector<ComplexImage> frames;
  std::optional<double> frame_period;

  int frame_count() const noexcept { return static_cast<int>(frames.size()); }
  int ny() const { return frames.at(0).ny(); }
  int nx() const { return frames.at(0).nx(); }
  /// Throws DimensionError unless non-empty with a uniform frame shape.
  void validate() const;
};

/// Per-coil complex sensitivities, laid out (C, Ny, Nx).
class CoilSensitivities {
public:
  CoilSensitivities() = default;
  CoilSensitivities(int coils, int ny, int nx);

  int coils() const noexcept { return coils_; }
  int ny() const noexcept { return ny_; }
  int nx() const noexcept { return nx_; }
  std::size_t pixels() const noexcept { return static_cast<std::size_t>(ny_) * nx_; }

  std::span<cfloat> coil(int c) noexcept { return {maps_.data() + c * pixels(), pixels()}; }
  std::span<const cfloat> coil(int c) const noexcept { return {maps_.data() + c * pixels(), pixels()}; }
  std::vector<cfloat>& values() noexcept { return maps_; }
  const std::vector<cfloat>& values() const noexcept { return maps_; }

  /// Uniform single coil with unit sensitivity.
  static CoilSensitivities ones(int ny, int nx);

  friend bool operator==(const CoilSensitivities&, const CoilSensitivities&) = default;

private:
  int coils_ = 0;
  int ny_ = 0;
  int nx_ = 0;
  std::vector<cfloat> maps_;
};

bool all_finite(std::span<const cfloat> v) noexcept;
bool all_finite(std::span<const float> v) noexcept;

/// Independent, reproducible sub-stream seed (splitmix64 finalizer).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace discus
