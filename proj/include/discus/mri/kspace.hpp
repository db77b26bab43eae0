#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "discus/core/types.hpp"
#include "discus/mri/mask.hpp"

namespace discus {

/// Multi-coil measurements laid out (T, C, Ny, Nx); zero wherever the mask is zero.
struct KSpaceSeries {
  int frames = 0;
  int coils = 0;
  int ny = 0;
  int nx = 0;
  std::vector<cfloat> samples;
  SamplingMask mask;
  double noise_sigma = 0.0;  // per-sample complex standard deviation, E|n|^2 = sigma^2
  double scale = 1.0;        // normalization factor already applied to `samples`

  std::size_t frame_size() const noexcept { return static_cast<std::size_t>(coils) * ny * nx; }
  std::span<cfloat> frame(int t) noexcept { return {samples.data() + t * frame_size(), frame_size()}; }
  std::span<const cfloat> frame(int t) const noexcept { return {samples.data() + t * frame_size(), frame_size()}; }
  /// Number of measured complex samples per frame (C * Nx * acquired lines).
  std::size_t measured_count(int t) const;
  /// First `t` frames with the matching mask rows.
  KSpaceSeries first_frames(int t) const;
};

/// Fully-sampled-then-masked multi-coil k-space of a noiseless series.
KSpaceSeries simulate_kspace(const ImageSeries& series, const CoilSensitivities& maps, const SamplingMask& mask);

inline constexpr double kNoiselessSnr = std::numeric_limits<double>::infinity();

/// Adds circular complex Gaussian noise on sampled entries so that
/// 10 log10(mean |k|^2 / sigma^2) over the sampled set equals `snr_db`.
/// snr_db = +inf returns the input unchanged.
KSpaceSeries add_noise(const KSpaceSeries& k, double snr_db, std::uint64_t seed);

/// Scales all samples so that the largest magnitude equals 10; returns the
/// factor applied (also stored, multiplied in, on the result).
KSpaceSeries normalize_kspace(const KSpaceSeries& k, double* applied_scale = nullptr);

}  // namespace discus
