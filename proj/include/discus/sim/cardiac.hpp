#pragma once

#include <cstdint>
#include <vector>

#include "discus/core/types.hpp"

namespace discus {

/// Desk-scale stand-in for a free-breathing single-shot LGE series:
/// thorax, lungs, liver and a short-axis heart (nulled myocardial ring,
/// bright blood pools) rendered analytically with 4x4 supersampling.
struct CardiacSpec {
  int ny = 64;
  int nx = 64;
  int frames = 32;
  double breathing_amplitude_px = 3.0;  // peak-to-peak vertical excursion
  double hysteresis_asymmetry = 0.25;   // weight of the second harmonic, in [0, 1]
  double contrast_drift = 0.0;          // blood/scar gain varies linearly by +-drift/2
  bool scar = false;
  double scar_gain = 0.55;              // scar intensity above the myocardial ring
  double phase_amplitude = 0.3;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CardiacSeries {
  ImageSeries series;
  std::vector<double> displacement_px;  // per-frame vertical shift (+ = up)
  std::vector<double> contrast_gain;    // per-frame blood/scar multiplier
};

/// Intensity of the healthy myocardial ring and of the blood pool.
inline constexpr double kMyocardiumIntensity = 0.12;
inline constexpr double kBloodIntensity = 0.75;

CardiacSeries make_cardiac_series(const CardiacSpec& spec);

/// Convenience overload matching the CLI parameters.
ImageSeries make_cardiac_series(int ny, int nx, int frames, double breathing_amplitude, double contrast_drift,
                                bool scar, std::uint64_t seed);

}  // namespace discus
