#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "discus/core/types.hpp"

namespace discus {

inline constexpr double kNmseFloorDb = -300.0;

// 20 log10(||ref - est|| / ||ref||) on complex frames, floored at -300 dB.
double nmse_db(const ComplexImage& ref, const ComplexImage& est);

RealImage magnitude(const ComplexImage& img);

// Mean SSIM with a 7x7 uniform window, K1 = 0.01, K2 = 0.03, sample
// covariance, data_range = max(ref) - min(ref), symmetric boundary
// extension and a 3-pixel border excluded from the mean.
double ssim(const RealImage& ref, const RealImage& est);

struct MetricsReport {
  std::string method;
  std::string series;         // which simulated series (e.g. motion type)
  std::uint64_t seed = 0;
  double lambda = 0.0;
  double accel = 1.0;
  int frames = 0;
  int dimensionality = -1;    // -1 when the method has no dynamic codes
  std::vector<double> nmse;   // per frame, dB
  std::vector<double> ssim;   // per frame
  double mean_nmse = 0.0;
  double mean_ssim = 0.0;
};

// Per-frame metrics against the reference series and their means.
MetricsReport evaluate_series(const ImageSeries& ref, const ImageSeries& est, std::string method);

}  // namespace discus
