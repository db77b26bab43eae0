#pragma once

#include <vector>

#include "discus/core/types.hpp"
#include "discus/mri/kspace.hpp"

namespace discus {

struct CsConfig {
  double lambda_w = 0.01;
  int iterations = 200;
  double step = 0.0;      // <= 0 selects 1/L with L the operator norm bound
  int levels = 3;
  int divergence_window = 50;

  void validate() const;
};

struct CsResult {
  ImageSeries frames;                          // de-normalized
  std::vector<std::vector<double>> objective;  // per frame, one value per iteration
};

// Per-frame monotone FISTA on 1/2 ||A_t x - y_t||^2 + lambda_w ||W x||_1.
// Grids not divisible by 2^levels are symmetrically padded before the
// wavelet transform.
CsResult recon_cs(const KSpaceSeries& k, const CoilSensitivities& maps, const CsConfig& cfg);

}  // namespace discus
