#pragma once

#include <vector>

#include "discus/core/types.hpp"
#include "discus/mri/kspace.hpp"

namespace discus {

struct LpsConfig {
  double lambda_l = 0.01;  // fraction of the largest singular value
  double lambda_s = 0.01;  // absolute threshold on unitary temporal-FFT coefficients
  int iterations = 100;
  double step = 1.0;
  double tolerance = 1e-5; // relative change of the iterate that ends the loop early
  int divergence_window = 50;

  void validate() const;
};

struct LpsResult {
  ImageSeries low_rank;  // de-normalized
  ImageSeries sparse;
  ImageSeries recon;     // low_rank + sparse
  // 1/2 ||E(L+S) - d||^2 + tau ||L||_* + lambda_s ||F_t S||_1 per iteration,
  // tau being the singular-value threshold applied in that iteration.
  std::vector<double> objective;
};

// Low-rank plus sparse decomposition by iterative soft thresholding: SVT of
// the (pixels x frames) Casorati matrix for L, temporal-FFT soft threshold
// for S, then a data-consistency gradient step on L + S.
LpsResult recon_lps(const KSpaceSeries& k, const CoilSensitivities& maps, const LpsConfig& cfg);

}  // namespace discus
