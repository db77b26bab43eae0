#include "discus/baselines/lps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "discus/baselines/prox.hpp"
#include "discus/core/error.hpp"
#include "discus/mri/fft.hpp"
#include "discus/mri/forward.hpp"

namespace discus {

void LpsConfig::validate() const {
  if (!(lambda_l >= 0.0) || !(lambda_s >= 0.0)) throw ConfigError("L+S weights must be non-negative");
  if (iterations < 1) throw ConfigError("iterations must be positive");
  if (!(step > 0.0)) throw ConfigError("step must be positive");
  if (!(tolerance >= 0.0)) throw ConfigError("tolerance must be non-negative");
  if (divergence_window < 1) throw ConfigError("divergence_window must be positive");
}

namespace {

using cd = std::complex<double>;
// Casorati layout: column t holds frame t, so the matrix is (pixels x frames)
// and the frame-major buffer is its column-major storage.
using Casorati = Eigen::MatrixXcd;

ImageSeries to_series(const Casorati& m, int ny, int nx, double scale) {
  ImageSeries s;
  for (Eigen::Index t = 0; t < m.cols(); ++t) {
    ComplexImage img(ny, nx);
    auto px = img.span();
    for (Eigen::Index i = 0; i < m.rows(); ++i) px[i] = cfloat(m(i, t) / scale);
    s.frames.push_back(std::move(img));
  }
  return s;
}

}  // namespace

LpsResult recon_lps(const KSpaceSeries& k, const CoilSensitivities& maps, const LpsConfig& cfg) {
  cfg.validate();
  if (k.frames < 2) throw DimensionError("L+S needs at least two frames");
  if (maps.coils() != k.coils || maps.ny() != k.ny || maps.nx() != k.nx)
    throw DimensionError("coil maps do not match the k-space series");
  const int ny = k.ny, nx = k.nx, coils = k.coils, frames = k.frames;
  const Eigen::Index n = static_cast<Eigen::Index>(ny) * nx;

  std::vector<cd> s(maps.values().size());
  std::transform(maps.values().begin(), maps.values().end(), s.begin(), [](cfloat v) { return cd(v); });
  std::vector<cd> d(k.samples.size());
  std::transform(k.samples.begin(), k.samples.end(), d.begin(), [](cfloat v) { return cd(v); });
  const std::size_t fs = k.frame_size();

  auto adjoint = [&](const std::vector<cd>& kd, Casorati& img) {
    for (int t = 0; t < frames; ++t)
      sense_adjoint<double>(std::span<const cd>(kd.data() + t * fs, fs), s, coils, ny, nx, k.mask.row(t),
                            std::span<cd>(img.col(t).data(), static_cast<std::size_t>(n)));
  };
  std::vector<cd> resid(d.size());
  // Residual E(X) - d into `resid`; returns its squared norm.
  auto residual = [&](const Casorati& xm) {
    double e = 0.0;
    for (int t = 0; t < frames; ++t) {
      std::span<cd> out(resid.data() + t * fs, fs);
      sense_forward<double>(std::span<const cd>(xm.col(t).data(), static_cast<std::size_t>(n)), s, coils, ny, nx,
                            k.mask.row(t), out);
      for (std::size_t i = 0; i < fs; ++i) {
        out[i] -= d[t * fs + i];
        e += std::norm(out[i]);
      }
    }
    return e;
  };
  auto temporal_fft = [&](Casorati& m, bool inverse) {
    fft_axis0(std::span<cd>(m.data(), static_cast<std::size_t>(m.size())), frames, static_cast<int>(n), inverse);
  };

  Casorati m(n, frames), l(n, frames), sp = Casorati::Zero(n, frames), lpre(n, frames), tmp(n, frames);
  adjoint(d, m);
  lpre = m;

  LpsResult out;
  int rising = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.iterations; ++it) {
    const Casorati m0 = m;
    // L: singular-value threshold relative to the current largest value.
    double tau = 0.0;
    {
      Eigen::BDCSVD<Casorati> svd(m - sp, Eigen::ComputeThinU | Eigen::ComputeThinV);
      if (svd.info() != Eigen::Success) throw NumericalError("singular value decomposition failed");
      Eigen::VectorXd sv = svd.singularValues();
      tau = cfg.lambda_l * (sv.size() ? sv(0) : 0.0);
      for (Eigen::Index i = 0; i < sv.size(); ++i) sv(i) = std::max(sv(i) - tau, 0.0);
      l = svd.matrixU() * sv.asDiagonal() * svd.matrixV().adjoint();
    }
    // S: soft threshold in the temporal Fourier domain.
    tmp = m - lpre;
    temporal_fft(tmp, false);
    soft_threshold_inplace(std::span<cd>(tmp.data(), static_cast<std::size_t>(tmp.size())), cfg.lambda_s);
    temporal_fft(tmp, true);
    sp = tmp;

    tmp = l + sp;
    const double res2 = residual(tmp);
    Casorati g(n, frames);
    adjoint(resid, g);
    m = tmp - cfg.step * g;
    lpre = l;

    // Objective on the current (L, S).
    Eigen::BDCSVD<Casorati> nuc(l);
    tmp = sp;
    temporal_fft(tmp, false);
    const double cost = 0.5 * res2 + tau * nuc.singularValues().sum() + cfg.lambda_s * tmp.cwiseAbs().sum();
    if (!std::isfinite(cost)) throw NumericalError("L+S objective became non-finite");
    // The iteration is not a descent method on this cost, so slow drift is
    // expected; only a sustained excursion far above the best value counts.
    best = std::min(best, cost);
    if (cost > 2.0 * best) {
      if (++rising >= cfg.divergence_window)
        throw NumericalError("L+S objective stayed above twice its minimum for " + std::to_string(rising) +
                             " iterations; reduce the step size");
    } else {
      rising = 0;
    }
    out.objective.push_back(cost);
    const double m0n = m0.norm();
    if (m0n > 0.0 && (m - m0).norm() < cfg.tolerance * m0n) break;
  }

  out.low_rank = to_series(l, ny, nx, k.scale);
  out.sparse = to_series(sp, ny, nx, k.scale);
  out.recon = to_series(l + sp, ny, nx, k.scale);
  return out;
}

}  // namespace discus
