#include "discus/baselines/cs.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "discus/baselines/prox.hpp"
#include "discus/baselines/wavelet.hpp"
#include "discus/core/error.hpp"
#include "discus/mri/forward.hpp"

namespace discus {

void CsConfig::validate() const {
  if (!(lambda_w > 0.0)) throw ConfigError("lambda_w must be positive");
  if (iterations < 1) throw ConfigError("iterations must be positive");
  if (levels < 0) throw ConfigError("wavelet levels must be non-negative");
  if (divergence_window < 1) throw ConfigError("divergence_window must be positive");
}

namespace {

using cd = std::complex<double>;

int reflect(int i, int n) {
  // Symmetric (half-sample) extension.
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

// Wavelet sparsity on a possibly padded grid.
class Regularizer {
 public:
  Regularizer(int ny, int nx, int levels) : ny_(ny), nx_(nx) {
    const int m = 1 << levels;
    py_ = std::max((ny + m - 1) / m * m, 8 * m / 2);
    px_ = std::max((nx + m - 1) / m * m, 8 * m / 2);
    wave_ = std::make_unique<Wavelet2D>(py_, px_, levels);
    pad_.resize(static_cast<std::size_t>(py_) * px_);
    coef_.resize(pad_.size());
  }

  double l1(std::span<const cd> x) {
    transform(x);
    double s = 0.0;
    for (const cd& c : coef_) s += std::abs(c);
    return s;
  }

  void prox(std::span<cd> x, double tau) {
    transform(x);
    soft_threshold_inplace(coef_, tau);
    wave_->inverse(coef_, pad_);
    for (int y = 0; y < ny_; ++y)
      std::copy_n(pad_.data() + static_cast<std::size_t>(y) * px_, nx_, x.data() + static_cast<std::size_t>(y) * nx_);
  }

 private:
  void transform(std::span<const cd> x) {
    for (int y = 0; y < py_; ++y)
      for (int xx = 0; xx < px_; ++xx)
        pad_[static_cast<std::size_t>(y) * px_ + xx] =
            x[static_cast<std::size_t>(reflect(y, ny_)) * nx_ + reflect(xx, nx_)];
    wave_->forward(pad_, coef_);
  }

  int ny_, nx_, py_, px_;
  std::unique_ptr<Wavelet2D> wave_;
  std::vector<cd> pad_;
  std::vector<cd> coef_;
};

}  // namespace

CsResult recon_cs(const KSpaceSeries& k, const CoilSensitivities& maps, const CsConfig& cfg) {
  cfg.validate();
  if (k.frames < 1) throw DimensionError("k-space series is empty");
  if (maps.coils() != k.coils || maps.ny() != k.ny || maps.nx() != k.nx)
    throw DimensionError("coil maps do not match the k-space series");
  const int ny = k.ny, nx = k.nx, coils = k.coils;
  const std::size_t n = static_cast<std::size_t>(ny) * nx;

  std::vector<cd> s(maps.values().size());
  std::transform(maps.values().begin(), maps.values().end(), s.begin(), [](cfloat v) { return cd(v); });
  // ||A||^2 is bounded by the largest per-pixel coil energy.
  double lip = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = 0.0;
    for (int c = 0; c < coils; ++c) e += std::norm(s[static_cast<std::size_t>(c) * n + i]);
    lip = std::max(lip, e);
  }
  if (!(lip > 0.0)) throw NumericalError("coil maps are identically zero");
  const double step = cfg.step > 0.0 ? cfg.step : 1.0 / lip;

  Regularizer reg(ny, nx, cfg.levels);
  std::vector<cd> y(k.frame_size()), r(k.frame_size());
  std::vector<cd> x(n), x_prev(n), z(n), u(n), grad(n);

  auto data_term = [&](std::span<const cd> img, std::span<const std::uint8_t> mask) {
    sense_forward<double>(img, s, coils, ny, nx, mask, r);
    double f = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      r[i] -= y[i];
      f += std::norm(r[i]);
    }
    return 0.5 * f;
  };

  CsResult out;
  for (int t = 0; t < k.frames; ++t) {
    const auto mask = k.mask.row(t);
    std::transform(k.frame(t).begin(), k.frame(t).end(), y.begin(), [](cfloat v) { return cd(v); });
    sense_adjoint<double>(y, s, coils, ny, nx, mask, x);
    double fx = data_term(x, mask) + cfg.lambda_w * reg.l1(x);
    z = x;
    double tk = 1.0;
    int rising = 0;
    double fu_prev = fx;
    std::vector<double> trace;
    trace.reserve(cfg.iterations);
    for (int it = 0; it < cfg.iterations; ++it) {
      data_term(z, mask);
      sense_adjoint<double>(r, s, coils, ny, nx, mask, grad);
      for (std::size_t i = 0; i < n; ++i) u[i] = z[i] - step * grad[i];
      reg.prox(u, step * cfg.lambda_w);
      const double fu = data_term(u, mask) + cfg.lambda_w * reg.l1(u);
      if (!std::isfinite(fu)) throw NumericalError("CS objective became non-finite in frame " + std::to_string(t));
      rising = it > 0 && fu > fu_prev ? rising + 1 : 0;
      fu_prev = fu;
      if (rising >= cfg.divergence_window)
        throw NumericalError("CS objective rose for " + std::to_string(rising) +
                             " consecutive iterations; reduce the step size");
      x_prev = x;
      if (fu <= fx) {
        x = u;
        fx = fu;
      }
      const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
      for (std::size_t i = 0; i < n; ++i)
        z[i] = x[i] + (tk / tn) * (u[i] - x[i]) + ((tk - 1.0) / tn) * (x[i] - x_prev[i]);
      tk = tn;
      trace.push_back(fx);
    }
    ComplexImage img(ny, nx);
    const double inv = 1.0 / k.scale;
    for (std::size_t i = 0; i < n; ++i) img.span()[i] = cfloat(x[i] * inv);
    out.frames.frames.push_back(std::move(img));
    out.objective.push_back(std::move(trace));
  }
  return out;
}

}  // namespace discus
