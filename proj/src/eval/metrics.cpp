#include "discus/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "discus/core/error.hpp"

namespace discus {

double nmse_db(const ComplexImage& ref, const ComplexImage& est) {
  if (!ref.same_shape(est)) throw DimensionError("nmse: image shapes differ");
  double num = 0.0, den = 0.0;
  const auto r = ref.span();
  const auto e = est.span();
  for (std::size_t i = 0; i < r.size(); ++i) {
    const cdouble rv(r[i]);
    num += std::norm(rv - cdouble(e[i]));
    den += std::norm(rv);
  }
  if (!(den > 0.0)) throw UndefinedError("nmse: reference has zero energy");
  if (num == 0.0) return kNmseFloorDb;
  return std::max(kNmseFloorDb, 10.0 * std::log10(num / den));
}

RealImage magnitude(const ComplexImage& img) {
  RealImage out(img.ny(), img.nx());
  std::transform(img.span().begin(), img.span().end(), out.span().begin(), [](cfloat v) { return std::abs(v); });
  return out;
}

namespace {

int reflect(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

// Mean over a (2r+1)^2 window with symmetric extension, separable.
std::vector<double> box_filter(const std::vector<double>& x, int ny, int nx, int r) {
  std::vector<double> tmp(x.size()), out(x.size());
  const double inv = 1.0 / (2 * r + 1);
  for (int y = 0; y < ny; ++y)
    for (int c = 0; c < nx; ++c) {
      double s = 0.0;
      for (int d = -r; d <= r; ++d) s += x[static_cast<std::size_t>(y) * nx + reflect(c + d, nx)];
      tmp[static_cast<std::size_t>(y) * nx + c] = s * inv;
    }
  for (int y = 0; y < ny; ++y)
    for (int c = 0; c < nx; ++c) {
      double s = 0.0;
      for (int d = -r; d <= r; ++d) s += tmp[static_cast<std::size_t>(reflect(y + d, ny)) * nx + c];
      out[static_cast<std::size_t>(y) * nx + c] = s * inv;
    }
  return out;
}

}  // namespace

double ssim(const RealImage& ref, const RealImage& est) {
  if (!ref.same_shape(est)) throw DimensionError("ssim: image shapes differ");
  constexpr int kWin = 7;
  constexpr int kPad = (kWin - 1) / 2;
  const int ny = ref.ny(), nx = ref.nx();
  if (ny < kWin || nx < kWin) throw DimensionError("ssim: image smaller than the 7x7 window");
  const auto [lo, hi] = std::minmax_element(ref.span().begin(), ref.span().end());
  const double range = static_cast<double>(*hi) - *lo;
  if (!(range > 0.0)) throw UndefinedError("ssim: reference is constant, data range is zero");

  const std::size_t n = static_cast<std::size_t>(ny) * nx;
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = ref.span()[i];
    y[i] = est.span()[i];
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto ux = box_filter(x, ny, nx, kPad), uy = box_filter(y, ny, nx, kPad);
  const auto uxx = box_filter(xx, ny, nx, kPad), uyy = box_filter(yy, ny, nx, kPad);
  const auto uxy = box_filter(xy, ny, nx, kPad);
  const double np = kWin * kWin;
  const double cov = np / (np - 1.0);
  const double c1 = (0.01 * range) * (0.01 * range);
  const double c2 = (0.03 * range) * (0.03 * range);
  double total = 0.0;
  std::size_t count = 0;
  for (int r = kPad; r < ny - kPad; ++r)
    for (int c = kPad; c < nx - kPad; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * nx + c;
      const double vx = cov * (uxx[i] - ux[i] * ux[i]);
      const double vy = cov * (uyy[i] - uy[i] * uy[i]);
      const double vxy = cov * (uxy[i] - ux[i] * uy[i]);
      const double a = (2 * ux[i] * uy[i] + c1) * (2 * vxy + c2);
      const double b = (ux[i] * ux[i] + uy[i] * uy[i] + c1) * (vx + vy + c2);
      total += a / b;
      ++count;
    }
  return total / static_cast<double>(count);
}

MetricsReport evaluate_series(const ImageSeries& ref, const ImageSeries& est, std::string method) {
  ref.validate();
  est.validate();
  if (ref.frame_count() != est.frame_count()) throw DimensionError("series have different frame counts");
  MetricsReport m;
  m.method = std::move(method);
  m.frames = ref.frame_count();
  for (int t = 0; t < m.frames; ++t) {
    m.nmse.push_back(nmse_db(ref.frames[t], est.frames[t]));
    m.ssim.push_back(ssim(magnitude(ref.frames[t]), magnitude(est.frames[t])));
  }
  m.mean_nmse = std::accumulate(m.nmse.begin(), m.nmse.end(), 0.0) / m.frames;
  m.mean_ssim = std::accumulate(m.ssim.begin(), m.ssim.end(), 0.0) / m.frames;
  return m;
}

}  // namespace discus
