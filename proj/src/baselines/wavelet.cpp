#include "discus/baselines/wavelet.hpp"

#include <algorithm>
#include <cmath>

#include "discus/core/error.hpp"

namespace discus {
namespace {

using cd = std::complex<double>;

struct D4 {
  double h[4];
  double g[4];
  D4() {
    const double s3 = std::sqrt(3.0);
    const double d = 4.0 * std::sqrt(2.0);
    h[0] = (1 + s3) / d;
    h[1] = (3 + s3) / d;
    h[2] = (3 - s3) / d;
    h[3] = (1 - s3) / d;
    for (int k = 0; k < 4; ++k) g[k] = (k % 2 ? -1.0 : 1.0) * h[3 - k];
  }
};

const D4& filters() {
  static const D4 f;
  return f;
}

// One analysis step on n samples (n even): approximations then details.
void analyze(const cd* x, int n, cd* out) {
  const D4& f = filters();
  const int half = n / 2;
  for (int i = 0; i < half; ++i) {
    cd a = 0, d = 0;
    for (int k = 0; k < 4; ++k) {
      const cd v = x[(2 * i + k) % n];
      a += f.h[k] * v;
      d += f.g[k] * v;
    }
    out[i] = a;
    out[half + i] = d;
  }
}

// Adjoint (and inverse) of analyze.
void synthesize(const cd* c, int n, cd* x) {
  const D4& f = filters();
  const int half = n / 2;
  std::fill(x, x + n, cd{});
  for (int i = 0; i < half; ++i) {
    for (int k = 0; k < 4; ++k) {
      const int j = (2 * i + k) % n;
      x[j] += f.h[k] * c[i] + f.g[k] * c[half + i];
    }
  }
}

}  // namespace

int Wavelet2D::max_levels(int ny, int nx, int wanted) {
  int l = 0;
  while (l < wanted && ny % (2 << l) == 0 && nx % (2 << l) == 0 && (ny >> (l + 1)) >= 4 && (nx >> (l + 1)) >= 4) ++l;
  return l;
}

Wavelet2D::Wavelet2D(int ny, int nx, int levels) : ny_(ny), nx_(nx), levels_(levels) {
  if (ny < 1 || nx < 1) throw DimensionError("wavelet grid must be non-empty");
  if (levels < 0) throw ConfigError("wavelet level count must be non-negative");
  if (max_levels(ny, nx, levels) != levels)
    throw DimensionError("grid does not support the requested number of wavelet levels");
  line_.resize(std::max(ny, nx));
  tmp_.resize(std::max(ny, nx));
}

void Wavelet2D::forward(std::span<const cd> image, std::span<cd> c) const {
  const std::size_t n = static_cast<std::size_t>(ny_) * nx_;
  if (image.size() != n || c.size() != n) throw DimensionError("wavelet buffer size mismatch");
  std::copy(image.begin(), image.end(), c.begin());
  int h = ny_, w = nx_;
  for (int l = 0; l < levels_; ++l) {
    for (int y = 0; y < h; ++y) {
      cd* row = c.data() + static_cast<std::size_t>(y) * nx_;
      analyze(row, w, tmp_.data());
      std::copy_n(tmp_.data(), w, row);
    }
    for (int x = 0; x < w; ++x) {
      for (int y = 0; y < h; ++y) line_[y] = c[static_cast<std::size_t>(y) * nx_ + x];
      analyze(line_.data(), h, tmp_.data());
      for (int y = 0; y < h; ++y) c[static_cast<std::size_t>(y) * nx_ + x] = tmp_[y];
    }
    h /= 2;
    w /= 2;
  }
}

void Wavelet2D::inverse(std::span<const cd> c, std::span<cd> image) const {
  const std::size_t n = static_cast<std::size_t>(ny_) * nx_;
  if (image.size() != n || c.size() != n) throw DimensionError("wavelet buffer size mismatch");
  std::copy(c.begin(), c.end(), image.begin());
  for (int l = levels_ - 1; l >= 0; --l) {
    const int h = ny_ >> l;
    const int w = nx_ >> l;
    for (int x = 0; x < w; ++x) {
      for (int y = 0; y < h; ++y) line_[y] = image[static_cast<std::size_t>(y) * nx_ + x];
      synthesize(line_.data(), h, tmp_.data());
      for (int y = 0; y < h; ++y) image[static_cast<std::size_t>(y) * nx_ + x] = tmp_[y];
    }
    for (int y = 0; y < h; ++y) {
      cd* row = image.data() + static_cast<std::size_t>(y) * nx_;
      synthesize(row, w, tmp_.data());
      std::copy_n(tmp_.data(), w, row);
    }
  }
}

}  // namespace discus
