#include "discus/nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "discus/core/error.hpp"
#include "discus/simd/kernels.hpp"

namespace discus::nn {
namespace {

int tile_pixels(std::size_t patch, int pixels) {
  const std::size_t fit = kColumnBudget / std::max<std::size_t>(patch, 1);
  if (fit >= static_cast<std::size_t>(pixels)) return pixels;
  return static_cast<int>(std::max<std::size_t>(16, fit - fit % 16));
}

void check_input(const Tensor& x, const ConvShape& s) {
  if (x.c != s.cin) throw DimensionError("conv input channels do not match the layer");
}

}  // namespace

namespace {

// Columns [lo, hi) of a run starting at ox that read in-bounds input for tap
// offset off.
void valid_span(int ox, int run, int stride, int off, int w, int& lo, int& hi) {
  // ix = (ox + j) * stride + off must satisfy 0 <= ix < w.
  lo = 0;
  if ((ox * stride + off) < 0) lo = (-(ox * stride + off) + stride - 1) / stride;
  hi = run;
  const int last = (w - 1 - off) / stride - ox + 1;  // first j with ix >= w, when off <= w - 1
  if (w - 1 - off < 0) hi = 0;
  else hi = std::min(hi, last);
  lo = std::min(lo, run);
  if (hi < lo) hi = lo;
}

}  // namespace

void im2col(const float* x, int h, int w, const ConvShape& s, int wo, int p0, int p1, float* col) {
  const int np = p1 - p0;
  const int pad = s.pad();
  const int k = s.kernel;
  for (int ci = 0; ci < s.cin; ++ci) {
    const float* xc = x + static_cast<std::size_t>(ci) * h * w;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        float* row = col + (static_cast<std::size_t>(ci) * k * k + ky * k + kx) * np;
        const int off = kx - pad;
        int p = p0;
        while (p < p1) {
          const int oy = p / wo;
          const int ox = p % wo;
          const int run = std::min(wo - ox, p1 - p);
          const int iy = oy * s.stride - pad + ky;
          float* out = row + (p - p0);
          if (iy < 0 || iy >= h) {
            std::fill(out, out + run, 0.0f);
          } else {
            const float* xr = xc + static_cast<std::size_t>(iy) * w + static_cast<std::ptrdiff_t>(ox) * s.stride + off;
            int lo, hi;
            valid_span(ox, run, s.stride, off, w, lo, hi);
            std::fill(out, out + lo, 0.0f);
            if (s.stride == 1) {
              std::copy(xr + lo, xr + hi, out + lo);
            } else {
              for (int j = lo; j < hi; ++j) out[j] = xr[static_cast<std::ptrdiff_t>(j) * s.stride];
            }
            std::fill(out + hi, out + run, 0.0f);
          }
          p += run;
        }
      }
    }
  }
}

void col2im_add(const float* col, int h, int w, const ConvShape& s, int wo, int p0, int p1, float* x) {
  const int np = p1 - p0;
  const int pad = s.pad();
  const int k = s.kernel;
  for (int ci = 0; ci < s.cin; ++ci) {
    float* xc = x + static_cast<std::size_t>(ci) * h * w;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const float* row = col + (static_cast<std::size_t>(ci) * k * k + ky * k + kx) * np;
        const int off = kx - pad;
        int p = p0;
        while (p < p1) {
          const int oy = p / wo;
          const int ox = p % wo;
          const int run = std::min(wo - ox, p1 - p);
          const int iy = oy * s.stride - pad + ky;
          if (iy >= 0 && iy < h) {
            float* xr = xc + static_cast<std::size_t>(iy) * w + static_cast<std::ptrdiff_t>(ox) * s.stride + off;
            const float* in = row + (p - p0);
            int lo, hi;
            valid_span(ox, run, s.stride, off, w, lo, hi);
            if (s.stride == 1) {
              for (int j = lo; j < hi; ++j) xr[j] += in[j];
            } else {
              for (int j = lo; j < hi; ++j) xr[static_cast<std::ptrdiff_t>(j) * s.stride] += in[j];
            }
          }
          p += run;
        }
      }
    }
  }
}

void conv2d_forward(const Tensor& x, const ConvShape& s, const float* weight, const float* bias, Tensor& y,
                    ConvWorkspace& ws) {
  check_input(x, s);
  const int ho = s.out_extent(x.h);
  const int wo = s.out_extent(x.w);
  y.resize(x.n, s.cout, ho, wo);
  const int pixels = ho * wo;
  const int patch = static_cast<int>(s.patch());
  const bool pointwise = s.kernel == 1 && s.stride == 1;
  const int tile = tile_pixels(s.patch(), pixels);
  if (!pointwise) ws.col.resize(static_cast<std::size_t>(patch) * tile);

  for (int b = 0; b < x.n; ++b) {
    float* yb = y.sample(b);
    if (pointwise) {
      simd::gemm(false, false, s.cout, pixels, s.cin, 1.0f, weight, s.cin, x.sample(b), pixels, 0.0f, yb, pixels);
    } else {
      for (int p0 = 0; p0 < pixels; p0 += tile) {
        const int p1 = std::min(pixels, p0 + tile);
        const int np = p1 - p0;
        im2col(x.sample(b), x.h, x.w, s, wo, p0, p1, ws.col.data());
        simd::gemm(false, false, s.cout, np, patch, 1.0f, weight, patch, ws.col.data(), np, 0.0f, yb + p0, pixels);
      }
    }
    if (bias != nullptr) {
      for (int co = 0; co < s.cout; ++co) {
        float* plane = yb + static_cast<std::size_t>(co) * pixels;
        const float bv = bias[co];
        for (int i = 0; i < pixels; ++i) plane[i] += bv;
      }
    }
  }
}

void conv2d_backward(const Tensor& x, const Tensor& dy, const ConvShape& s, const float* weight, float* dweight,
                     float* dbias, Tensor* dx, bool accumulate_dx, ConvWorkspace& ws) {
  check_input(x, s);
  const int ho = s.out_extent(x.h);
  const int wo = s.out_extent(x.w);
  if (dy.n != x.n || dy.c != s.cout || dy.h != ho || dy.w != wo)
    throw DimensionError("conv output gradient has the wrong shape");
  const int pixels = ho * wo;
  const int in_pixels = x.h * x.w;
  const int patch = static_cast<int>(s.patch());
  const bool pointwise = s.kernel == 1 && s.stride == 1;
  const int tile = tile_pixels(s.patch(), pixels);
  if (!pointwise) {
    ws.col.resize(static_cast<std::size_t>(patch) * tile);
    ws.dcol.resize(static_cast<std::size_t>(patch) * tile);
  }
  if (dx != nullptr) {
    if (!accumulate_dx) {
      dx->resize(x.n, x.c, x.h, x.w);
      dx->zero();
    } else if (dx->n != x.n || dx->c != x.c || dx->h != x.h || dx->w != x.w) {
      throw DimensionError("accumulated input gradient has the wrong shape");
    }
  }

  for (int b = 0; b < x.n; ++b) {
    const float* dyb = dy.sample(b);
    if (dbias != nullptr) {
      for (int co = 0; co < s.cout; ++co) {
        const float* plane = dyb + static_cast<std::size_t>(co) * pixels;
        double acc = 0.0;
        for (int i = 0; i < pixels; ++i) acc += plane[i];
        dbias[co] += static_cast<float>(acc);
      }
    }
    if (pointwise) {
      simd::gemm(false, true, s.cout, s.cin, pixels, 1.0f, dyb, pixels, x.sample(b), pixels, 1.0f, dweight, s.cin);
      if (dx != nullptr)
        simd::gemm(true, false, s.cin, pixels, s.cout, 1.0f, weight, s.cin, dyb, pixels, 1.0f, dx->sample(b),
                   in_pixels);
      continue;
    }
    for (int p0 = 0; p0 < pixels; p0 += tile) {
      const int p1 = std::min(pixels, p0 + tile);
      const int np = p1 - p0;
      im2col(x.sample(b), x.h, x.w, s, wo, p0, p1, ws.col.data());
      simd::gemm(false, true, s.cout, patch, np, 1.0f, dyb + p0, pixels, ws.col.data(), np, 1.0f, dweight, patch);
      if (dx != nullptr) {
        simd::gemm(true, false, patch, np, s.cout, 1.0f, weight, patch, dyb + p0, pixels, 0.0f, ws.dcol.data(), np);
        col2im_add(ws.dcol.data(), x.h, x.w, s, wo, p0, p1, dx->sample(b));
      }
    }
  }
}

ChannelStats channel_statistics(const Tensor& x) {
  const auto& k = simd::kernels();
  ChannelStats st;
  st.mean.resize(x.c);
  st.invstd.resize(x.c);
  const double count = static_cast<double>(x.n) * x.plane();
  if (count == 0) throw DimensionError("batch statistics of an empty tensor");
  for (int ch = 0; ch < x.c; ++ch) {
    double sum = 0.0;
    double sumsq = 0.0;
    for (int b = 0; b < x.n; ++b) k.sum_sumsq(x.plane(), x.channel(b, ch), &sum, &sumsq);
    const double mean = sum / count;
    const double var = std::max(0.0, sumsq / count - mean * mean);
    st.mean[ch] = static_cast<float>(mean);
    st.invstd[ch] = static_cast<float>(1.0 / std::sqrt(var + kBatchNormEps));
  }
  return st;
}

void batch_norm_act_forward(const Tensor& x, const ChannelStats& stats, const float* gamma, const float* beta,
                            float slope, Tensor& y) {
  if (static_cast<int>(stats.mean.size()) != x.c) throw DimensionError("statistics do not match channel count");
  const auto& k = simd::kernels();
  y.resize(x.n, x.c, x.h, x.w);
  for (int b = 0; b < x.n; ++b) {
    for (int ch = 0; ch < x.c; ++ch) {
      const float scale = gamma[ch] * stats.invstd[ch];
      const float shift = beta[ch] - scale * stats.mean[ch];
      float* out = y.channel(b, ch);
      k.affine(x.plane(), scale, shift, x.channel(b, ch), out);
      if (slope != 1.0f) k.leaky_relu(x.plane(), slope, out, out);
    }
  }
}

void batch_norm_act_backward(const Tensor& x, const Tensor& y, const ChannelStats& stats, const float* gamma,
                             float slope, const Tensor& dy, float* dgamma, float* dbeta, Tensor& dx) {
  const auto& k = simd::kernels();
  dx.resize(x.n, x.c, x.h, x.w);
  const std::size_t plane = x.plane();
  const double count = static_cast<double>(x.n) * plane;
  // dx first holds the gradient with respect to the normalized pre-activation.
  for (int b = 0; b < x.n; ++b) {
    for (int ch = 0; ch < x.c; ++ch) {
      if (slope != 1.0f) {
        k.leaky_relu_backward(plane, slope, y.channel(b, ch), dy.channel(b, ch), dx.channel(b, ch));
      } else {
        std::copy_n(dy.channel(b, ch), plane, dx.channel(b, ch));
      }
    }
  }
  for (int ch = 0; ch < x.c; ++ch) {
    const float mean = stats.mean[ch];
    const double invstd = stats.invstd[ch];
    double sdz = 0.0;
    double sdzx = 0.0;
    for (int b = 0; b < x.n; ++b) k.sum_dy_dyx(plane, dx.channel(b, ch), x.channel(b, ch), mean, &sdz, &sdzx);
    dgamma[ch] += static_cast<float>(sdzx * invstd);
    dbeta[ch] += static_cast<float>(sdz);
    const double g = gamma[ch];
    const float a = static_cast<float>(g * invstd);
    const float bcoef = static_cast<float>(-g * invstd * invstd * invstd * sdzx / count);
    const float c = static_cast<float>(-g * invstd * sdz / count);
    for (int b = 0; b < x.n; ++b)
      k.bn_backward_apply(plane, a, bcoef, c, mean, dx.channel(b, ch), x.channel(b, ch), dx.channel(b, ch));
  }
}

void upsample2x_forward(const Tensor& x, Tensor& y) {
  y.resize(x.n, x.c, 2 * x.h, 2 * x.w);
  for (int b = 0; b < x.n; ++b) {
    for (int ch = 0; ch < x.c; ++ch) {
      const float* in = x.channel(b, ch);
      float* out = y.channel(b, ch);
      for (int yy = 0; yy < x.h; ++yy) {
        float* r0 = out + static_cast<std::size_t>(2 * yy) * y.w;
        float* r1 = r0 + y.w;
        const float* src = in + static_cast<std::size_t>(yy) * x.w;
        for (int xx = 0; xx < x.w; ++xx) {
          r0[2 * xx] = r0[2 * xx + 1] = src[xx];
          r1[2 * xx] = r1[2 * xx + 1] = src[xx];
        }
      }
    }
  }
}

void upsample2x_backward(const Tensor& dy, Tensor& dx) {
  if (dy.h % 2 != 0 || dy.w % 2 != 0) throw DimensionError("upsample gradient extents must be even");
  dx.resize(dy.n, dy.c, dy.h / 2, dy.w / 2);
  for (int b = 0; b < dy.n; ++b) {
    for (int ch = 0; ch < dy.c; ++ch) {
      const float* in = dy.channel(b, ch);
      float* out = dx.channel(b, ch);
      for (int yy = 0; yy < dx.h; ++yy) {
        const float* r0 = in + static_cast<std::size_t>(2 * yy) * dy.w;
        const float* r1 = r0 + dy.w;
        float* dst = out + static_cast<std::size_t>(yy) * dx.w;
        for (int xx = 0; xx < dx.w; ++xx) dst[xx] = (r0[2 * xx] + r0[2 * xx + 1]) + (r1[2 * xx] + r1[2 * xx + 1]);
      }
    }
  }
}

}  // namespace discus::nn
