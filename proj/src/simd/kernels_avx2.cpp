// AVX2/FMA kernel variants. Compiled with -mavx2 -mfma; reached only through
// avx2_kernels(), which checks the CPU first. No inline std:: templates over
// floating point are used here, so nothing compiled with these flags can leak
// into the rest of the program through COMDAT folding.

#include <immintrin.h>

#include "discus/simd/kernels.hpp"
#include "gemm_driver.hpp"

namespace discus::simd {
namespace {

using cf = std::complex<float>;

void micro_avx2(int kc, const float* a, const float* b, float* c, int ldc, float alpha, float beta, int mr,
                int nr) {
  __m256 c00 = _mm256_setzero_ps(), c01 = _mm256_setzero_ps();
  __m256 c10 = _mm256_setzero_ps(), c11 = _mm256_setzero_ps();
  __m256 c20 = _mm256_setzero_ps(), c21 = _mm256_setzero_ps();
  __m256 c30 = _mm256_setzero_ps(), c31 = _mm256_setzero_ps();
  __m256 c40 = _mm256_setzero_ps(), c41 = _mm256_setzero_ps();
  __m256 c50 = _mm256_setzero_ps(), c51 = _mm256_setzero_ps();
  for (int p = 0; p < kc; ++p) {
    const __m256 b0 = _mm256_loadu_ps(b);
    const __m256 b1 = _mm256_loadu_ps(b + 8);
    __m256 av = _mm256_broadcast_ss(a + 0);
    c00 = _mm256_fmadd_ps(av, b0, c00);
    c01 = _mm256_fmadd_ps(av, b1, c01);
    av = _mm256_broadcast_ss(a + 1);
    c10 = _mm256_fmadd_ps(av, b0, c10);
    c11 = _mm256_fmadd_ps(av, b1, c11);
    av = _mm256_broadcast_ss(a + 2);
    c20 = _mm256_fmadd_ps(av, b0, c20);
    c21 = _mm256_fmadd_ps(av, b1, c21);
    av = _mm256_broadcast_ss(a + 3);
    c30 = _mm256_fmadd_ps(av, b0, c30);
    c31 = _mm256_fmadd_ps(av, b1, c31);
    av = _mm256_broadcast_ss(a + 4);
    c40 = _mm256_fmadd_ps(av, b0, c40);
    c41 = _mm256_fmadd_ps(av, b1, c41);
    av = _mm256_broadcast_ss(a + 5);
    c50 = _mm256_fmadd_ps(av, b0, c50);
    c51 = _mm256_fmadd_ps(av, b1, c51);
    a += kMR;
    b += kNR;
  }
  const __m256 acc[kMR][2] = {{c00, c01}, {c10, c11}, {c20, c21}, {c30, c31}, {c40, c41}, {c50, c51}};
  if (mr == kMR && nr == kNR) {
    const __m256 va = _mm256_set1_ps(alpha);
    const __m256 vb = _mm256_set1_ps(beta);
    for (int i = 0; i < kMR; ++i) {
      float* row = c + static_cast<long>(i) * ldc;
      for (int h = 0; h < 2; ++h) {
        __m256 r = _mm256_mul_ps(va, acc[i][h]);
        if (beta != 0.0f) r = _mm256_fmadd_ps(vb, _mm256_loadu_ps(row + 8 * h), r);
        _mm256_storeu_ps(row + 8 * h, r);
      }
    }
    return;
  }
  alignas(32) float tile[kMR * kNR];
  for (int i = 0; i < kMR; ++i) {
    _mm256_store_ps(tile + i * kNR, acc[i][0]);
    _mm256_store_ps(tile + i * kNR + 8, acc[i][1]);
  }
  store_tile(tile, mr, nr, alpha, beta, c, ldc);
}

void sgemm(bool ta, bool tb, int m, int n, int k, float alpha, const float* a, int lda, const float* b, int ldb,
           float beta, float* c, int ldc, float* work) {
  gemm_blocked(micro_avx2, ta, tb, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc, work);
}

inline double hsum_pd(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void axpy(std::size_t n, float a, const float* x, float* y) {
  const __m256 va = _mm256_set1_ps(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(y + i, _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void affine(std::size_t n, float scale, float shift, const float* x, float* y) {
  const __m256 vs = _mm256_set1_ps(scale), vt = _mm256_set1_ps(shift);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) _mm256_storeu_ps(y + i, _mm256_fmadd_ps(vs, _mm256_loadu_ps(x + i), vt));
  for (; i < n; ++i) y[i] = scale * x[i] + shift;
}

void sum_sumsq(std::size_t n, const float* x, double* sum, double* sumsq) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  __m256d q0 = _mm256_setzero_pd(), q1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 v = _mm256_loadu_ps(x + i);
    const __m256d lo = _mm256_cvtps_pd(_mm256_castps256_ps128(v));
    const __m256d hi = _mm256_cvtps_pd(_mm256_extractf128_ps(v, 1));
    s0 = _mm256_add_pd(s0, lo);
    s1 = _mm256_add_pd(s1, hi);
    q0 = _mm256_fmadd_pd(lo, lo, q0);
    q1 = _mm256_fmadd_pd(hi, hi, q1);
  }
  double s = hsum_pd(_mm256_add_pd(s0, s1));
  double q = hsum_pd(_mm256_add_pd(q0, q1));
  for (; i < n; ++i) {
    const double v = x[i];
    s += v;
    q += v * v;
  }
  *sum += s;
  *sumsq += q;
}

void sum_dy_dyx(std::size_t n, const float* dy, const float* x, float mean, double* sdy, double* sdyx) {
  const __m256 vm = _mm256_set1_ps(mean);
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  __m256d q0 = _mm256_setzero_pd(), q1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 g = _mm256_loadu_ps(dy + i);
    const __m256 xc = _mm256_sub_ps(_mm256_loadu_ps(x + i), vm);
    const __m256d glo = _mm256_cvtps_pd(_mm256_castps256_ps128(g));
    const __m256d ghi = _mm256_cvtps_pd(_mm256_extractf128_ps(g, 1));
    const __m256d xlo = _mm256_cvtps_pd(_mm256_castps256_ps128(xc));
    const __m256d xhi = _mm256_cvtps_pd(_mm256_extractf128_ps(xc, 1));
    s0 = _mm256_add_pd(s0, glo);
    s1 = _mm256_add_pd(s1, ghi);
    q0 = _mm256_fmadd_pd(glo, xlo, q0);
    q1 = _mm256_fmadd_pd(ghi, xhi, q1);
  }
  double s = hsum_pd(_mm256_add_pd(s0, s1));
  double q = hsum_pd(_mm256_add_pd(q0, q1));
  for (; i < n; ++i) {
    s += dy[i];
    q += static_cast<double>(dy[i]) * (x[i] - mean);
  }
  *sdy += s;
  *sdyx += q;
}

void bn_backward_apply(std::size_t n, float a, float b, float c, float mean, const float* dy, const float* x,
                       float* dx) {
  const __m256 va = _mm256_set1_ps(a), vb = _mm256_set1_ps(b), vc = _mm256_set1_ps(c), vm = _mm256_set1_ps(mean);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 xc = _mm256_sub_ps(_mm256_loadu_ps(x + i), vm);
    const __m256 r = _mm256_fmadd_ps(va, _mm256_loadu_ps(dy + i), _mm256_fmadd_ps(vb, xc, vc));
    _mm256_storeu_ps(dx + i, r);
  }
  for (; i < n; ++i) dx[i] = a * dy[i] + b * (x[i] - mean) + c;
}

void leaky_relu(std::size_t n, float slope, const float* x, float* y) {
  const __m256 vs = _mm256_set1_ps(slope), zero = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 v = _mm256_loadu_ps(x + i);
    const __m256 pos = _mm256_cmp_ps(v, zero, _CMP_GT_OQ);
    _mm256_storeu_ps(y + i, _mm256_blendv_ps(_mm256_mul_ps(vs, v), v, pos));
  }
  for (; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : slope * x[i];
}

void leaky_relu_backward(std::size_t n, float slope, const float* x, const float* dy, float* dx) {
  const __m256 vs = _mm256_set1_ps(slope), zero = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 g = _mm256_loadu_ps(dy + i);
    const __m256 pos = _mm256_cmp_ps(_mm256_loadu_ps(x + i), zero, _CMP_GT_OQ);
    _mm256_storeu_ps(dx + i, _mm256_blendv_ps(_mm256_mul_ps(vs, g), g, pos));
  }
  for (; i < n; ++i) dx[i] = x[i] > 0.0f ? dy[i] : slope * dy[i];
}

void adam_update(std::size_t n, const AdamStep& s, const float* g, float* p, float* m, float* v) {
  const float step = s.lr / s.bias_correction1;
  const float inv_sqrt_bc2 = 1.0f / __builtin_sqrtf(s.bias_correction2);
  const __m256 b1 = _mm256_set1_ps(s.beta1), nb1 = _mm256_set1_ps(1.0f - s.beta1);
  const __m256 b2 = _mm256_set1_ps(s.beta2), nb2 = _mm256_set1_ps(1.0f - s.beta2);
  const __m256 vstep = _mm256_set1_ps(step), vbc = _mm256_set1_ps(inv_sqrt_bc2), veps = _mm256_set1_ps(s.eps);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 gi = _mm256_loadu_ps(g + i);
    const __m256 mi = _mm256_add_ps(_mm256_mul_ps(b1, _mm256_loadu_ps(m + i)), _mm256_mul_ps(nb1, gi));
    const __m256 vi =
        _mm256_add_ps(_mm256_mul_ps(b2, _mm256_loadu_ps(v + i)), _mm256_mul_ps(_mm256_mul_ps(nb2, gi), gi));
    const __m256 denom = _mm256_add_ps(_mm256_mul_ps(_mm256_sqrt_ps(vi), vbc), veps);
    const __m256 pi = _mm256_sub_ps(_mm256_loadu_ps(p + i), _mm256_mul_ps(vstep, _mm256_div_ps(mi, denom)));
    _mm256_storeu_ps(m + i, mi);
    _mm256_storeu_ps(v + i, vi);
    _mm256_storeu_ps(p + i, pi);
  }
  for (; i < n; ++i) {
    m[i] = s.beta1 * m[i] + (1.0f - s.beta1) * g[i];
    v[i] = s.beta2 * v[i] + (1.0f - s.beta2) * g[i] * g[i];
    const float denom = __builtin_sqrtf(v[i]) * inv_sqrt_bc2 + s.eps;
    p[i] -= step * (m[i] / denom);
  }
}

void cmul(std::size_t n, const cf* a, const cf* b, cf* out) {
  const float* af = reinterpret_cast<const float*>(a);
  const float* bf = reinterpret_cast<const float*>(b);
  float* of = reinterpret_cast<float*>(out);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256 va = _mm256_loadu_ps(af + 2 * i);
    const __m256 vb = _mm256_loadu_ps(bf + 2 * i);
    const __m256 br = _mm256_moveldup_ps(vb);
    const __m256 bi = _mm256_movehdup_ps(vb);
    const __m256 aswap = _mm256_permute_ps(va, 0xB1);
    _mm256_storeu_ps(of + 2 * i, _mm256_fmaddsub_ps(va, br, _mm256_mul_ps(aswap, bi)));
  }
  for (; i < n; ++i) {
    const float ar = af[2 * i], ai = af[2 * i + 1], br = bf[2 * i], bi = bf[2 * i + 1];
    of[2 * i] = ar * br - ai * bi;
    of[2 * i + 1] = ai * br + ar * bi;
  }
}

void cmul_conj_acc(std::size_t n, const cf* a, const cf* b, cf* acc) {
  const float* af = reinterpret_cast<const float*>(a);
  const float* bf = reinterpret_cast<const float*>(b);
  float* cfp = reinterpret_cast<float*>(acc);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256 va = _mm256_loadu_ps(af + 2 * i);
    const __m256 vb = _mm256_loadu_ps(bf + 2 * i);
    const __m256 ar = _mm256_moveldup_ps(va);
    const __m256 ai = _mm256_movehdup_ps(va);
    const __m256 bswap = _mm256_permute_ps(vb, 0xB1);
    const __m256 prod = _mm256_fmsubadd_ps(ar, vb, _mm256_mul_ps(ai, bswap));
    _mm256_storeu_ps(cfp + 2 * i, _mm256_add_ps(_mm256_loadu_ps(cfp + 2 * i), prod));
  }
  for (; i < n; ++i) {
    const float ar = af[2 * i], ai = af[2 * i + 1], br = bf[2 * i], bi = bf[2 * i + 1];
    cfp[2 * i] += ar * br + ai * bi;
    cfp[2 * i + 1] += ar * bi - ai * br;
  }
}

void square_acc(std::size_t n, const float* x, float* acc) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 v = _mm256_loadu_ps(x + i);
    _mm256_storeu_ps(acc + i, _mm256_fmadd_ps(v, v, _mm256_loadu_ps(acc + i)));
  }
  for (; i < n; ++i) acc[i] += x[i] * x[i];
}

constexpr KernelTable kAvx2{
    Isa::avx2,  "avx2",  sgemm,       axpy, affine,       sum_sumsq, sum_dy_dyx, bn_backward_apply, leaky_relu,
    leaky_relu_backward, adam_update, cmul, cmul_conj_acc, square_acc,
};

}  // namespace

const KernelTable* avx2_kernels_unchecked() noexcept { return &kAvx2; }

}  // namespace discus::simd
