#include <cmath>

#include "discus/simd/kernels.hpp"
#include "gemm_driver.hpp"

namespace discus::simd {
namespace {

using cf = std::complex<float>;

void micro_scalar(int kc, const float* a, const float* b, float* c, int ldc, float alpha, float beta, int mr,
                  int nr) {
  float acc[kMR * kNR] = {};
  for (int p = 0; p < kc; ++p) {
    const float* ap = a + p * kMR;
    const float* bp = b + p * kNR;
    for (int i = 0; i < kMR; ++i)
      for (int j = 0; j < kNR; ++j) acc[i * kNR + j] += ap[i] * bp[j];
  }
  store_tile(acc, mr, nr, alpha, beta, c, ldc);
}

void sgemm(bool ta, bool tb, int m, int n, int k, float alpha, const float* a, int lda, const float* b, int ldb,
           float beta, float* c, int ldc, float* work) {
  gemm_blocked(micro_scalar, ta, tb, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc, work);
}

void axpy(std::size_t n, float a, const float* x, float* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void affine(std::size_t n, float scale, float shift, const float* x, float* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = scale * x[i] + shift;
}

void sum_sumsq(std::size_t n, const float* x, double* sum, double* sumsq) {
  double s = 0.0, q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = x[i];
    s += v;
    q += v * v;
  }
  *sum += s;
  *sumsq += q;
}

void sum_dy_dyx(std::size_t n, const float* dy, const float* x, float mean, double* sdy, double* sdyx) {
  double s = 0.0, q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += dy[i];
    q += static_cast<double>(dy[i]) * (x[i] - mean);
  }
  *sdy += s;
  *sdyx += q;
}

void bn_backward_apply(std::size_t n, float a, float b, float c, float mean, const float* dy, const float* x,
                       float* dx) {
  for (std::size_t i = 0; i < n; ++i) dx[i] = a * dy[i] + b * (x[i] - mean) + c;
}

void leaky_relu(std::size_t n, float slope, const float* x, float* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : slope * x[i];
}

void leaky_relu_backward(std::size_t n, float slope, const float* x, const float* dy, float* dx) {
  for (std::size_t i = 0; i < n; ++i) dx[i] = x[i] > 0.0f ? dy[i] : slope * dy[i];
}

void adam_update(std::size_t n, const AdamStep& s, const float* g, float* p, float* m, float* v) {
  const float step = s.lr / s.bias_correction1;
  const float inv_sqrt_bc2 = 1.0f / std::sqrt(s.bias_correction2);
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = s.beta1 * m[i] + (1.0f - s.beta1) * g[i];
    v[i] = s.beta2 * v[i] + (1.0f - s.beta2) * g[i] * g[i];
    const float denom = std::sqrt(v[i]) * inv_sqrt_bc2 + s.eps;
    p[i] -= step * (m[i] / denom);
  }
}

void cmul(std::size_t n, const cf* a, const cf* b, cf* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const float ar = a[i].real(), ai = a[i].imag(), br = b[i].real(), bi = b[i].imag();
    out[i] = {ar * br - ai * bi, ai * br + ar * bi};
  }
}

void cmul_conj_acc(std::size_t n, const cf* a, const cf* b, cf* acc) {
  for (std::size_t i = 0; i < n; ++i) {
    const float ar = a[i].real(), ai = a[i].imag(), br = b[i].real(), bi = b[i].imag();
    acc[i] += cf{ar * br + ai * bi, ar * bi - ai * br};
  }
}

void square_acc(std::size_t n, const float* x, float* acc) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += x[i] * x[i];
}

constexpr KernelTable kScalar{
    Isa::scalar,       "scalar",      sgemm,      axpy, affine, sum_sumsq, sum_dy_dyx, bn_backward_apply,
    leaky_relu,        leaky_relu_backward, adam_update, cmul, cmul_conj_acc, square_acc,
};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

std::size_t gemm_workspace_floats() noexcept {
  return static_cast<std::size_t>(kMC) * kKC + static_cast<std::size_t>(kKC) * kNC;
}

}  // namespace discus::simd
