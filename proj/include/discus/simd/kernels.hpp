#pragma once

// Data-parallel inner loops used by the network, the optimizer and the MRI
// operators. Every kernel has a portable scalar reference and, where the
// build and the CPU allow it, an AVX2/FMA variant. The variant is chosen once
// at runtime; DISCUS_SIMD=scalar in the environment forces the reference path.

#include <complex>
#include <cstddef>

namespace discus::simd {

enum class Isa { scalar, avx2 };

struct AdamStep {
  float lr;
  float beta1;
  float beta2;
  float eps;
  float bias_correction1;  // 1 - beta1^t
  float bias_correction2;  // 1 - beta2^t
};

struct KernelTable {
  Isa isa;
  const char* name;

  // Row-major C[M x N] = alpha * op(A) * op(B) + beta * C.
  // op(A) is M x K (A stored K x M when trans_a), op(B) is K x N.
  // `work` must hold gemm_workspace_floats() floats.
  void (*sgemm)(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a, int lda,
                const float* b, int ldb, float beta, float* c, int ldc, float* work);

  // y += a * x
  void (*axpy)(std::size_t n, float a, const float* x, float* y);
  // y = scale * x + shift
  void (*affine)(std::size_t n, float scale, float shift, const float* x, float* y);
  // Accumulates sum(x) and sum(x^2) in double.
  void (*sum_sumsq)(std::size_t n, const float* x, double* sum, double* sumsq);
  // Accumulates sum(dy) and sum(dy * (x - mean)) in double.
  void (*sum_dy_dyx)(std::size_t n, const float* dy, const float* x, float mean, double* sdy, double* sdyx);
  // dx = a * dy + b * (x - mean) + c
  void (*bn_backward_apply)(std::size_t n, float a, float b, float c, float mean, const float* dy, const float* x,
                            float* dx);

  void (*leaky_relu)(std::size_t n, float slope, const float* x, float* y);
  // dx = dy * (x > 0 ? 1 : slope), x the pre-activation input.
  void (*leaky_relu_backward)(std::size_t n, float slope, const float* x, const float* dy, float* dx);

  void (*adam_update)(std::size_t n, const AdamStep& step, const float* grad, float* param, float* m, float* v);

  // Interleaved complex: out[i] = a[i] * b[i]
  void (*cmul)(std::size_t n, const std::complex<float>* a, const std::complex<float>* b,
               std::complex<float>* out);
  // acc[i] += conj(a[i]) * b[i]
  void (*cmul_conj_acc)(std::size_t n, const std::complex<float>* a, const std::complex<float>* b,
                        std::complex<float>* acc);
  // acc[i] += x[i]^2
  void (*square_acc)(std::size_t n, const float* x, float* acc);
};

/// Floats of scratch memory `sgemm` needs.
std::size_t gemm_workspace_floats() noexcept;

const KernelTable& scalar_kernels() noexcept;
/// Null when the build lacks AVX2 support or the CPU does not report AVX2+FMA.
const KernelTable* avx2_kernels() noexcept;
/// The table selected for this process.
const KernelTable& kernels() noexcept;

/// sgemm through the active table with a per-thread workspace.
void gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a, int lda, const float* b,
          int ldb, float beta, float* c, int ldc);
void gemm(const KernelTable& table, bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a,
          int lda, const float* b, int ldb, float beta, float* c, int ldc);

}  // namespace discus::simd
