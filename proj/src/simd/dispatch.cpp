#include <cstdlib>
#include <cstring>
#include <vector>

#include "discus/simd/kernels.hpp"

namespace discus::simd {

#if defined(DISCUS_HAVE_AVX2)
const KernelTable* avx2_kernels_unchecked() noexcept;
#endif

const KernelTable* avx2_kernels() noexcept {
#if defined(DISCUS_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? avx2_kernels_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& kernels() noexcept {
  static const KernelTable* chosen = [] {
    const char* force = std::getenv("DISCUS_SIMD");
    if (force != nullptr && std::strcmp(force, "scalar") == 0) return &scalar_kernels();
    const KernelTable* fast = avx2_kernels();
    return fast != nullptr ? fast : &scalar_kernels();
  }();
  return *chosen;
}

void gemm(const KernelTable& table, bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a,
          int lda, const float* b, int ldb, float beta, float* c, int ldc) {
  thread_local std::vector<float> work(gemm_workspace_floats());
  table.sgemm(trans_a, trans_b, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc, work.data());
}

void gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a, int lda, const float* b,
          int ldb, float beta, float* c, int ldc) {
  gemm(kernels(), trans_a, trans_b, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

}  // namespace discus::simd
