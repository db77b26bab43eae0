#pragma once

// Packed, cache-blocked GEMM driver shared by the scalar and AVX2 kernel
// translation units. Everything here has internal linkage so each TU keeps
// its own copy compiled with its own target flags.

#include <cstddef>

namespace {

constexpr int kMR = 6;
constexpr int kNR = 16;
constexpr int kKC = 256;
constexpr int kMC = 96;
constexpr int kNC = 2048;

inline int imin(int a, int b) { return a < b ? a : b; }

void pack_a(bool trans, const float* a, int lda, int row0, int col0, int mc, int kc, float* dst) {
  for (int ir = 0; ir < mc; ir += kMR) {
    const int mr = imin(kMR, mc - ir);
    for (int p = 0; p < kc; ++p) {
      for (int i = 0; i < mr; ++i) {
        const int r = row0 + ir + i;
        const int c = col0 + p;
        dst[i] = trans ? a[static_cast<std::size_t>(c) * lda + r] : a[static_cast<std::size_t>(r) * lda + c];
      }
      for (int i = mr; i < kMR; ++i) dst[i] = 0.0f;
      dst += kMR;
    }
  }
}

void pack_b(bool trans, const float* b, int ldb, int row0, int col0, int kc, int nc, float* dst) {
  for (int jr = 0; jr < nc; jr += kNR) {
    const int nr = imin(kNR, nc - jr);
    for (int p = 0; p < kc; ++p) {
      const int r = row0 + p;
      if (!trans && nr == kNR) {
        const float* src = b + static_cast<std::size_t>(r) * ldb + col0 + jr;
        for (int j = 0; j < kNR; ++j) dst[j] = src[j];
      } else {
        for (int j = 0; j < nr; ++j) {
          const int c = col0 + jr + j;
          dst[j] = trans ? b[static_cast<std::size_t>(c) * ldb + r] : b[static_cast<std::size_t>(r) * ldb + c];
        }
        for (int j = nr; j < kNR; ++j) dst[j] = 0.0f;
      }
      dst += kNR;
    }
  }
}

// Writes alpha * acc + beta * C for the valid mr x nr corner of a tile.
inline void store_tile(const float* acc, int mr, int nr, float alpha, float beta, float* c, int ldc) {
  for (int i = 0; i < mr; ++i) {
    float* row = c + static_cast<std::size_t>(i) * ldc;
    if (beta == 0.0f) {
      for (int j = 0; j < nr; ++j) row[j] = alpha * acc[i * kNR + j];
    } else {
      for (int j = 0; j < nr; ++j) row[j] = alpha * acc[i * kNR + j] + beta * row[j];
    }
  }
}

template <class Micro>
void gemm_blocked(Micro micro, bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a,
                  int lda, const float* b, int ldb, float beta, float* c, int ldc, float* work) {
  if (m <= 0 || n <= 0) return;
  if (k <= 0 || alpha == 0.0f) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) {
        float& x = c[static_cast<std::size_t>(i) * ldc + j];
        x = beta == 0.0f ? 0.0f : beta * x;
      }
    return;
  }
  float* a_pack = work;
  float* b_pack = work + kMC * kKC;
  for (int jc = 0; jc < n; jc += kNC) {
    const int nc = imin(kNC, n - jc);
    for (int pc = 0; pc < k; pc += kKC) {
      const int kc = imin(kKC, k - pc);
      pack_b(trans_b, b, ldb, pc, jc, kc, nc, b_pack);
      const float beta_eff = pc == 0 ? beta : 1.0f;
      for (int ic = 0; ic < m; ic += kMC) {
        const int mc = imin(kMC, m - ic);
        pack_a(trans_a, a, lda, ic, pc, mc, kc, a_pack);
        for (int jr = 0; jr < nc; jr += kNR) {
          const int nr = imin(kNR, nc - jr);
          for (int ir = 0; ir < mc; ir += kMR) {
            const int mr = imin(kMR, mc - ir);
            micro(kc, a_pack + static_cast<std::size_t>(ir) * kc, b_pack + static_cast<std::size_t>(jr) * kc,
                  c + static_cast<std::size_t>(ic + ir) * ldc + jc + jr, ldc, alpha, beta_eff, mr, nr);
          }
        }
      }
    }
  }
}

}  // namespace
