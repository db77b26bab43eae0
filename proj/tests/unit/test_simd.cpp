#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "discus/simd/kernels.hpp"

using namespace discus::simd;

namespace {

std::vector<float> randv(std::size_t n, std::uint64_t seed, float lo = -1.0f, float hi = 1.0f) {
  std::mt19937_64 r(seed);
  std::uniform_real_distribution<float> d(lo, hi);
  std::vector<float> v(n);
  for (auto& x : v) x = d(r);
  return v;
}

std::vector<std::complex<float>> randc(std::size_t n, std::uint64_t seed) {
  const auto re = randv(n, seed), im = randv(n, seed + 1);
  std::vector<std::complex<float>> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = {re[i], im[i]};
  return v;
}

void close(const std::vector<float>& a, const std::vector<float>& b, float tol) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(std::abs(a[i] - b[i]) <= tol * (1.0f + std::abs(a[i])));
}

// Plain triple loop; the oracle for both sgemm tables.
void naive_gemm(bool ta, bool tb, int m, int n, int k, float alpha, const float* a, int lda, const float* b, int ldb,
                float beta, float* c, int ldc) {
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int p = 0; p < k; ++p) {
        const float av = ta ? a[p * lda + i] : a[i * lda + p];
        const float bv = tb ? b[j * ldb + p] : b[p * ldb + j];
        s += static_cast<double>(av) * bv;
      }
      c[i * ldc + j] = static_cast<float>(alpha * s + (beta == 0.0f ? 0.0 : beta * c[i * ldc + j]));
    }
}

std::vector<const KernelTable*> tables() {
  std::vector<const KernelTable*> t{&scalar_kernels()};
  if (avx2_kernels() != nullptr) t.push_back(avx2_kernels());
  return t;
}

// Odd sizes exercise every vector tail.
const std::size_t kSizes[] = {0, 1, 7, 8, 9, 31, 64, 1001};

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("active table is one of the known variants") {
    const KernelTable& k = kernels();
    CHECK((k.isa == Isa::scalar || k.isa == Isa::avx2));
    if (k.isa == Isa::avx2) CHECK(avx2_kernels() == &k);
  }

  TEST_CASE("sgemm matches the naive product for every transpose combination") {
    const int shapes[][3] = {{1, 1, 1}, {5, 7, 3}, {17, 33, 9}, {64, 70, 130}, {3, 300, 27}};
    for (const KernelTable* t : tables()) {
      for (auto& sh : shapes) {
        const int m = sh[0], n = sh[1], k = sh[2];
        for (int ta = 0; ta < 2; ++ta)
          for (int tb = 0; tb < 2; ++tb)
            for (float beta : {0.0f, 0.5f}) {
              const int lda = ta ? m + 1 : k + 2, ldb = tb ? k + 3 : n + 1, ldc = n + 4;
              const auto a = randv(static_cast<std::size_t>(ta ? k : m) * lda, 1);
              const auto b = randv(static_cast<std::size_t>(tb ? n : k) * ldb, 2);
              auto c = randv(static_cast<std::size_t>(m) * ldc, 3);
              auto ref = c;
              gemm(*t, ta, tb, m, n, k, 1.25f, a.data(), lda, b.data(), ldb, beta, c.data(), ldc);
              naive_gemm(ta, tb, m, n, k, 1.25f, a.data(), lda, b.data(), ldb, beta, ref.data(), ldc);
              CAPTURE(t->name);
              CAPTURE(m);
              CAPTURE(n);
              CAPTURE(k);
              close(c, ref, 1e-4f * static_cast<float>(k));
            }
      }
    }
  }

  TEST_CASE("elementwise kernels agree with the scalar reference") {
    const KernelTable* avx = avx2_kernels();
    if (avx == nullptr) {
      MESSAGE("AVX2 unavailable; equivalence checks skipped");
      return;
    }
    const KernelTable& s = scalar_kernels();
    for (std::size_t n : kSizes) {
      CAPTURE(n);
      const auto x = randv(n, 10), y0 = randv(n, 11), dy = randv(n, 12);

      auto ya = y0, yb = y0;
      s.axpy(n, 0.7f, x.data(), ya.data());
      avx->axpy(n, 0.7f, x.data(), yb.data());
      close(ya, yb, 1e-6f);

      s.affine(n, 1.3f, -0.2f, x.data(), ya.data());
      avx->affine(n, 1.3f, -0.2f, x.data(), yb.data());
      close(ya, yb, 1e-6f);

      double s1 = 0, s2 = 0, a1 = 0, a2 = 0;
      s.sum_sumsq(n, x.data(), &s1, &s2);
      avx->sum_sumsq(n, x.data(), &a1, &a2);
      CHECK(s1 == doctest::Approx(a1).epsilon(1e-9));
      CHECK(s2 == doctest::Approx(a2).epsilon(1e-9));

      s1 = s2 = a1 = a2 = 0;
      s.sum_dy_dyx(n, dy.data(), x.data(), 0.1f, &s1, &s2);
      avx->sum_dy_dyx(n, dy.data(), x.data(), 0.1f, &a1, &a2);
      CHECK(s1 == doctest::Approx(a1).epsilon(1e-9));
      CHECK(s2 == doctest::Approx(a2).epsilon(1e-9));

      s.bn_backward_apply(n, 0.9f, -0.3f, 0.05f, 0.1f, dy.data(), x.data(), ya.data());
      avx->bn_backward_apply(n, 0.9f, -0.3f, 0.05f, 0.1f, dy.data(), x.data(), yb.data());
      close(ya, yb, 1e-6f);

      s.leaky_relu(n, 0.2f, x.data(), ya.data());
      avx->leaky_relu(n, 0.2f, x.data(), yb.data());
      CHECK(ya == yb);

      s.leaky_relu_backward(n, 0.2f, x.data(), dy.data(), ya.data());
      avx->leaky_relu_backward(n, 0.2f, x.data(), dy.data(), yb.data());
      CHECK(ya == yb);

      ya = y0;
      yb = y0;
      s.square_acc(n, x.data(), ya.data());
      avx->square_acc(n, x.data(), yb.data());
      close(ya, yb, 1e-6f);

      const AdamStep st{1e-3f, 0.9f, 0.999f, 1e-8f, 1.0f - 0.9f * 0.9f, 1.0f - 0.999f * 0.999f};
      auto pa = y0, pb = y0, ma = randv(n, 13), mb = ma, va = randv(n, 14, 0.0f, 1.0f), vb = va;
      s.adam_update(n, st, dy.data(), pa.data(), ma.data(), va.data());
      avx->adam_update(n, st, dy.data(), pb.data(), mb.data(), vb.data());
      close(pa, pb, 1e-5f);
      close(ma, mb, 1e-6f);
      close(va, vb, 1e-6f);

      const auto ca = randc(n, 20), cb = randc(n, 22);
      std::vector<std::complex<float>> oa(n), ob(n);
      s.cmul(n, ca.data(), cb.data(), oa.data());
      avx->cmul(n, ca.data(), cb.data(), ob.data());
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(oa[i] - ob[i]) <= 1e-6f);
      auto acc_a = randc(n, 24), acc_b = acc_a;
      s.cmul_conj_acc(n, ca.data(), cb.data(), acc_a.data());
      avx->cmul_conj_acc(n, ca.data(), cb.data(), acc_b.data());
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(acc_a[i] - acc_b[i]) <= 1e-6f);
    }
  }

  TEST_CASE("scalar kernels against closed forms") {
    const KernelTable& s = scalar_kernels();
    const std::vector<float> x{-2.0f, 0.0f, 3.0f};
    std::vector<float> y(3);
    s.leaky_relu(3, 0.2f, x.data(), y.data());
    CHECK(y == std::vector<float>{-0.4f, 0.0f, 3.0f});
    double sum = 0, sq = 0;
    s.sum_sumsq(3, x.data(), &sum, &sq);
    CHECK(sum == 1.0);
    CHECK(sq == 13.0);
    // One Adam step from zero moments moves each parameter by lr * sign(g).
    const AdamStep st{0.1f, 0.9f, 0.999f, 0.0f, 0.1f, 0.001f};
    std::vector<float> p{1.0f, 1.0f}, g{2.0f, -5.0f}, m(2, 0.0f), v(2, 0.0f);
    s.adam_update(2, st, g.data(), p.data(), m.data(), v.data());
    CHECK(p[0] == doctest::Approx(0.9f));
    CHECK(p[1] == doctest::Approx(1.1f));
  }
}
