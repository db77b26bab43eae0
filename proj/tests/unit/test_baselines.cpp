#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "discus/baselines/cs.hpp"
#include "discus/baselines/lps.hpp"
#include "discus/baselines/prox.hpp"
#include "discus/baselines/wavelet.hpp"
#include "discus/mri/mask.hpp"
#include "discus/sim/coils.hpp"
#include "discus/sim/phantom.hpp"

using namespace discus;

namespace {

Eigen::MatrixXcd random_matrix(int m, int n, std::uint64_t seed) {
  std::mt19937_64 r(seed);
  std::normal_distribution<double> d;
  Eigen::MatrixXcd a(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = {d(r), d(r)};
  return a;
}

// SVT through the eigendecomposition of M^H M: with M^H M = V diag(s^2) V^H,
// SVT(M) = M V diag(max(s - tau, 0) / s) V^H. Independent of the SVD path.
Eigen::MatrixXcd svt_oracle(const Eigen::MatrixXcd& m, double tau) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.adjoint() * m);
  const Eigen::VectorXd ev = es.eigenvalues();
  Eigen::VectorXd w(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double s = std::sqrt(std::max(ev(i), 0.0));
    w(i) = s > 0 ? std::max(s - tau, 0.0) / s : 0.0;
  }
  return m * es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

double series_nmse_db(const ImageSeries& ref, const ImageSeries& est) {
  double num = 0, den = 0;
  for (int t = 0; t < ref.frame_count(); ++t)
    for (std::size_t i = 0; i < ref.frames[t].size(); ++i) {
      num += std::norm(cdouble(ref.frames[t][i]) - cdouble(est.frames[t][i]));
      den += std::norm(cdouble(ref.frames[t][i]));
    }
  return 10 * std::log10(num / den);
}

// Rank-1 scaled phantom plus five pixels that each carry one temporal
// Fourier component: exactly low-rank plus temporally sparse.
ImageSeries rank1_plus_sparse(int n, int frames) {
  const ComplexImage u = shepp_logan(n, 0.3);
  const double pi = std::acos(-1.0);
  ImageSeries s;
  for (int t = 0; t < frames; ++t) {
    ComplexImage f(n, n);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = u[i] * static_cast<float>(1.0 + 0.3 * std::sin(2 * pi * t / frames));
    const int px[] = {300, 520, 610, 700, 815};
    for (int k = 0; k < 5; ++k) {
      const double ph = 2 * pi * (k + 1) * t / frames;
      f[px[k]] += cfloat(static_cast<float>(0.5 * std::cos(ph)), static_cast<float>(0.5 * std::sin(ph)));
    }
    s.frames.push_back(f);
  }
  return s;
}

}  // namespace

TEST_SUITE("baselines") {
  TEST_CASE("soft threshold") {
    CHECK(soft_threshold(3.0, 1.0) == 2.0);
    CHECK(soft_threshold(-3.0, 1.0) == -2.0);
    CHECK(soft_threshold(0.5, 1.0) == 0.0);
    const auto c = soft_threshold(std::complex<double>(3.0, 4.0), 1.0);
    CHECK(std::abs(c - std::complex<double>(2.4, 3.2)) < 1e-15);
    CHECK(soft_threshold(std::complex<double>(0.0, 0.0), 1.0) == std::complex<double>(0.0, 0.0));
    std::vector<cdouble> v{{3, 4}, {0.1, 0}};
    soft_threshold_inplace(v, 1.0);
    CHECK(std::abs(v[0] - cdouble(2.4, 3.2)) < 1e-15);
    CHECK(v[1] == cdouble(0, 0));
  }

  TEST_CASE("svt matches the eigendecomposition oracle") {
    for (auto [m, n, seed] : {std::tuple{20, 8, 1}, std::tuple{8, 20, 2}, std::tuple{64, 32, 3}, std::tuple{5, 5, 4}}) {
      const Eigen::MatrixXcd a = random_matrix(m, n, seed);
      double smax = 0;
      const auto out = svt(a, 2.5, &smax);
      const Eigen::MatrixXcd ref = m >= n ? Eigen::MatrixXcd(svt_oracle(a, 2.5)) : Eigen::MatrixXcd(svt_oracle(a.adjoint(), 2.5).adjoint());
      CHECK((out - ref).norm() <= 1e-6 * std::max(1.0, ref.norm()));
      Eigen::JacobiSVD<Eigen::MatrixXcd> js(a);
      CHECK(smax == doctest::Approx(js.singularValues()(0)).epsilon(1e-10));
    }
    // tau beyond the top singular value yields zero; tau = 0 is the identity.
    const auto a = random_matrix(6, 4, 9);
    CHECK(svt(a, 1e6).norm() == 0.0);
    CHECK((svt(a, 0.0) - a).norm() < 1e-10);
    Eigen::MatrixXcd bad = a;
    bad(0, 0) = {std::nan(""), 0.0};
    CHECK_THROWS_AS(svt(bad, 1.0), NumericalError);
  }

  TEST_CASE("D4 wavelet is orthonormal with two vanishing moments") {
    const Wavelet2D w(32, 64, 3);
    std::mt19937_64 r(5);
    std::normal_distribution<double> d;
    std::vector<cdouble> x(32 * 64), c(x.size()), back(x.size());
    for (auto& v : x) v = {d(r), d(r)};
    w.forward(x, c);
    double ex = 0, ec = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      ex += std::norm(x[i]);
      ec += std::norm(c[i]);
    }
    CHECK(ec == doctest::Approx(ex).epsilon(1e-12));
    w.inverse(c, back);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(back[i] - x[i]) < 1e-12);
    // Adjoint equals inverse: <W x, y> = <x, W^-1 y>.
    std::vector<cdouble> y(x.size()), wy(x.size());
    for (auto& v : y) v = {d(r), d(r)};
    w.inverse(y, wy);
    cdouble lhs = 0, rhs = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      lhs += std::conj(c[i]) * y[i];
      rhs += std::conj(x[i]) * wy[i];
    }
    CHECK(std::abs(lhs - rhs) < 1e-10);
    // A constant image lives entirely in the coarsest approximation band.
    std::vector<cdouble> one(x.size(), 1.0);
    w.forward(one, c);
    double detail = 0;
    for (int yy = 0; yy < 32; ++yy)
      for (int xx = 0; xx < 64; ++xx)
        if (yy >= 4 || xx >= 8) detail += std::norm(c[yy * 64 + xx]);
    CHECK(detail < 1e-20);
    CHECK(Wavelet2D::max_levels(64, 64, 3) == 3);
    CHECK(Wavelet2D::max_levels(24, 64, 5) == 2);
    CHECK_THROWS(Wavelet2D(30, 16, 3));
  }

  TEST_CASE("CS on noiseless fully sampled data") {
    ImageSeries s;
    s.frames = {shepp_logan(64, 0.5), shepp_logan(64, 0.2)};
    const auto maps = normalize_coil_maps(simulate_coil_maps(64, 64, 2, 4));
    const KSpaceSeries k = normalize_kspace(simulate_kspace(s, maps, central_random_mask(64, 1.0, 6, 2, 1)));
    CsConfig c;
    c.lambda_w = 1e-4;
    c.iterations = 30;
    const CsResult r = recon_cs(k, maps, c);
    CHECK(series_nmse_db(s, r.frames) <= -40.0);
    REQUIRE(r.objective.size() == 2u);
    for (const auto& f : r.objective)
      for (std::size_t i = 1; i < f.size(); ++i) CHECK(f[i] <= f[i - 1] * (1 + 1e-12));
  }

  TEST_CASE("CS pads non-dyadic grids") {
    ImageSeries s;
    s.frames = {shepp_logan(40, 0.5)};
    const auto maps = CoilSensitivities::ones(40, 40);
    const KSpaceSeries k = normalize_kspace(simulate_kspace(s, maps, central_random_mask(40, 1.0, 4, 1, 1)));
    CsConfig c;
    c.lambda_w = 1e-4;
    c.iterations = 30;
    CHECK(series_nmse_db(s, recon_cs(k, maps, c).frames) <= -40.0);
    c.lambda_w = -1.0;
    CHECK_THROWS_AS(recon_cs(k, maps, c), ConfigError);
  }

  TEST_CASE("L+S recovers a rank-1 plus sparse series at R=2") {
    const ImageSeries s = rank1_plus_sparse(32, 16);
    const auto maps = CoilSensitivities::ones(32, 32);
    const KSpaceSeries k = normalize_kspace(simulate_kspace(s, maps, central_random_mask(32, 2.0, 4, 16, 3)));
    LpsConfig c;
    c.lambda_l = 0.01;
    c.lambda_s = 0.01;
    c.iterations = 300;
    c.tolerance = 1e-9;
    const LpsResult r = recon_lps(k, maps, c);
    CHECK(series_nmse_db(s, r.recon) <= -30.0);
    for (int t = 0; t < 16; ++t)
      for (std::size_t i = 0; i < 10; ++i)
        CHECK(std::abs(r.recon.frames[t][i] - (r.low_rank.frames[t][i] + r.sparse.frames[t][i])) < 1e-5);
  }
}
