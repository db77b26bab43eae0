#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <set>

#include "discus/mri/fft.hpp"
#include "discus/mri/forward.hpp"
#include "discus/mri/kspace.hpp"
#include "discus/mri/mask.hpp"
#include "discus/sim/coils.hpp"
#include "discus/sim/phantom.hpp"

using namespace discus;

namespace {

template <class T>
std::vector<std::complex<T>> randc(std::size_t n, std::mt19937_64& r) {
  std::normal_distribution<T> d;
  std::vector<std::complex<T>> v(n);
  for (auto& x : v) x = {d(r), d(r)};
  return v;
}

// Direct O(N^2) centred unitary DFT used as the oracle for fft2c.
std::vector<cdouble> naive_fft2c(const std::vector<cdouble>& x, int ny, int nx) {
  std::vector<cdouble> out(x.size());
  const double pi = std::acos(-1.0);
  for (int ky = 0; ky < ny; ++ky)
    for (int kx = 0; kx < nx; ++kx) {
      cdouble s = 0;
      for (int y = 0; y < ny; ++y)
        for (int xx = 0; xx < nx; ++xx) {
          const double ph = -2 * pi * (double(ky - ny / 2) * (y - ny / 2) / ny + double(kx - nx / 2) * (xx - nx / 2) / nx);
          s += x[y * nx + xx] * cdouble(std::cos(ph), std::sin(ph));
        }
      out[ky * nx + kx] = s / std::sqrt(double(ny * nx));
    }
  return out;
}

}  // namespace

TEST_SUITE("mri") {
  TEST_CASE("centred FFT matches the direct DFT and is unitary") {
    std::mt19937_64 r(1);
    for (auto [ny, nx] : {std::pair{8, 8}, std::pair{6, 10}, std::pair{9, 7}}) {
      auto x = randc<double>(ny * nx, r);
      const auto ref = naive_fft2c(x, ny, nx);
      auto y = x;
      fft2c(std::span<cdouble>(y), ny, nx);
      for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(y[i] - ref[i]) < 1e-10);
      ifft2c(std::span<cdouble>(y), ny, nx);
      for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(y[i] - x[i]) < 1e-12);
    }
    // Single precision agrees with double.
    auto xf = randc<float>(64, r);
    std::vector<cdouble> xd(xf.begin(), xf.end());
    fft2c(std::span<cfloat>(xf), 8, 8);
    fft2c(std::span<cdouble>(xd), 8, 8);
    for (std::size_t i = 0; i < xf.size(); ++i) CHECK(std::abs(cdouble(xf[i]) - xd[i]) < 1e-5);
    // Centred convention: a constant image maps to a spike at (ny/2, nx/2).
    std::vector<cdouble> ones(64, 1.0);
    fft2c(std::span<cdouble>(ones), 8, 8);
    CHECK(std::abs(ones[4 * 8 + 4] - cdouble(8.0)) < 1e-12);
  }

  TEST_CASE("temporal FFT along axis 0 is unitary") {
    std::mt19937_64 r(2);
    auto x = randc<double>(12 * 5, r);
    auto y = x;
    fft_axis0(std::span<cdouble>(y), 12, 5, false);
    double ex = 0, ey = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      ex += std::norm(x[i]);
      ey += std::norm(y[i]);
    }
    CHECK(ey == doctest::Approx(ex).epsilon(1e-12));
    // DC of column 0 is the scaled sum.
    cdouble s = 0;
    for (int t = 0; t < 12; ++t) s += x[t * 5];
    CHECK(std::abs(y[0] - s / std::sqrt(12.0)) < 1e-12);
    fft_axis0(std::span<cdouble>(y), 12, 5, true);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(y[i] - x[i]) < 1e-12);
  }

  TEST_CASE("adjoint inner-product identity over random draws") {
    std::mt19937_64 r(3);
    int draws = 0;
    for (double accel : {1.0, 2.0, 4.0})
      for (int k = 0; k < 10; ++k, ++draws) {
        const int ny = 16 + 8 * (k % 3), nx = 16, coils = 1 + k % 4;
        const SamplingMask mask = central_random_mask(ny, accel, 4, 1, r());
        const auto maps = randc<double>(static_cast<std::size_t>(coils) * ny * nx, r);
        const auto x = randc<double>(ny * nx, r);
        auto y = randc<double>(static_cast<std::size_t>(coils) * ny * nx, r);
        for (int c = 0; c < coils; ++c)
          for (int yy = 0; yy < ny; ++yy)
            if (!mask.row(0)[yy])
              for (int xx = 0; xx < nx; ++xx) y[(c * ny + yy) * nx + xx] = 0;
        std::vector<cdouble> ax(y.size()), ahy(x.size());
        sense_forward<double>(x, maps, coils, ny, nx, mask.row(0), ax);
        sense_adjoint<double>(y, maps, coils, ny, nx, mask.row(0), ahy);
        cdouble lhs = 0, rhs = 0;
        for (std::size_t i = 0; i < y.size(); ++i) lhs += std::conj(ax[i]) * y[i];
        for (std::size_t i = 0; i < x.size(); ++i) rhs += std::conj(x[i]) * ahy[i];
        CHECK(std::abs(lhs - rhs) / std::abs(lhs) < 1e-10);
      }
    CHECK(draws == 30);
  }

  TEST_CASE("float operator agrees with the double path and zeroes unsampled lines") {
    std::mt19937_64 r(4);
    const CoilSensitivities maps = normalize_coil_maps(simulate_coil_maps(32, 32, 3, 1));
    const SamplingMask mask = central_random_mask(32, 2.0, 4, 1, 9);
    ComplexImage x(32, 32, randc<float>(1024, r));
    const auto y = apply_forward(x, maps, mask.row(0));
    for (int c = 0; c < 3; ++c)
      for (int yy = 0; yy < 32; ++yy)
        if (!mask.row(0)[yy])
          for (int xx = 0; xx < 32; ++xx) CHECK(y[(c * 32 + yy) * 32 + xx] == cfloat{});
    std::vector<cdouble> xd(x.values().begin(), x.values().end()), md(maps.values().begin(), maps.values().end()),
        yd(y.size());
    sense_forward<double>(xd, md, 3, 32, 32, mask.row(0), yd);
    double err = 0, ref = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      err += std::norm(cdouble(y[i]) - yd[i]);
      ref += std::norm(yd[i]);
    }
    CHECK(std::sqrt(err / ref) < 1e-6);
    CHECK_THROWS_AS(apply_forward(ComplexImage(16, 32), maps, mask.row(0)), DimensionError);
  }

  TEST_CASE("central random mask structure") {
    const SamplingMask m = central_random_mask(64, 2.0, 6, 20, 5);
    CHECK(m.frames() == 20);
    CHECK(m.pe() == 64);
    std::set<std::vector<std::uint8_t>> distinct;
    for (int t = 0; t < 20; ++t) {
      CHECK(m.lines_in_frame(t) == 32);
      const auto row = m.row(t);
      for (int i = 0; i < 6; ++i) CHECK(row[SamplingMask::acs_start(64, 6) + i] == 1);
      distinct.insert({row.begin(), row.end()});
    }
    CHECK(distinct.size() > 1);
    CHECK(central_random_mask(64, 2.0, 6, 20, 5) == m);
    const SamplingMask full = central_random_mask(64, 1.0, 6, 2, 5);
    CHECK(full.lines_in_frame(0) == 64);
    CHECK_THROWS(central_random_mask(64, 0.5, 6, 2, 1));
    CHECK_THROWS(central_random_mask(64, 32.0, 6, 2, 1));  // fewer lines than ACS
  }

  TEST_CASE("GRO mask structure") {
    const SamplingMask m = gro_mask(64, 32, 4.0, 6);
    std::vector<int> hits(64, 0);
    for (int t = 0; t < 32; ++t) {
      CHECK(m.lines_in_frame(t) == 16);
      for (int i = 0; i < 6; ++i) CHECK(m.row(t)[29 + i] == 1);
      for (int i = 0; i < 64; ++i) hits[i] += m.row(t)[i];
    }
    CHECK(gro_mask(64, 32, 4.0, 6) == m);
    // Over the series every line is visited, with the centre denser than the edge.
    int visited = 0;
    for (int h : hits) visited += h > 0;
    CHECK(visited >= 60);
    CHECK(hits[20] + hits[44] > hits[1] + hits[62]);
    // Consecutive frames differ.
    CHECK_FALSE(std::equal(m.row(0).begin(), m.row(0).end(), m.row(1).begin()));
  }

  TEST_CASE("noise calibration and normalization") {
    const ComplexImage base = shepp_logan(64, 0.5);
    ImageSeries s;
    s.frames.assign(64, base);
    const auto maps = CoilSensitivities::ones(64, 64);
    const SamplingMask mask = central_random_mask(64, 2.0, 6, 64, 1);
    const KSpaceSeries clean = simulate_kspace(s, maps, mask);
    const KSpaceSeries noisy = add_noise(clean, 25.0, 8);
    double sig = 0, noise = 0;
    std::size_t n = 0;
    for (int t = 0; t < clean.frames; ++t)
      for (int y = 0; y < 64; ++y) {
        if (!mask.row(t)[y]) {
          for (int x = 0; x < 64; ++x) CHECK(noisy.samples[(t * 64 + y) * 64 + x] == cfloat{});
          continue;
        }
        for (int x = 0; x < 64; ++x) {
          const std::size_t i = (t * 64 + y) * 64 + x;
          sig += std::norm(cdouble(clean.samples[i]));
          noise += std::norm(cdouble(noisy.samples[i]) - cdouble(clean.samples[i]));
          ++n;
        }
      }
    REQUIRE(n >= 100000u);
    CHECK(std::abs(10 * std::log10(sig / noise) - 25.0) < 0.1);
    CHECK(add_noise(clean, kNoiselessSnr, 1).samples == clean.samples);
    CHECK(add_noise(clean, 25.0, 8).samples == noisy.samples);

    double applied = 0;
    const KSpaceSeries norm = normalize_kspace(noisy, &applied);
    double mx = 0;
    for (const auto& v : norm.samples) mx = std::max(mx, static_cast<double>(std::abs(v)));
    CHECK(std::abs(mx - 10.0) < 1e-5);
    CHECK(norm.scale == doctest::Approx(applied * noisy.scale));
    KSpaceSeries zero = clean;
    std::fill(zero.samples.begin(), zero.samples.end(), cfloat{});
    CHECK_THROWS_AS(normalize_kspace(zero), UndefinedError);
    CHECK_THROWS_AS(add_noise(zero, 25.0, 1), UndefinedError);
  }

  TEST_CASE("first_frames keeps mask rows aligned") {
    ImageSeries s;
    s.frames.assign(6, shepp_logan(32, 0.1));
    const SamplingMask mask = central_random_mask(32, 2.0, 4, 6, 2);
    const KSpaceSeries k = simulate_kspace(s, CoilSensitivities::ones(32, 32), mask);
    const KSpaceSeries k3 = k.first_frames(3);
    CHECK(k3.frames == 3);
    CHECK(k3.mask.frames() == 3);
    for (int t = 0; t < 3; ++t) CHECK(std::equal(k3.mask.row(t).begin(), k3.mask.row(t).end(), mask.row(t).begin()));
    CHECK_THROWS_AS(k.first_frames(7), DimensionError);
  }
}
