#include <doctest.h>

#include <cmath>

#include "discus/sim/cardiac.hpp"
#include "discus/sim/coils.hpp"
#include "discus/sim/motion.hpp"
#include "discus/sim/phantom.hpp"

using namespace discus;

namespace {

double max_abs(const ComplexImage& img) {
  double m = 0;
  for (const auto& v : img.values()) m = std::max(m, static_cast<double>(std::abs(v)));
  return m;
}

}  // namespace

TEST_SUITE("sim") {
  TEST_CASE("shepp-logan magnitude and phase") {
    const ComplexImage p = shepp_logan(64, 0.0);
    CHECK(max_abs(p) == doctest::Approx(1.0));
    for (const auto& v : p.values()) {
      CHECK(std::abs(v) >= 0.0f);
      CHECK(v.imag() == doctest::Approx(0.0).epsilon(1e-6));
    }
    CHECK(std::abs(p(0, 0)) == 0.0f);  // outside the skull
    CHECK(std::abs(p(32, 32)) > 0.0f);
    const ComplexImage q = shepp_logan(64, 0.5);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(q[i]) == doctest::Approx(std::abs(p[i])).epsilon(1e-5));
    CHECK_THROWS(shepp_logan(16, 0.5));
  }

  TEST_CASE("motion modes and ground-truth dimensionality") {
    const ComplexImage base = shepp_logan(64, 0.5);
    for (auto [mode, dim] : {std::pair{MotionMode::rotation_only, 1}, std::pair{MotionMode::translation_only, 1},
                             std::pair{MotionMode::both, 2}}) {
      MotionSpec ms;
      ms.mode = mode;
      ms.seed = 5;
      auto [series, record] = make_dynamic_series(base, 12, ms);
      CHECK(series.frame_count() == 12);
      CHECK(record.true_dimensionality() == dim);
      CHECK(series.frames[0] == base);
      for (const auto& m : record.frames) {
        CHECK(std::abs(m.angle_deg) <= 3.0);
        CHECK(std::abs(m.shift_x) <= 3.0);
        if (mode == MotionMode::rotation_only) CHECK(m.shift_x == 0.0);
        if (mode == MotionMode::translation_only) CHECK(m.angle_deg == 0.0);
      }
      for (const auto& f : series.frames) {
        CHECK(all_finite(f.span()));
        CHECK(max_abs(f) <= 1.0 + 1e-6);
      }
      auto again = make_dynamic_series(base, 12, ms);
      CHECK(again.first.frames == series.frames);
    }
    CHECK(motion_mode_from_name("translation_only") == MotionMode::translation_only);
    CHECK_THROWS(motion_mode_from_name("twist"));
  }

  TEST_CASE("rigid transform") {
    const ComplexImage base = shepp_logan(64, 0.5);
    CHECK(rigid_transform(base, 0.0, 0.0) == base);
    const ComplexImage s = rigid_transform(base, 0.0, 2.0);
    for (int y = 0; y < 64; ++y)
      for (int x = 2; x < 64; ++x) CHECK(s(y, x) == base(y, x - 2));
    // A full turn in four quarter steps returns the original up to resampling.
    ComplexImage r = base;
    for (int i = 0; i < 4; ++i) r = rigid_transform(r, 90.0, 0.0);
    double err = 0, ref = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      err += std::norm(r[i] - base[i]);
      ref += std::norm(base[i]);
    }
    CHECK(err / ref < 1e-6);
  }

  TEST_CASE("coil maps are smooth and normalized") {
    const CoilSensitivities raw = simulate_coil_maps(64, 64, 4, 3);
    CHECK(raw.coils() == 4);
    const CoilSensitivities maps = normalize_coil_maps(raw);
    const RealImage rss = coil_rss(maps);
    for (const auto v : rss.values()) CHECK(v == doctest::Approx(1.0f).epsilon(1e-4));
    for (int c = 0; c < 4; ++c) CHECK(coil_mean_gradient(maps, c) < 0.1);
    CHECK(simulate_coil_maps(64, 64, 4, 3) == raw);
    CHECK_FALSE(simulate_coil_maps(64, 64, 4, 4) == raw);
    CoilSensitivities zero(1, 8, 8);
    CHECK_THROWS_AS(normalize_coil_maps(zero), UndefinedError);
  }

  TEST_CASE("cardiac stand-in") {
    CardiacSpec spec;
    spec.frames = 16;
    spec.contrast_drift = 0.2;
    spec.seed = 2;
    const CardiacSeries c = make_cardiac_series(spec);
    CHECK(c.series.frame_count() == 16);
    CHECK(c.displacement_px.size() == 16u);
    double lo = 1e9, hi = -1e9;
    for (double d : c.displacement_px) {
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    CHECK(hi - lo <= spec.breathing_amplitude_px + 1e-9);
    CHECK(hi - lo > 0.5 * spec.breathing_amplitude_px);
    for (const auto& f : c.series.frames) CHECK(all_finite(f.span()));
    CHECK(make_cardiac_series(spec).series.frames == c.series.frames);
    spec.breathing_amplitude_px = 0.0;
    spec.contrast_drift = 0.0;
    const CardiacSeries still = make_cardiac_series(spec);
    CHECK(still.series.frames.front() == still.series.frames.back());
  }
}
