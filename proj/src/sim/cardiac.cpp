#include "discus/sim/cardiac.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "discus/sim/phantom.hpp"

namespace discus {
namespace {

struct Region {
  double cx, cy, a, b;  // normalized, y up
  bool contains(double u, double v) const {
    const double du = (u - cx) / a, dv = (v - cy) / b;
    return du * du + dv * dv <= 1.0;
  }
};

constexpr Region kBody{0.0, 0.0, 0.88, 0.68};
constexpr Region kLungL{-0.46, 0.12, 0.30, 0.42};
constexpr Region kLungR{0.46, 0.12, 0.30, 0.42};
constexpr Region kLiver{0.22, -0.52, 0.52, 0.22};
constexpr Region kRv{-0.24, 0.04, 0.17, 0.23};
constexpr Region kLvOuter{0.06, 0.04, 0.27, 0.25};
constexpr Region kLvInner{0.06, 0.04, 0.17, 0.155};
constexpr double kScarFrom = 20.0 * std::numbers::pi / 180.0;
constexpr double kScarTo = 85.0 * std::numbers::pi / 180.0;

double intensity(double u, double v, const CardiacSpec& s, double gain) {
  if (!kBody.contains(u, v)) return 0.0;
  double value = 0.22;
  if (kLungL.contains(u, v) || kLungR.contains(u, v)) value = 0.03;
  if (kLiver.contains(u, v)) value = 0.35;
  if (kRv.contains(u, v)) value = 0.6 * gain;
  if (kLvOuter.contains(u, v)) {
    value = kMyocardiumIntensity;
    if (s.scar) {
      const double ang = std::atan2(v - kLvOuter.cy, u - kLvOuter.cx);
      if (ang >= kScarFrom && ang <= kScarTo) value = kMyocardiumIntensity + s.scar_gain * gain;
    }
  }
  if (kLvInner.contains(u, v)) value = kBloodIntensity * gain;
  return value;
}

}  // namespace

void CardiacSpec::validate() const {
  if (ny < 8 || nx < 8) throw ConfigError("cardiac phantom: grid must be at least 8x8");
  if (frames < 2) throw ConfigError("cardiac phantom: need at least 2 frames");
  if (!(breathing_amplitude_px >= 0.0)) throw ConfigError("cardiac phantom: breathing amplitude must be >= 0");
  if (!(contrast_drift >= 0.0 && contrast_drift < 2.0)) throw ConfigError("cardiac phantom: drift must be in [0, 2)");
  if (!(hysteresis_asymmetry >= 0.0 && hysteresis_asymmetry <= 1.0))
    throw ConfigError("cardiac phantom: hysteresis asymmetry must be in [0, 1]");
  if (!(scar_gain >= 0.0)) throw ConfigError("cardiac phantom: scar gain must be >= 0");
}

CardiacSeries make_cardiac_series(const CardiacSpec& s) {
  s.validate();
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> start(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> beat_jitter(0.0, 0.3);
  // One frame per heartbeat; roughly four heartbeats per breath.
  constexpr double kBreathsPerFrame = 0.23;
  const double phi0 = start(rng);

  CardiacSeries out;
  constexpr int kSuper = 4;
  for (int t = 0; t < s.frames; ++t) {
    const double phi = phi0 + 2.0 * std::numbers::pi * kBreathsPerFrame * t + beat_jitter(rng);
    const double loop = (1.0 - s.hysteresis_asymmetry) * std::sin(phi) + s.hysteresis_asymmetry * std::sin(2.0 * phi);
    const double shift_px = 0.5 * s.breathing_amplitude_px * loop;
    const double gain = s.frames > 1 ? 1.0 + s.contrast_drift * (0.5 - static_cast<double>(t) / (s.frames - 1)) : 1.0;
    out.displacement_px.push_back(shift_px);
    out.contrast_gain.push_back(gain);

    ComplexImage img(s.ny, s.nx);
    const double dv = shift_px / (s.ny / 2.0);
    for (int y = 0; y < s.ny; ++y)
      for (int x = 0; x < s.nx; ++x) {
        double acc = 0.0;
        for (int sy = 0; sy < kSuper; ++sy)
          for (int sx = 0; sx < kSuper; ++sx) {
            const double yy = y - 0.5 + (sy + 0.5) / kSuper;
            const double xx = x - 0.5 + (sx + 0.5) / kSuper;
            const double u = (xx - (s.nx - 1) / 2.0) / (s.nx / 2.0);
            const double v = ((s.ny - 1) / 2.0 - yy) / (s.ny / 2.0) - dv;
            acc += intensity(u, v, s, gain);
          }
        const double mag = acc / (kSuper * kSuper);
        img(y, x) = cfloat(std::polar(mag, quadratic_phase(y, x, s.ny, s.nx, s.phase_amplitude)));
      }
    out.series.frames.push_back(std::move(img));
  }
  return out;
}

ImageSeries make_cardiac_series(int ny, int nx, int frames, double breathing_amplitude, double contrast_drift,
                                bool scar, std::uint64_t seed) {
  CardiacSpec s;
  s.ny = ny;
  s.nx = nx;
  s.frames = frames;
  s.breathing_amplitude_px = breathing_amplitude;
  s.contrast_drift = contrast_drift;
  s.scar = scar;
  s.seed = seed;
  return make_cardiac_series(s).series;
}

}  // namespace discus
