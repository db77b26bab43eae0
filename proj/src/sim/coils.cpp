#include "discus/sim/coils.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace discus {

CoilSensitivities simulate_coil_maps(int ny, int nx, int coils, std::uint64_t seed) {
  if (ny < 1 || nx < 1) throw DimensionError("simulate_coil_maps: grid must be non-empty");
  if (coils < 1) throw ConfigError("simulate_coil_maps: need at least one coil");
  constexpr double kRingRadius = 1.3;  // in half-FOV units
  constexpr double kWidth = 0.9;
  constexpr double kMaxRamp = 0.6;     // radians across half the FOV

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.2, 0.2);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> phase0(-std::numbers::pi, std::numbers::pi);

  CoilSensitivities s(coils, ny, nx);
  for (int c = 0; c < coils; ++c) {
    const double theta = 2.0 * std::numbers::pi * c / coils + jitter(rng);
    const double cu = kRingRadius * std::cos(theta), cv = kRingRadius * std::sin(theta);
    const double p0 = phase0(rng), ku = kMaxRamp * unit(rng), kv = kMaxRamp * unit(rng);
    auto map = s.coil(c);
    for (int y = 0; y < ny; ++y) {
      const double v = ((ny - 1) / 2.0 - y) / (ny / 2.0);
      for (int x = 0; x < nx; ++x) {
        const double u = (x - (nx - 1) / 2.0) / (nx / 2.0);
        const double d2 = (u - cu) * (u - cu) + (v - cv) * (v - cv);
        const double mag = std::exp(-d2 / (2.0 * kWidth * kWidth));
        map[static_cast<std::size_t>(y) * nx + x] = cfloat(std::polar(mag, p0 + ku * u + kv * v));
      }
    }
  }
  return s;
}

RealImage coil_rss(const CoilSensitivities& maps) {
  RealImage rss(maps.ny(), maps.nx());
  for (std::size_t i = 0; i < maps.pixels(); ++i) {
    double acc = 0.0;
    for (int c = 0; c < maps.coils(); ++c) acc += std::norm(std::complex<double>(maps.coil(c)[i]));
    rss[i] = static_cast<float>(std::sqrt(acc));
  }
  return rss;
}

CoilSensitivities normalize_coil_maps(const CoilSensitivities& maps) {
  const RealImage rss = coil_rss(maps);
  CoilSensitivities out = maps;
  for (std::size_t i = 0; i < maps.pixels(); ++i) {
    if (!(rss[i] > 0.0f)) throw UndefinedError("normalize_coil_maps: zero RSS pixel");
    for (int c = 0; c < maps.coils(); ++c) out.coil(c)[i] /= rss[i];
  }
  return out;
}

double coil_mean_gradient(const CoilSensitivities& maps, int c) {
  const auto m = maps.coil(c);
  const int ny = maps.ny(), nx = maps.nx();
  double acc = 0.0;
  for (int y = 0; y + 1 < ny; ++y)
    for (int x = 0; x + 1 < nx; ++x) {
      const auto p = m[static_cast<std::size_t>(y) * nx + x];
      const auto gx = m[static_cast<std::size_t>(y) * nx + x + 1] - p;
      const auto gy = m[static_cast<std::size_t>(y + 1) * nx + x] - p;
      acc += std::sqrt(std::norm(gx) + std::norm(gy));
    }
  return acc / (static_cast<double>(ny - 1) * (nx - 1));
}

}  // namespace discus
