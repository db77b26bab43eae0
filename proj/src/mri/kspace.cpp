#include "discus/mri/kspace.hpp"

#include <cmath>
#include <random>

#include "discus/mri/forward.hpp"

namespace discus {

std::size_t KSpaceSeries::measured_count(int t) const {
  return static_cast<std::size_t>(coils) * nx * mask.lines_in_frame(t);
}

KSpaceSeries KSpaceSeries::first_frames(int t) const {
  if (t < 1 || t > frames) throw DimensionError("first_frames: frame count out of range");
  KSpaceSeries out = *this;
  out.frames = t;
  out.samples.resize(t * frame_size());
  out.mask = mask.first_frames(t);
  return out;
}

KSpaceSeries simulate_kspace(const ImageSeries& series, const CoilSensitivities& maps, const SamplingMask& mask) {
  series.validate();
  if (series.ny() != maps.ny() || series.nx() != maps.nx())
    throw DimensionError("simulate_kspace: series and coil maps differ in shape");
  if (mask.frames() != series.frame_count() || mask.pe() != series.ny())
    throw DimensionError("simulate_kspace: mask must be (T, Ny)");
  KSpaceSeries k;
  k.frames = series.frame_count();
  k.coils = maps.coils();
  k.ny = series.ny();
  k.nx = series.nx();
  k.mask = mask;
  k.samples.resize(k.frames * k.frame_size());
  SenseOperator op(maps);
  for (int t = 0; t < k.frames; ++t) op.forward(series.frames[t].span(), mask.row(t), k.frame(t));
  return k;
}

KSpaceSeries add_noise(const KSpaceSeries& k, double snr_db, std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0) return k;
  double power = 0.0;
  std::size_t count = 0;
  for (int t = 0; t < k.frames; ++t) {
    const auto row = k.mask.row(t);
    for (int c = 0; c < k.coils; ++c)
      for (int y = 0; y < k.ny; ++y) {
        if (!row[y]) continue;
        const cfloat* line = k.frame(t).data() + (static_cast<std::size_t>(c) * k.ny + y) * k.nx;
        for (int x = 0; x < k.nx; ++x) power += std::norm(std::complex<double>(line[x]));
        count += k.nx;
      }
  }
  if (count == 0 || !(power > 0.0)) throw UndefinedError("add_noise: zero signal energy, SNR undefined");
  power /= static_cast<double>(count);

  const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma / std::sqrt(2.0));
  KSpaceSeries out = k;
  for (int t = 0; t < k.frames; ++t) {
    const auto row = k.mask.row(t);
    for (int c = 0; c < k.coils; ++c)
      for (int y = 0; y < k.ny; ++y) {
        if (!row[y]) continue;
        cfloat* line = out.frame(t).data() + (static_cast<std::size_t>(c) * k.ny + y) * k.nx;
        for (int x = 0; x < k.nx; ++x) {
          const double re = gauss(rng);
          const double im = gauss(rng);
          line[x] += cfloat(static_cast<float>(re), static_cast<float>(im));
        }
      }
  }
  out.noise_sigma = sigma;
  return out;
}

KSpaceSeries normalize_kspace(const KSpaceSeries& k, double* applied_scale) {
  double peak = 0.0;
  for (const auto& v : k.samples) peak = std::max(peak, static_cast<double>(std::abs(v)));
  if (!(peak > 0.0)) throw UndefinedError("normalize_kspace: all-zero data");
  const double scale = 10.0 / peak;
  KSpaceSeries out = k;
  const float s = static_cast<float>(scale);
  for (auto& v : out.samples) v *= s;
  out.noise_sigma *= scale;
  out.scale = k.scale * scale;
  if (applied_scale != nullptr) *applied_scale = scale;
  return out;
}

}  // namespace discus
