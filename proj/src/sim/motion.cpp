#include "discus/sim/motion.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace discus {

const char* motion_mode_name(MotionMode m) noexcept {
  switch (m) {
    case MotionMode::rotation_only: return "rotation";
    case MotionMode::translation_only: return "translation";
    case MotionMode::both: return "both";
  }
  return "?";
}

MotionMode motion_mode_from_name(const std::string& name) {
  if (name == "rotation" || name == "rotation_only") return MotionMode::rotation_only;
  if (name == "translation" || name == "translation_only") return MotionMode::translation_only;
  if (name == "both") return MotionMode::both;
  throw ConfigError("unknown motion mode '" + name + "'");
}

void MotionSpec::validate() const {
  if (!(rotation_range_deg >= 0.0) || !(translation_range_px >= 0.0))
    throw ConfigError("motion ranges must be >= 0");
  if (mode == MotionMode::both && (rotation_range_deg <= 0.0 || translation_range_px <= 0.0))
    throw ConfigError("motion mode 'both' needs non-empty rotation and translation ranges");
}

int MotionRecord::true_dimensionality() const {
  bool rot = false, shift = false;
  for (const auto& f : frames) {
    rot = rot || f.angle_deg != 0.0;
    shift = shift || f.shift_x != 0.0;
  }
  return static_cast<int>(rot) + static_cast<int>(shift);
}

ComplexImage rigid_transform(const ComplexImage& img, double angle_deg, double shift_x) {
  const int ny = img.ny(), nx = img.nx();
  const double cy = (ny - 1) / 2.0, cx = (nx - 1) / 2.0;
  const double t = angle_deg * std::numbers::pi / 180.0;
  const double ct = std::cos(t), st = std::sin(t);
  ComplexImage out(ny, nx);
  auto at = [&](int y, int x) -> std::complex<double> {
    if (y < 0 || y >= ny || x < 0 || x >= nx) return {};
    return std::complex<double>(img(y, x));
  };
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      // Inverse map in a y-up frame: undo the shift, then rotate by -angle.
      const double u = x - shift_x - cx;
      const double v = cy - y;
      const double su = ct * u + st * v;
      const double sv = -st * u + ct * v;
      const double xs = su + cx;
      const double ys = cy - sv;
      const int x0 = static_cast<int>(std::floor(xs));
      const int y0 = static_cast<int>(std::floor(ys));
      const double fx = xs - x0, fy = ys - y0;
      const auto val = (1 - fy) * ((1 - fx) * at(y0, x0) + fx * at(y0, x0 + 1)) +
                       fy * ((1 - fx) * at(y0 + 1, x0) + fx * at(y0 + 1, x0 + 1));
      out(y, x) = cfloat(val);
    }
  }
  return out;
}

std::pair<ImageSeries, MotionRecord> make_dynamic_series(const ComplexImage& base, int frames,
                                                         const MotionSpec& spec) {
  if (frames < 2) throw ConfigError("make_dynamic_series: need at least 2 frames");
  if (!all_finite(base.span())) throw NonFiniteError("make_dynamic_series: non-finite base image");
  spec.validate();
  const bool rotate = spec.mode != MotionMode::translation_only;
  const bool shift = spec.mode != MotionMode::rotation_only;

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> angle(-spec.rotation_range_deg, spec.rotation_range_deg);
  std::uniform_real_distribution<double> dx(-spec.translation_range_px, spec.translation_range_px);

  ImageSeries series;
  MotionRecord record;
  series.frames.push_back(base);
  record.frames.push_back({});
  for (int t = 1; t < frames; ++t) {
    MotionSample s;
    if (rotate && spec.rotation_range_deg > 0.0) s.angle_deg = angle(rng);
    if (shift && spec.translation_range_px > 0.0) s.shift_x = dx(rng);
    record.frames.push_back(s);
    series.frames.push_back(s.angle_deg == 0.0 && s.shift_x == 0.0 ? base
                                                                   : rigid_transform(base, s.angle_deg, s.shift_x));
  }
  return {std::move(series), std::move(record)};
}

}  // namespace discus
