#include "discus/sim/phantom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace discus {
namespace {

struct Ellipse {
  double intensity, a, b, x0, y0, phi_deg;
};

// Toft's modified Shepp-Logan parameters.
constexpr std::array<Ellipse, 10> kSheppLogan{{
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
    {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},
    {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
    {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},
    {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
    {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},
    {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
    {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},
    {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
}};

}  // namespace

double quadratic_phase(int y, int x, int ny, int nx, double amplitude) noexcept {
  const double u = (x - (nx - 1) / 2.0) / (nx / 2.0);
  const double v = (y - (ny - 1) / 2.0) / (ny / 2.0);
  return amplitude * (u * u + v * v);
}

ComplexImage shepp_logan(int size, double phase_amplitude) {
  if (size < 32) throw ConfigError("shepp_logan: size must be >= 32");
  std::vector<double> mag(static_cast<std::size_t>(size) * size, 0.0);
  for (int y = 0; y < size; ++y) {
    const double py = ((size - 1) / 2.0 - y) / (size / 2.0);  // up is +y
    for (int x = 0; x < size; ++x) {
      const double px = (x - (size - 1) / 2.0) / (size / 2.0);
      double v = 0.0;
      for (const auto& e : kSheppLogan) {
        const double t = e.phi_deg * std::numbers::pi / 180.0;
        const double dx = px - e.x0, dy = py - e.y0;
        const double xr = dx * std::cos(t) + dy * std::sin(t);
        const double yr = -dx * std::sin(t) + dy * std::cos(t);
        if ((xr * xr) / (e.a * e.a) + (yr * yr) / (e.b * e.b) <= 1.0) v += e.intensity;
      }
      mag[static_cast<std::size_t>(y) * size + x] = std::max(v, 0.0);
    }
  }
  const double peak = *std::max_element(mag.begin(), mag.end());
  ComplexImage img(size, size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double m = mag[static_cast<std::size_t>(y) * size + x] / peak;
      const double ph = quadratic_phase(y, x, size, size, phase_amplitude);
      img(y, x) = phase_amplitude == 0.0 ? cfloat(static_cast<float>(m), 0.0f) : cfloat(std::polar(m, ph));
    }
  return img;
}

}  // namespace discus
