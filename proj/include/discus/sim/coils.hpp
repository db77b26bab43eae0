#pragma once

#include <cstdint>

#include "discus/core/types.hpp"

namespace discus {

/// Smooth synthetic receive coils: virtual coil centres on a ring just
/// outside the field of view (seeded angular jitter), Gaussian-decay
/// magnitude and a seeded linear phase ramp per coil.
CoilSensitivities simulate_coil_maps(int ny, int nx, int coils, std::uint64_t seed);

/// Rescales maps so the root-sum-of-squares over coils is 1 at every pixel.
/// Throws UndefinedError where RSS is zero.
CoilSensitivities normalize_coil_maps(const CoilSensitivities& maps);

/// Root-sum-of-squares magnitude image.
RealImage coil_rss(const CoilSensitivities& maps);

/// Mean gradient magnitude of coil `c` (finite differences, per pixel).
double coil_mean_gradient(const CoilSensitivities& maps, int c);

}  // namespace discus
