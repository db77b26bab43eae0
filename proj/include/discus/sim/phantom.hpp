#pragma once

#include "discus/core/types.hpp"

namespace discus {

/// Modified (Toft) 10-ellipse Shepp-Logan magnitude, clipped at 0 and scaled
/// to a maximum of 1, times exp(i * phase_amplitude * (u^2 + v^2)) where
/// (u, v) are grid coordinates normalized to [-1, 1]. Requires size >= 32.
ComplexImage shepp_logan(int size, double phase_amplitude = 0.5);

/// Smooth quadratic phase map used by the phantoms, in radians.
double quadratic_phase(int y, int x, int ny, int nx, double amplitude) noexcept;

}  // namespace discus
