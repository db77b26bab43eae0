#pragma once

#include <complex>
#include <span>

#include <Eigen/Dense>

namespace discus {

// v * max(1 - tau / |v|, 0); zero maps to zero.
template <class T>
std::complex<T> soft_threshold(std::complex<T> v, T tau) {
  const T mag = std::abs(v);
  if (mag <= tau || mag == T(0)) return {};
  return v * ((mag - tau) / mag);
}

double soft_threshold(double v, double tau);

void soft_threshold_inplace(std::span<std::complex<double>> v, double tau);

// Singular-value soft thresholding U * soft(S, tau) * V^H. Reports the
// largest input singular value through `sigma_max` when non-null.
Eigen::MatrixXcd svt(const Eigen::MatrixXcd& m, double tau, double* sigma_max = nullptr);

}  // namespace discus
