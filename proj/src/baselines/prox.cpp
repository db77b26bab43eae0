#include "discus/baselines/prox.hpp"

#include <cmath>

#include "discus/core/error.hpp"

namespace discus {

double soft_threshold(double v, double tau) {
  if (tau < 0.0) throw ConfigError("threshold must be non-negative");
  const double mag = std::abs(v);
  return mag <= tau ? 0.0 : std::copysign(mag - tau, v);
}

void soft_threshold_inplace(std::span<std::complex<double>> v, double tau) {
  if (tau < 0.0) throw ConfigError("threshold must be non-negative");
  for (auto& x : v) x = soft_threshold(x, tau);
}

Eigen::MatrixXcd svt(const Eigen::MatrixXcd& m, double tau, double* sigma_max) {
  if (tau < 0.0) throw ConfigError("threshold must be non-negative");
  if (m.size() == 0) {
    if (sigma_max != nullptr) *sigma_max = 0.0;
    return m;
  }
  if (!m.allFinite()) throw NumericalError("svt input contains non-finite values");
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("singular value decomposition failed");
  Eigen::VectorXd s = svd.singularValues();
  if (sigma_max != nullptr) *sigma_max = s.size() ? s(0) : 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = std::max(s(i) - tau, 0.0);
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().adjoint();
}

}  // namespace discus
