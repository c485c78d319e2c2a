#pragma once

#include "fdh/spectral_model.hpp"

#include <random>

namespace fdh::testing {

/// m = (1/2, 1/2), L = [[-2, 1], [1, -2]], q = (1, 2): lambda = (1, 3).
inline SpectralModel two_point_model() {
  Matrix op(2, 2);
  op << -2.0, 1.0, 1.0, -2.0;
  Vector q(2);
  q << 1.0, 2.0;
  return SpectralModel::build(MeasureSpace::uniform(2), op, q);
}

inline SpectralModel dirichlet_model(std::size_t n, double theta = 0.0) {
  return SpectralModel::build(MeasureSpace::uniform(n), SpectralModel::dirichlet_laplacian_1d(n),
                              SpectralModel::power_noise(n, theta));
}

inline StateVector random_state(std::mt19937_64& gen, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> z(0.0, scale);
  StateVector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = z(gen);
  return x;
}

}  // namespace fdh::testing
