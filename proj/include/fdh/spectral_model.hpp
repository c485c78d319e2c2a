#pragma once

// Finite-dimensional spectral model: a probability measure on n points,
// a negative definite operator L self-adjoint in L^2(m), its eigenbasis,
// and a noise operator Q that is diagonal in that basis.

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace fdh {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Point-space representation of an element of L^2(m).
using StateVector = Eigen::VectorXd;
/// Coordinates <x, e_i> in the m-orthonormal eigenbasis.
using SpectralCoeffs = Eigen::VectorXd;

class MeasureSpace {
 public:
  /// Throws InvalidMeasure unless all weights are positive and sum to 1.
  explicit MeasureSpace(Vector weights);

  static MeasureSpace uniform(std::size_t n);

  std::size_t size() const noexcept { return static_cast<std::size_t>(weights_.size()); }
  const Vector& weights() const noexcept { return weights_; }
  double min_weight() const noexcept { return weights_.minCoeff(); }

 private:
  Vector weights_;
};

/// Immutable after construction; every query is const and thread-safe.
class SpectralModel {
 public:
  static constexpr double kSelfAdjointTol = 1e-10;
  static constexpr double kEigenTol = 1e-10;

  /// Eigendecomposes L through the D^{1/2} L D^{-1/2} symmetrization.
  /// Errors: NotSelfAdjoint, NotNegativeDefinite, ZeroNoiseMode.
  static SpectralModel build(MeasureSpace space, const Matrix& op, const Vector& q_diag);

  /// (n+1)^2 tridiag(1,-2,1): the Dirichlet Laplacian on n interior points
  /// of (0,1), with the uniform measure.
  static Matrix dirichlet_laplacian_1d(std::size_t n);

  /// q_i = i^theta, i = 1..n.
  static Vector power_noise(std::size_t n, double theta);

  /// The model with L replaced by -(-L)^alpha (lambda_i -> lambda_i^alpha).
  SpectralModel with_fractional_power(double alpha) const;
  /// Same operator, new noise diagonal.
  SpectralModel with_noise(const Vector& q_diag) const;

  std::size_t size() const noexcept { return space_.size(); }
  const MeasureSpace& space() const noexcept { return space_; }
  const Vector& weights() const noexcept { return space_.weights(); }
  const Matrix& op() const noexcept { return op_; }
  /// Eigenvalues of -L, nondecreasing.
  const Vector& eigenvalues() const noexcept { return lambda_; }
  /// Column i holds e_{i+1} in point space.
  const Matrix& eigenvectors() const noexcept { return basis_; }
  StateVector eigenfunction(std::size_t i) const { return basis_.col(static_cast<Eigen::Index>(i)); }
  const Vector& q_diag() const noexcept { return q_; }
  /// sum_i q_i^2 / lambda_i, the Hilbert-Schmidt bound of Q into H.
  double hs_norm_sq() const noexcept { return hs_norm_sq_; }

  SpectralCoeffs to_spectral(const StateVector& x) const;
  StateVector from_spectral(const SpectralCoeffs& c) const;

  double norm_l2m(const StateVector& x) const;
  double norm_lp(const StateVector& x, double p) const;
  double norm_h(const StateVector& x) const;
  double norm_q(const StateVector& x) const;
  /// sum_k m_k |x_k|^p, the un-rooted L^p(m) moment.
  double moment_lp(const StateVector& x, double p) const;

  double norm_h_of_coeffs(const SpectralCoeffs& c) const;
  double norm_q_of_coeffs(const SpectralCoeffs& c) const;

 private:
  SpectralModel(MeasureSpace space, Matrix op, Vector lambda, Matrix basis, Vector q);

  MeasureSpace space_;
  Matrix op_;
  Vector lambda_;
  Matrix basis_;
  // basis_^T diag(m), so that to_spectral is a single matvec.
  Matrix analysis_;
  Vector q_;
  Vector inv_lambda_;
  Vector inv_q_sq_;
  double hs_norm_sq_ = 0.0;
};

}  // namespace fdh
