#include "fdh/spectral_model.hpp"

#include "fdh/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace fdh {

MeasureSpace::MeasureSpace(Vector weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) {
    throw Error(Errc::InvalidMeasure, "measure needs at least one point");
  }
  for (Eigen::Index k = 0; k < weights_.size(); ++k) {
    if (!(weights_[k] > 0.0) || !std::isfinite(weights_[k])) {
      std::ostringstream os;
      os << "weight " << k << " is not strictly positive (" << weights_[k] << ")";
      throw Error(Errc::InvalidMeasure, os.str());
    }
  }
  const double total = weights_.sum();
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "weights sum to " << total << ", expected 1";
    throw Error(Errc::InvalidMeasure, os.str());
  }
}

MeasureSpace MeasureSpace::uniform(std::size_t n) {
  if (n == 0) throw Error(Errc::InvalidMeasure, "measure needs at least one point");
  return MeasureSpace(Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)));
}

SpectralModel::SpectralModel(MeasureSpace space, Matrix op, Vector lambda, Matrix basis, Vector q)
    : space_(std::move(space)),
      op_(std::move(op)),
      lambda_(std::move(lambda)),
      basis_(std::move(basis)),
      q_(std::move(q)) {
  analysis_ = basis_.transpose() * space_.weights().asDiagonal();
  inv_lambda_ = lambda_.cwiseInverse();
  inv_q_sq_ = q_.cwiseAbs2().cwiseInverse();
  hs_norm_sq_ = q_.cwiseAbs2().cwiseProduct(inv_lambda_).sum();
}

SpectralModel SpectralModel::build(MeasureSpace space, const Matrix& op, const Vector& q_diag) {
  const auto n = static_cast<Eigen::Index>(space.size());
  if (op.rows() != n || op.cols() != n) {
    throw Error(Errc::InvalidArgument, "operator must be n x n for a measure on n points");
  }
  if (q_diag.size() != n) {
    throw Error(Errc::InvalidArgument, "q_diag must have n entries");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (q_diag[i] == 0.0 || !std::isfinite(q_diag[i])) {
      throw Error(Errc::ZeroNoiseMode, "q_" + std::to_string(i + 1) + " must be a nonzero finite value");
    }
  }

  const Vector& m = space.weights();
  // Self-adjoint in L^2(m)  <=>  diag(m) L is symmetric.
  const Matrix weighted = m.asDiagonal() * op;
  const double scale = std::max(1.0, weighted.cwiseAbs().maxCoeff());
  const double asym = (weighted - weighted.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSelfAdjointTol * scale) {
    std::ostringstream os;
    os << "diag(m) L deviates from symmetry by " << asym;
    throw Error(Errc::NotSelfAdjoint, os.str());
  }

  const Vector sqrt_m = m.cwiseSqrt();
  const Vector inv_sqrt_m = sqrt_m.cwiseInverse();
  Matrix sym = sqrt_m.asDiagonal() * op * inv_sqrt_m.asDiagonal();
  sym = 0.5 * (sym + sym.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> solver(-sym);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::InvalidArgument, "symmetric eigensolver did not converge");
  }
  // Ascending eigenvalues of -L.
  Vector lambda = solver.eigenvalues();
  const double spread = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  if (lambda[0] <= 1e-12 * spread) {
    std::ostringstream os;
    os << "smallest eigenvalue of -L is " << lambda[0];
    throw Error(Errc::NotNegativeDefinite, os.str());
  }

  Matrix basis = inv_sqrt_m.asDiagonal() * solver.eigenvectors();
  // Fix the sign: first non-negligible entry of each eigenfunction positive.
  for (Eigen::Index i = 0; i < n; ++i) {
    auto col = basis.col(i);
    const double cutoff = 1e-8 * col.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < n; ++k) {
      if (std::abs(col[k]) > cutoff) {
        if (col[k] < 0.0) col = -col;
        break;
      }
    }
  }

  return SpectralModel(std::move(space), op, std::move(lambda), std::move(basis), q_diag);
}

Matrix SpectralModel::dirichlet_laplacian_1d(std::size_t n) {
  const auto size = static_cast<Eigen::Index>(n);
  const double h_inv_sq = static_cast<double>((n + 1) * (n + 1));
  Matrix op = Matrix::Zero(size, size);
  for (Eigen::Index k = 0; k < size; ++k) {
    op(k, k) = -2.0 * h_inv_sq;
    if (k > 0) op(k, k - 1) = h_inv_sq;
    if (k + 1 < size) op(k, k + 1) = h_inv_sq;
  }
  return op;
}

Vector SpectralModel::power_noise(std::size_t n, double theta) {
  Vector q(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) q[static_cast<Eigen::Index>(i)] = std::pow(static_cast<double>(i + 1), theta);
  return q;
}

SpectralModel SpectralModel::with_fractional_power(double alpha) const {
  if (!(alpha > 0.0)) throw Error(Errc::InvalidArgument, "fractional power must be positive");
  Vector lambda = lambda_.array().pow(alpha).matrix();
  Matrix op = -(basis_ * lambda.asDiagonal() * analysis_);
  // Symmetrize diag(m) L against rounding.
  const Vector& m = weights();
  Matrix weighted = m.asDiagonal() * op;
  weighted = 0.5 * (weighted + weighted.transpose());
  op = m.cwiseInverse().asDiagonal() * weighted;
  return SpectralModel(space_, std::move(op), std::move(lambda), basis_, q_);
}

SpectralModel SpectralModel::with_noise(const Vector& q_diag) const {
  if (q_diag.size() != q_.size()) throw Error(Errc::InvalidArgument, "q_diag must have n entries");
  for (Eigen::Index i = 0; i < q_diag.size(); ++i) {
    if (q_diag[i] == 0.0 || !std::isfinite(q_diag[i])) {
      throw Error(Errc::ZeroNoiseMode, "q_" + std::to_string(i + 1) + " must be a nonzero finite value");
    }
  }
  return SpectralModel(space_, op_, lambda_, basis_, q_diag);
}

SpectralCoeffs SpectralModel::to_spectral(const StateVector& x) const { return analysis_ * x; }

StateVector SpectralModel::from_spectral(const SpectralCoeffs& c) const { return basis_ * c; }

double SpectralModel::norm_l2m(const StateVector& x) const {
  return std::sqrt(weights().dot(x.cwiseAbs2()));
}

double SpectralModel::moment_lp(const StateVector& x, double p) const {
  if (!(p >= 1.0)) throw Error(Errc::InvalidExponent, "L^p exponent must be >= 1");
  const Vector& m = weights();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) acc += m[k] * std::pow(std::abs(x[k]), p);
  return acc;
}

double SpectralModel::norm_lp(const StateVector& x, double p) const {
  return std::pow(moment_lp(x, p), 1.0 / p);
}

double SpectralModel::norm_h_of_coeffs(const SpectralCoeffs& c) const {
  return std::sqrt(c.cwiseAbs2().dot(inv_lambda_));
}

double SpectralModel::norm_q_of_coeffs(const SpectralCoeffs& c) const {
  return std::sqrt(c.cwiseAbs2().dot(inv_q_sq_));
}

double SpectralModel::norm_h(const StateVector& x) const { return norm_h_of_coeffs(to_spectral(x)); }

double SpectralModel::norm_q(const StateVector& x) const { return norm_q_of_coeffs(to_spectral(x)); }

}  // namespace fdh
