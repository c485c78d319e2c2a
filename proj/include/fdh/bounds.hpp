#pragma once

// Closed-form constants of the Harnack inequality and of the L^p bound on
// the transition density with respect to the invariant measure.

#include "fdh/dynamics.hpp"
#include "fdh/spectral_model.hpp"

#include <span>

namespace fdh {

/// 1/2 exp(-int_0^T (2 gamma + 2 q + 1)) inf_[0,T] delta, with q = hs_norm_sq.
double lambda_T(const CoefficientSet& coeffs, const SpectralModel& model, double horizon);

/// q + 2^{(r+2)/r} eta^{(r+1)/r} delta^{-1/r} for raw scalars; eta = 0 allowed.
double theta_value(double q, double r, double eta, double delta);
/// theta at time t.
double theta_t(const CoefficientSet& coeffs, const SpectralModel& model, double t);
double theta_integral(const CoefficientSet& coeffs, const SpectralModel& model, double horizon);

/// (delta_t xi_t)^{1/sigma} exp(-int_0^t gamma).
double g_t(const CoefficientSet& coeffs, double t);
/// int_0^T g_t dt.
double g_integral(const CoefficientSet& coeffs, double horizon);
/// int_0^T [(sigma+2) g_t]^2 dt.
double g_sq_integral(const CoefficientSet& coeffs, double horizon);

struct BoundReport {
  double horizon = 0.0;
  double p = 0.0;
  double norm_x_h = 0.0;
  double norm_y_h = 0.0;
  double dist_h = 0.0;
  double lambda_T = 0.0;
  double theta_int = 0.0;
  double g_int = 0.0;
  double g_sq_int = 0.0;
  /// The three summands of the exponent.
  double term_norms = 0.0;
  double term_quadratic = 0.0;
  double term_sigma = 0.0;
  double log_harnack_rhs = 0.0;
  /// exp(log_harnack_rhs); may overflow to +inf.
  double harnack_rhs = 0.0;
};

/// Exponent and value of the Harnack right-hand side for (P_T F)^p(y) / P_T F^p(x).
/// Errors: InvalidP (p <= 1), ZeroHorizon.
BoundReport harnack_rhs(const CoefficientSet& coeffs, const SpectralModel& model, double horizon, double p,
                        const StateVector& x, const StateVector& y);

/// Same exponent from H-norms alone.
BoundReport harnack_rhs_from_norms(const CoefficientSet& coeffs, const SpectralModel& model, double horizon,
                                   double p, double norm_x_h, double norm_y_h, double dist_h);

/// Time-homogeneous constants in closed form, computed without the schedule
/// machinery. Errors: NotTimeHomogeneous.
struct HomogeneousConstants {
  double lambda_T = 0.0;
  double theta = 0.0;
  double g_int = 0.0;
  double g_sq_int = 0.0;
};
HomogeneousConstants homogeneous_constants(const CoefficientSet& coeffs, const SpectralModel& model,
                                           double horizon);

struct DensityBound {
  double log_integral = 0.0;  ///< log of the empirical mean of the integrand
  double log_bound = 0.0;
  double bound = 0.0;
  std::size_t samples = 0;
};

/// Log of the integrand exp[-...] at one pair (x, y), given H-norms.
double density_log_integrand(const HomogeneousConstants& k, double sigma, double horizon, double p, double norm_x_h,
                             double norm_y_h, double dist_h);

/// {mean_j exp[-...](x, y_j)}^{-(p-1)/p} over samples y_j of the invariant measure.
/// Errors: EmptySample, InvalidP, NotTimeHomogeneous.
DensityBound density_lp_bound(const CoefficientSet& coeffs, const SpectralModel& model, double horizon, double p,
                              const StateVector& x, std::span<const StateVector> mu_samples);

}  // namespace fdh
