#pragma once

// Coupling by change of measure. Y is driven by the same noise as X plus the
// attraction drift beta_t (X - Y) / |X - Y|_H^eps; the Girsanov density R
// compensates that drift so that E[R F(Y_T)] is P_T F(y).

#include "fdh/dynamics.hpp"

#include <cstdint>

namespace fdh {

class CouplingSchedule {
 public:
  /// eps = sigma/(sigma+2); c normalizes int_0^T beta_t e^{-eps Gamma_t} dt = |x-y|_H^eps / eps.
  CouplingSchedule(const CoefficientSet& coeffs, double initial_distance, double horizon,
                   double couple_tol_rel = 1e-6);

  double epsilon() const noexcept { return epsilon_; }
  double c() const noexcept { return c_; }
  double horizon() const noexcept { return horizon_; }
  double sigma() const noexcept { return sigma_; }
  /// |x - y|_H at time 0.
  double initial_distance() const noexcept { return initial_distance_; }
  /// Coupling is declared once |X - Y|_H drops below this.
  double couple_tol() const noexcept { return couple_tol_; }
  bool drift_enabled() const noexcept { return c_ > 0.0; }

  double beta(double t) const;

  /// Exact int_0^T beta_t e^{-eps int_0^t gamma} dt.
  double attraction_integral() const;
  /// Exact int_0^T beta_t^2 e^{-2 eps int_0^t gamma} dt.
  double beta_sq_integral() const;

  /// Same schedule with beta == 0 (coupling detection stays active).
  CouplingSchedule without_drift() const;

 private:
  Schedule delta_;
  Schedule xi_;
  Schedule gamma_;
  double sigma_;
  double epsilon_;
  double horizon_;
  double initial_distance_;
  double couple_tol_;
  double c_;
};

CouplingSchedule make_schedule(const SpectralModel& model, const CoefficientSet& coeffs, const StateVector& x,
                               const StateVector& y, double horizon, double couple_tol_rel = 1e-6);

struct CoupledPathState {
  StateVector x;
  StateVector y;
  double t = 0.0;
  std::uint64_t step = 0;
  bool coupled = false;
  /// Numerical coupling time; meaningful only when coupled.
  double tau = 0.0;
  /// int <zeta_t, dW_t> (left-point Ito sum).
  double log_stoch_int = 0.0;
  /// int |zeta_t|_2^2 dt.
  double zeta_sq_int = 0.0;
  /// int f_t^{2/(sigma-2)} dt.
  double f_int = 0.0;

  static CoupledPathState start(StateVector x0, StateVector y0);
};

/// Values at the left end of a step, for plot tables.
struct StepTrace {
  double t = 0.0;
  double dist_h = 0.0;
  double beta = 0.0;
  double zeta_sq = 0.0;
};

/// beta_t (x - y) / |x - y|_H^eps, or zero when coupled or under the threshold.
StateVector coupling_drift(const CouplingSchedule& schedule, const SpectralModel& model, double t,
                           const StateVector& x, const StateVector& y, bool coupled = false);

/// Spectral coefficients of zeta_t = beta_t Q^{-1}(x - y) / |x - y|_H^eps.
SpectralCoeffs zeta(const CouplingSchedule& schedule, const SpectralModel& model, double t, const StateVector& x,
                    const StateVector& y, bool coupled = false);

/// f_t^{2/(sigma-2)} with f_t = (m[(|x| v |y|)^{r+1}])^{(1-r)/(1+r)}.
double f_diagnostic(const SpectralModel& model, const CoefficientSet& coeffs, const StateVector& x,
                    const StateVector& y);

/// Advances X and Y by one step sharing the same Brownian increment.
CoupledPathState step_pair(const SpectralModel& model, const CoefficientSet& coeffs,
                           const CouplingSchedule& schedule, const StepConfig& cfg, const CoupledPathState& state,
                           StepTrace* trace = nullptr);

/// Same, with Brownian increments supplied by the caller (spectral, pre-Q).
CoupledPathState step_pair_with(const SpectralModel& model, const CoefficientSet& coeffs,
                                const CouplingSchedule& schedule, const StepConfig& cfg,
                                const CoupledPathState& state, const SpectralCoeffs& dw,
                                StepTrace* trace = nullptr);

double log_girsanov_weight(const CoupledPathState& state) noexcept;
/// R = exp(-int <zeta, dW> - 1/2 int |zeta|^2 dt).
double girsanov_weight(const CoupledPathState& state) noexcept;

/// (int f^{2/(sigma-2)})^{(sigma-2)/sigma} (c^sigma |x-y|_H^{2 eps})^{2/sigma}: the pathwise
/// bound on int |zeta|^2 dt.
double holder_chain_bound(const CouplingSchedule& schedule, double f_int);

}  // namespace fdh
