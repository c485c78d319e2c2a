#include "fdh/coupling.hpp"

#include "fdh/error.hpp"

#include <algorithm>
#include <cmath>

namespace fdh {

CouplingSchedule::CouplingSchedule(const CoefficientSet& coeffs, double initial_distance, double horizon,
                                   double couple_tol_rel)
    : delta_(coeffs.delta),
      xi_(coeffs.xi),
      gamma_(coeffs.gamma),
      sigma_(coeffs.sigma),
      epsilon_(coeffs.sigma / (coeffs.sigma + 2.0)),
      horizon_(horizon),
      initial_distance_(initial_distance),
      couple_tol_(couple_tol_rel * initial_distance),
      c_(0.0) {
  if (!(horizon > 0.0)) throw Error(Errc::ZeroHorizon, "coupling horizon must be positive");
  if (initial_distance > 0.0) {
    const auto nodes = merged_nodes({&delta_, &xi_, &gamma_}, horizon_);
    const double eps = epsilon_;
    const double sig = sigma_;
    const double denom = integrate_decaying(
        nodes, [&](double t) { return std::pow(eps * delta_.at(t) * xi_.at(t), 1.0 / sig); }, gamma_, 1.0);
    c_ = std::pow(initial_distance, eps) / (eps * denom);
  }
}

double CouplingSchedule::beta(double t) const {
  if (c_ == 0.0) return 0.0;
  return c_ * std::pow(epsilon_ * delta_.at(t) * xi_.at(t), 1.0 / sigma_) *
         std::exp(-(2.0 / (sigma_ + 2.0)) * gamma_.integral(0.0, t));
}

double CouplingSchedule::attraction_integral() const {
  if (c_ == 0.0) return 0.0;
  const auto nodes = merged_nodes({&delta_, &xi_, &gamma_}, horizon_);
  const double kappa = 2.0 / (sigma_ + 2.0) + epsilon_;
  return c_ * integrate_decaying(
                  nodes, [&](double t) { return std::pow(epsilon_ * delta_.at(t) * xi_.at(t), 1.0 / sigma_); },
                  gamma_, kappa);
}

double CouplingSchedule::beta_sq_integral() const {
  if (c_ == 0.0) return 0.0;
  const auto nodes = merged_nodes({&delta_, &xi_, &gamma_}, horizon_);
  const double kappa = 4.0 / (sigma_ + 2.0) + 2.0 * epsilon_;
  return c_ * c_ *
         integrate_decaying(
             nodes, [&](double t) { return std::pow(epsilon_ * delta_.at(t) * xi_.at(t), 2.0 / sigma_); }, gamma_,
             kappa);
}

CouplingSchedule CouplingSchedule::without_drift() const {
  CouplingSchedule copy = *this;
  copy.c_ = 0.0;
  return copy;
}

CouplingSchedule make_schedule(const SpectralModel& model, const CoefficientSet& coeffs, const StateVector& x,
                               const StateVector& y, double horizon, double couple_tol_rel) {
  return CouplingSchedule(coeffs, model.norm_h(x - y), horizon, couple_tol_rel);
}

CoupledPathState CoupledPathState::start(StateVector x0, StateVector y0) {
  CoupledPathState s;
  s.x = std::move(x0);
  s.y = std::move(y0);
  if (s.x == s.y) s.coupled = true;
  return s;
}

namespace {

/// Spectral zeta given precomputed spectral difference and its H-norm.
SpectralCoeffs zeta_from(const CouplingSchedule& schedule, const SpectralModel& model, double t,
                         const SpectralCoeffs& diff, double dist, bool active) {
  if (!active) return SpectralCoeffs::Zero(diff.size());
  const double scale = schedule.beta(t) / std::pow(dist, schedule.epsilon());
  return scale * diff.cwiseQuotient(model.q_diag());
}

bool drift_active(const CouplingSchedule& schedule, double dist, bool coupled) {
  return !coupled && schedule.drift_enabled() && dist > schedule.couple_tol() && dist > 0.0;
}

}  // namespace

StateVector coupling_drift(const CouplingSchedule& schedule, const SpectralModel& model, double t,
                           const StateVector& x, const StateVector& y, bool coupled) {
  const StateVector diff = x - y;
  const double dist = model.norm_h(diff);
  if (!drift_active(schedule, dist, coupled)) return StateVector::Zero(x.size());
  return (schedule.beta(t) / std::pow(dist, schedule.epsilon())) * diff;
}

SpectralCoeffs zeta(const CouplingSchedule& schedule, const SpectralModel& model, double t, const StateVector& x,
                    const StateVector& y, bool coupled) {
  const SpectralCoeffs diff = model.to_spectral(x - y);
  const double dist = model.norm_h_of_coeffs(diff);
  return zeta_from(schedule, model, t, diff, dist, drift_active(schedule, dist, coupled));
}

double f_diagnostic(const SpectralModel& model, const CoefficientSet& coeffs, const StateVector& x,
                    const StateVector& y) {
  const Vector& m = model.weights();
  const double r = coeffs.r;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    acc += m[k] * std::pow(std::max(std::abs(x[k]), std::abs(y[k])), r + 1.0);
  }
  if (acc == 0.0) return 0.0;
  const double f = std::pow(acc, (1.0 - r) / (1.0 + r));
  return std::pow(f, 2.0 / (coeffs.sigma - 2.0));
}

CoupledPathState step_pair_with(const SpectralModel& model, const CoefficientSet& coeffs,
                                const CouplingSchedule& schedule, const StepConfig& cfg,
                                const CoupledPathState& state, const SpectralCoeffs& dw, StepTrace* trace) {
  const double t = state.t;
  const double dt = cfg.dt;
  const StateVector noise = apply_noise(model, dw, cfg.noise_scale);

  CoupledPathState next = state;
  next.f_int += f_diagnostic(model, coeffs, state.x, state.y) * dt;

  if (state.coupled) {
    next.x = step(model, coeffs, cfg.scheme, t, dt, state.x, noise);
    next.y = next.x;
    if (trace) *trace = StepTrace{t, 0.0, schedule.beta(t), 0.0};
  } else {
    const SpectralCoeffs diff = model.to_spectral(state.x - state.y);
    const double dist = model.norm_h_of_coeffs(diff);
    const bool active = drift_active(schedule, dist, false);
    const SpectralCoeffs z = zeta_from(schedule, model, t, diff, dist, active);
    const double z_sq = z.squaredNorm();

    next.x = step(model, coeffs, cfg.scheme, t, dt, state.x, noise);
    StateVector y_noise = noise;
    // Q zeta dt is the attraction drift beta (x - y)/|x - y|_H^eps.
    if (active) y_noise += model.eigenvectors() * (dt * model.q_diag().cwiseProduct(z));
    next.y = step(model, coeffs, cfg.scheme, t, dt, state.y, y_noise);

    next.log_stoch_int += z.dot(dw);
    next.zeta_sq_int += z_sq * dt;
    if (trace) *trace = StepTrace{t, dist, schedule.beta(t), z_sq};
  }

  next.step = state.step + 1;
  next.t = static_cast<double>(next.step) * dt;
  if (!next.coupled && model.norm_h(next.x - next.y) < schedule.couple_tol()) {
    next.coupled = true;
    next.tau = next.t;
    next.y = next.x;
  }
  return next;
}

CoupledPathState step_pair(const SpectralModel& model, const CoefficientSet& coeffs,
                           const CouplingSchedule& schedule, const StepConfig& cfg, const CoupledPathState& state,
                           StepTrace* trace) {
  const NormalSource source(cfg.rng_seed, cfg.path_index, Stream::Dynamics);
  SpectralCoeffs dw(static_cast<Eigen::Index>(model.size()));
  source.fill(state.step, dw);
  dw *= std::sqrt(cfg.dt);
  return step_pair_with(model, coeffs, schedule, cfg, state, dw, trace);
}

double log_girsanov_weight(const CoupledPathState& state) noexcept {
  return -state.log_stoch_int - 0.5 * state.zeta_sq_int;
}

double girsanov_weight(const CoupledPathState& state) noexcept { return std::exp(log_girsanov_weight(state)); }

double holder_chain_bound(const CouplingSchedule& schedule, double f_int) {
  const double sig = schedule.sigma();
  const double eps = schedule.epsilon();
  const double inner = std::pow(schedule.c(), sig) * std::pow(schedule.initial_distance(), 2.0 * eps);
  return std::pow(f_int, (sig - 2.0) / sig) * std::pow(inner, 2.0 / sig);
}

}  // namespace fdh
