#pragma once

// Drift L Psi(X) + gamma X, diagonal additive noise Q dW, and the explicit
// (optionally tamed) Euler-Maruyama step for a single path.

#include "fdh/rng.hpp"
#include "fdh/schedule.hpp"
#include "fdh/spectral_model.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace fdh {

enum class Nonlinearity {
  /// Psi(t, s) = delta_t / (2r) * |s|^{r-1} s.
  FastDiffusion,
  /// Psi(t, s) = s; turns the equation into an Ornstein-Uhlenbeck process.
  Linear,
};

struct CoefficientSet {
  double r = 0.5;
  Schedule delta = 1.0;
  /// Growth constant of Psi; defaults to delta/(2r) for the fast-diffusion Psi.
  Schedule eta = 1.0;
  Schedule gamma = 0.0;
  double sigma = 8.0 / 3.0;
  Schedule xi = 1.0;
  Nonlinearity nonlinearity = Nonlinearity::FastDiffusion;

  /// Constant coefficients with eta = delta/(2r).
  static CoefficientSet constant(double r, double delta, double gamma, double sigma, double xi);

  /// Throws InvalidCoefficients: r in (0,1), delta, eta, xi > 0, sigma >= 4/(1+r).
  void validate() const;
  bool time_homogeneous() const noexcept;
};

enum class Scheme { TamedEuler, ExplicitEuler };

std::string_view scheme_name(Scheme s) noexcept;
std::optional<Scheme> parse_scheme(std::string_view name) noexcept;

struct StepConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::TamedEuler;
  std::uint64_t rng_seed = 0;
  std::uint64_t path_index = 0;
  /// Multiplies every q_i in the noise; 0 switches the noise off.
  double noise_scale = 1.0;
};

/// Psi(t, s) for the coefficient set's nonlinearity; odd, Psi(0) = 0.
double psi_eval(const CoefficientSet& coeffs, double t, double s);

/// 2(Psi(s1) - Psi(s2))(s1 - s2) - delta |s1 - s2|^2 (|s1| v |s2|)^{r-1}; the right-hand
/// term is 0 when s1 = s2 = 0. Nonnegative for the fast-diffusion Psi.
double dissipativity_gap(const CoefficientSet& coeffs, double t, double s1, double s2);

/// eta (1 + |s|^r) - |Psi(s)|.
double growth_gap(const CoefficientSet& coeffs, double t, double s);

/// L Psi(t, x) + gamma_t x.
StateVector drift_eval(const SpectralModel& model, const CoefficientSet& coeffs, double t, const StateVector& x);

/// dt-scaled drift increment: dt b / (1 + dt |b|_{L^2(m)}) under taming, dt b otherwise.
StateVector drift_increment(const SpectralModel& model, const CoefficientSet& coeffs, Scheme scheme, double t,
                            double dt, const StateVector& x);

/// Brownian increment in spectral coordinates (pre-Q) and its image Q dW in point space.
struct NoiseDraw {
  SpectralCoeffs dw;
  StateVector increment;
};

/// sum_i q_i sqrt(dt) z_i e_i with z drawn from (seed, path, step).
NoiseDraw noise_increment(const SpectralModel& model, double dt, const NormalSource& source, std::uint64_t step,
                          double noise_scale = 1.0);

/// Q applied to spectral Brownian increments: sum_i scale q_i dw_i e_i.
StateVector apply_noise(const SpectralModel& model, const SpectralCoeffs& dw, double noise_scale = 1.0);

/// x + drift_increment + noise. Throws NonFiniteState on NaN/Inf.
StateVector step(const SpectralModel& model, const CoefficientSet& coeffs, Scheme scheme, double t, double dt,
                 const StateVector& x, const StateVector& noise);

bool all_finite(const StateVector& x) noexcept;

/// One path of the equation, advanced step by step with the counter-based noise.
class PathSimulator {
 public:
  PathSimulator(const SpectralModel& model, const CoefficientSet& coeffs, const StepConfig& cfg, StateVector x0);

  /// Advances one step of size cfg.dt; returns the spectral Brownian increment used.
  const SpectralCoeffs& advance();

  const StateVector& state() const noexcept { return x_; }
  double time() const noexcept { return t_; }
  std::uint64_t steps_taken() const noexcept { return step_; }

 private:
  const SpectralModel* model_;
  const CoefficientSet* coeffs_;
  StepConfig cfg_;
  NormalSource source_;
  StateVector x_;
  NoiseDraw draw_;
  double t_ = 0.0;
  std::uint64_t step_ = 0;
};

/// Number of steps of size dt needed to reach T (rounded to nearest).
std::uint64_t step_count(double horizon, double dt);

}  // namespace fdh
