#include "fdh/dynamics.hpp"

#include "fdh/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fdh {

CoefficientSet CoefficientSet::constant(double r, double delta, double gamma, double sigma, double xi) {
  CoefficientSet c;
  c.r = r;
  c.delta = delta;
  c.eta = delta / (2.0 * r);
  c.gamma = gamma;
  c.sigma = sigma;
  c.xi = xi;
  return c;
}

namespace {

void require_positive(const Schedule& s, const char* name) {
  for (double v : s.values()) {
    if (!(v > 0.0)) {
      throw Error(Errc::InvalidCoefficients, std::string(name) + " must be positive");
    }
  }
}

}  // namespace

void CoefficientSet::validate() const {
  if (!(r > 0.0 && r < 1.0)) throw Error(Errc::InvalidCoefficients, "r must be in (0,1)");
  require_positive(delta, "delta");
  require_positive(eta, "eta");
  require_positive(xi, "xi");
  // A hair of slack so that sigma = 4/(1+r) typed as a decimal is accepted.
  if (!(sigma >= 4.0 / (1.0 + r) * (1.0 - 1e-12))) {
    std::ostringstream os;
    os.precision(17);
    os << "sigma must be >= 4/(1+r) = " << 4.0 / (1.0 + r);
    throw Error(Errc::InvalidCoefficients, os.str());
  }
}

bool CoefficientSet::time_homogeneous() const noexcept {
  return delta.is_constant() && eta.is_constant() && gamma.is_constant() && xi.is_constant();
}

std::string_view scheme_name(Scheme s) noexcept {
  return s == Scheme::TamedEuler ? "tamed_euler" : "explicit_euler";
}

std::optional<Scheme> parse_scheme(std::string_view name) noexcept {
  if (name == "tamed_euler") return Scheme::TamedEuler;
  if (name == "explicit_euler") return Scheme::ExplicitEuler;
  return std::nullopt;
}

double psi_eval(const CoefficientSet& coeffs, double t, double s) {
  if (coeffs.nonlinearity == Nonlinearity::Linear) return s;
  if (s == 0.0) return 0.0;
  const double scale = coeffs.delta.at(t) / (2.0 * coeffs.r);
  return scale * std::copysign(std::pow(std::abs(s), coeffs.r), s);
}

double dissipativity_gap(const CoefficientSet& coeffs, double t, double s1, double s2) {
  const double lhs = 2.0 * (psi_eval(coeffs, t, s1) - psi_eval(coeffs, t, s2)) * (s1 - s2);
  const double top = std::max(std::abs(s1), std::abs(s2));
  if (top == 0.0) return lhs;
  const double diff = s1 - s2;
  return lhs - coeffs.delta.at(t) * diff * diff * std::pow(top, coeffs.r - 1.0);
}

double growth_gap(const CoefficientSet& coeffs, double t, double s) {
  return coeffs.eta.at(t) * (1.0 + std::pow(std::abs(s), coeffs.r)) - std::abs(psi_eval(coeffs, t, s));
}

StateVector drift_eval(const SpectralModel& model, const CoefficientSet& coeffs, double t, const StateVector& x) {
  StateVector psi(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) psi[k] = psi_eval(coeffs, t, x[k]);
  StateVector b = model.op() * psi;
  const double g = coeffs.gamma.at(t);
  if (g != 0.0) b += g * x;
  return b;
}

StateVector drift_increment(const SpectralModel& model, const CoefficientSet& coeffs, Scheme scheme, double t,
                            double dt, const StateVector& x) {
  StateVector b = drift_eval(model, coeffs, t, x);
  if (scheme == Scheme::TamedEuler) {
    return (dt / (1.0 + dt * model.norm_l2m(b))) * b;
  }
  return dt * b;
}

StateVector apply_noise(const SpectralModel& model, const SpectralCoeffs& dw, double noise_scale) {
  return model.eigenvectors() * (noise_scale * model.q_diag().cwiseProduct(dw));
}

NoiseDraw noise_increment(const SpectralModel& model, double dt, const NormalSource& source, std::uint64_t step,
                          double noise_scale) {
  NoiseDraw draw;
  draw.dw.resize(static_cast<Eigen::Index>(model.size()));
  source.fill(step, draw.dw);
  draw.dw *= std::sqrt(dt);
  draw.increment = apply_noise(model, draw.dw, noise_scale);
  return draw;
}

bool all_finite(const StateVector& x) noexcept { return x.allFinite(); }

StateVector step(const SpectralModel& model, const CoefficientSet& coeffs, Scheme scheme, double t, double dt,
                 const StateVector& x, const StateVector& noise) {
  StateVector next = x + drift_increment(model, coeffs, scheme, t, dt, x) + noise;
  if (!next.allFinite()) {
    std::ostringstream os;
    os << "state became non-finite at t = " << t + dt;
    throw Error(Errc::NonFiniteState, os.str());
  }
  return next;
}

PathSimulator::PathSimulator(const SpectralModel& model, const CoefficientSet& coeffs, const StepConfig& cfg,
                             StateVector x0)
    : model_(&model),
      coeffs_(&coeffs),
      cfg_(cfg),
      source_(cfg.rng_seed, cfg.path_index, Stream::Dynamics),
      x_(std::move(x0)) {
  if (!(cfg_.dt > 0.0)) throw Error(Errc::InvalidArgument, "dt must be positive");
}

const SpectralCoeffs& PathSimulator::advance() {
  draw_ = noise_increment(*model_, cfg_.dt, source_, step_, cfg_.noise_scale);
  x_ = step(*model_, *coeffs_, cfg_.scheme, t_, cfg_.dt, x_, draw_.increment);
  ++step_;
  t_ = static_cast<double>(step_) * cfg_.dt;
  return draw_.dw;
}

std::uint64_t step_count(double horizon, double dt) {
  if (!(horizon > 0.0)) throw Error(Errc::ZeroHorizon, "time horizon must be positive");
  if (!(dt > 0.0)) throw Error(Errc::InvalidArgument, "dt must be positive");
  const double steps = std::round(horizon / dt);
  return steps < 1.0 ? 1 : static_cast<std::uint64_t>(steps);
}

}  // namespace fdh
