#include "fdh/bounds.hpp"

#include "fdh/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fdh {

namespace {

void require_horizon(double horizon) {
  if (!(horizon > 0.0)) throw Error(Errc::ZeroHorizon, "time horizon must be positive");
}

void require_p(double p) {
  if (!(p > 1.0)) throw Error(Errc::InvalidP, "p must exceed 1");
}

}  // namespace

double lambda_T(const CoefficientSet& coeffs, const SpectralModel& model, double horizon) {
  require_horizon(horizon);
  const double q = model.hs_norm_sq();
  const double exponent = 2.0 * coeffs.gamma.integral(0.0, horizon) + (2.0 * q + 1.0) * horizon;
  return 0.5 * std::exp(-exponent) * coeffs.delta.inf_on(0.0, horizon);
}

double theta_value(double q, double r, double eta, double delta) {
  if (eta == 0.0) return q;
  return q + std::pow(2.0, (r + 2.0) / r) * std::pow(eta, (r + 1.0) / r) * std::pow(delta, -1.0 / r);
}

double theta_t(const CoefficientSet& coeffs, const SpectralModel& model, double t) {
  return theta_value(model.hs_norm_sq(), coeffs.r, coeffs.eta.at(t), coeffs.delta.at(t));
}

double theta_integral(const CoefficientSet& coeffs, const SpectralModel& model, double horizon) {
  require_horizon(horizon);
  const auto nodes = merged_nodes({&coeffs.eta, &coeffs.delta}, horizon);
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    acc += theta_t(coeffs, model, nodes[k]) * (nodes[k + 1] - nodes[k]);
  }
  return acc;
}

double g_t(const CoefficientSet& coeffs, double t) {
  return std::pow(coeffs.delta.at(t) * coeffs.xi.at(t), 1.0 / coeffs.sigma) *
         std::exp(-coeffs.gamma.integral(0.0, t));
}

double g_integral(const CoefficientSet& coeffs, double horizon) {
  require_horizon(horizon);
  const auto nodes = merged_nodes({&coeffs.delta, &coeffs.xi, &coeffs.gamma}, horizon);
  return integrate_decaying(
      nodes, [&](double t) { return std::pow(coeffs.delta.at(t) * coeffs.xi.at(t), 1.0 / coeffs.sigma); },
      coeffs.gamma, 1.0);
}

double g_sq_integral(const CoefficientSet& coeffs, double horizon) {
  require_horizon(horizon);
  const auto nodes = merged_nodes({&coeffs.delta, &coeffs.xi, &coeffs.gamma}, horizon);
  const double s2 = (coeffs.sigma + 2.0) * (coeffs.sigma + 2.0);
  return s2 * integrate_decaying(
                  nodes, [&](double t) { return std::pow(coeffs.delta.at(t) * coeffs.xi.at(t), 2.0 / coeffs.sigma); },
                  coeffs.gamma, 2.0);
}

BoundReport harnack_rhs_from_norms(const CoefficientSet& coeffs, const SpectralModel& model, double horizon,
                                   double p, double norm_x_h, double norm_y_h, double dist_h) {
  require_p(p);
  require_horizon(horizon);
  BoundReport rep;
  rep.horizon = horizon;
  rep.p = p;
  rep.norm_x_h = norm_x_h;
  rep.norm_y_h = norm_y_h;
  rep.dist_h = dist_h;
  rep.lambda_T = lambda_T(coeffs, model, horizon);
  rep.theta_int = theta_integral(coeffs, model, horizon);
  rep.g_int = g_integral(coeffs, horizon);
  rep.g_sq_int = g_sq_integral(coeffs, horizon);

  const double sig = coeffs.sigma;
  rep.term_norms =
      (p - 1.0) / 4.0 * (2.0 * rep.theta_int + rep.lambda_T * horizon + norm_x_h * norm_x_h + norm_y_h * norm_y_h);
  rep.term_quadratic =
      (p - 1.0) * rep.g_sq_int / (4.0 * (sig * rep.g_int) * (sig * rep.g_int)) * dist_h * dist_h;
  if (dist_h > 0.0) {
    const double coeff = std::pow(rep.lambda_T, (2.0 - sig) / 2.0) * std::pow((sig + 2.0) / sig, sig + 1.0) *
                         std::pow(2.0 * p * (p + 1.0), sig / 2.0) /
                         (4.0 * std::pow(p - 1.0, sig - 1.0) * std::pow(rep.g_int, sig));
    rep.term_sigma = coeff * std::pow(dist_h, sig);
  }
  rep.log_harnack_rhs = rep.term_norms + rep.term_quadratic + rep.term_sigma;
  rep.harnack_rhs = std::exp(rep.log_harnack_rhs);
  return rep;
}

BoundReport harnack_rhs(const CoefficientSet& coeffs, const SpectralModel& model, double horizon, double p,
                        const StateVector& x, const StateVector& y) {
  return harnack_rhs_from_norms(coeffs, model, horizon, p, model.norm_h(x), model.norm_h(y), model.norm_h(x - y));
}

HomogeneousConstants homogeneous_constants(const CoefficientSet& coeffs, const SpectralModel& model,
                                           double horizon) {
  require_horizon(horizon);
  if (!coeffs.time_homogeneous()) {
    throw Error(Errc::NotTimeHomogeneous, "density bound needs time-independent coefficients");
  }
  const double delta = coeffs.delta.at(0.0);
  const double eta = coeffs.eta.at(0.0);
  const double gamma = coeffs.gamma.at(0.0);
  const double xi = coeffs.xi.at(0.0);
  const double q = model.hs_norm_sq();
  const double r = coeffs.r;
  const double sig = coeffs.sigma;
  const double T = horizon;

  HomogeneousConstants k;
  k.lambda_T = delta / 2.0 * std::exp(-(2.0 * gamma + 2.0 * q + 1.0) * T);
  k.theta = q + std::pow(2.0, (r + 2.0) / r) * std::pow(eta, (r + 1.0) / r) * std::pow(delta, -1.0 / r);
  const double amp = std::pow(delta * xi, 1.0 / sig);
  if (gamma == 0.0) {
    k.g_int = amp * T;
    k.g_sq_int = (sig + 2.0) * (sig + 2.0) * amp * amp * T;
  } else {
    k.g_int = amp * (1.0 - std::exp(-gamma * T)) / gamma;
    k.g_sq_int = (sig + 2.0) * (sig + 2.0) * amp * amp * (1.0 - std::exp(-2.0 * gamma * T)) / (2.0 * gamma);
  }
  return k;
}

double density_log_integrand(const HomogeneousConstants& k, double sigma, double horizon, double p, double norm_x_h,
                             double norm_y_h, double dist_h) {
  const double T = horizon;
  double value = -(2.0 * k.theta * T + k.lambda_T * T + norm_x_h * norm_x_h + norm_y_h * norm_y_h) / (4.0 * (p - 1.0));
  value -= k.g_sq_int / (4.0 * (p - 1.0) * (sigma * k.g_int) * (sigma * k.g_int)) * dist_h * dist_h;
  if (dist_h > 0.0) {
    value -= std::pow(k.lambda_T, (2.0 - sigma) / 2.0) * std::pow((sigma + 2.0) / sigma, sigma + 1.0) *
             std::pow(2.0, sigma / 2.0 - 2.0) * std::pow(p * (2.0 * p - 1.0), sigma / 2.0) /
             ((p - 1.0) * std::pow(k.g_int, sigma)) * std::pow(dist_h, sigma);
  }
  return value;
}

DensityBound density_lp_bound(const CoefficientSet& coeffs, const SpectralModel& model, double horizon, double p,
                              const StateVector& x, std::span<const StateVector> mu_samples) {
  require_p(p);
  if (mu_samples.empty()) throw Error(Errc::EmptySample, "density bound needs at least one sample");
  const HomogeneousConstants k = homogeneous_constants(coeffs, model, horizon);
  const double nx = model.norm_h(x);

  std::vector<double> logs;
  logs.reserve(mu_samples.size());
  for (const StateVector& y : mu_samples) {
    logs.push_back(density_log_integrand(k, coeffs.sigma, horizon, p, nx, model.norm_h(y), model.norm_h(x - y)));
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  double acc = 0.0;
  for (double v : logs) acc += std::exp(v - top);

  DensityBound out;
  out.samples = mu_samples.size();
  out.log_integral = top + std::log(acc / static_cast<double>(mu_samples.size()));
  out.log_bound = -(p - 1.0) / p * out.log_integral;
  out.bound = std::exp(out.log_bound);
  return out;
}

}  // namespace fdh
