#include "fdh/conditions.hpp"

#include "fdh/error.hpp"
#include "fdh/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fdh {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void add_clause(ConditionReport& rep, std::string name, bool holds, std::string detail) {
  rep.clauses.push_back(Clause{std::move(name), holds, std::move(detail)});
}

/// holds = conjunction of clauses; detail names the first failing clause.
void conclude(ConditionReport& rep) {
  rep.holds = true;
  for (const Clause& c : rep.clauses) {
    if (!c.holds) {
      rep.holds = false;
      rep.detail = "fails: " + c.name + " (" + c.detail + ")";
      return;
    }
  }
  rep.detail = "all clauses hold";
}

double sigma_floor(double r) { return 4.0 / (1.0 + r); }

void add_common_hypotheses(ConditionReport& rep, const AsymptoticSpec& a) {
  add_clause(rep, "eps_in_unit_interval", a.eps > 0.0 && a.eps < 1.0, "eps = " + fmt(a.eps) + " must lie in (0,1)");
  add_clause(rep, "sigma_floor", a.sigma >= sigma_floor(a.r) * (1.0 - 1e-12),
             "sigma = " + fmt(a.sigma) + " must be >= 4/(1+r) = " + fmt(sigma_floor(a.r)));
}

}  // namespace

void AsymptoticSpec::validate() const {
  if (!(c > 0.0)) throw Error(Errc::InvalidArgument, "eigenvalue growth constant c must be positive");
  if (!(rho > 0.0)) throw Error(Errc::InvalidArgument, "eigenvalue growth exponent rho must be positive");
  if (!(r > 0.0 && r < 1.0)) throw Error(Errc::InvalidArgument, "r must be in (0,1)");
}

ConditionReport hs_check(const SpectralModel& model) {
  ConditionReport rep;
  rep.check = "hilbert_schmidt";
  const double sum = model.hs_norm_sq();
  rep.values["hs_norm_sq"] = sum;
  add_clause(rep, "finite_sum", std::isfinite(sum), "sum q_i^2/lambda_i = " + fmt(sum));
  conclude(rep);
  return rep;
}

ConditionReport hs_check(const AsymptoticSpec& asym) {
  asym.validate();
  ConditionReport rep;
  rep.check = "hilbert_schmidt";
  const double exponent = 2.0 * asym.theta - asym.alpha * asym.rho;
  rep.values["series_exponent"] = exponent;
  add_clause(rep, "series_converges", exponent < -1.0,
             "sum i^(2 theta - alpha rho) with exponent " + fmt(exponent) + " needs exponent < -1");
  conclude(rep);
  return rep;
}

double norm_domination_ratio(const SpectralModel& model, double r, double sigma, const StateVector& x) {
  const SpectralCoeffs c = model.to_spectral(x);
  const double lp = model.norm_lp(x, r + 1.0);
  const double h = model.norm_h_of_coeffs(c);
  const double q = model.norm_q_of_coeffs(c);
  return lp * lp * std::pow(h, sigma - 2.0) / std::pow(q, sigma);
}

double norm_domination_lower_bound(const SpectralModel& model, double sigma) {
  const double m_min = model.space().min_weight();
  const double q_min = model.q_diag().cwiseAbs().minCoeff();
  const double spread = (model.eigenvalues().cwiseSqrt().array() / model.q_diag().cwiseAbs().array()).maxCoeff();
  return m_min * m_min * q_min * q_min / std::pow(spread, sigma - 2.0);
}

std::vector<StateVector> sample_states(const SpectralModel& model, std::int64_t count, std::uint64_t seed) {
  if (count <= 0) throw Error(Errc::InvalidSampleCount, "sample count must be positive");
  const auto n = static_cast<Eigen::Index>(model.size());
  std::vector<StateVector> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t j = 0; j < count; ++j) {
    const NormalSource source(seed, static_cast<std::uint64_t>(j), Stream::ConditionSampling);
    const auto bits = source.raw(0, 0xFFFFu);
    StateVector x;
    if (j < n) {
      x = model.eigenfunction(static_cast<std::size_t>(j));
    } else {
      const auto pick = static_cast<Eigen::Index>(bits[1] % static_cast<std::uint32_t>(n));
      const double sign = (bits[2] & 1u) ? -1.0 : 1.0;
      switch (bits[0] % 3u) {
        case 0:
          x = sign * model.eigenfunction(static_cast<std::size_t>(pick));
          break;
        case 1: {
          SpectralCoeffs c(n);
          source.fill(1, c);
          if (c.squaredNorm() == 0.0) c[0] = 1.0;
          x = model.from_spectral(c);
          break;
        }
        default:
          x = StateVector::Zero(n);
          x[pick] = sign;
          break;
      }
    }
    x /= model.norm_h(x);
    out.push_back(std::move(x));
  }
  return out;
}

ConditionReport check_norm_domination_empirical(const SpectralModel& model, const CoefficientSet& coeffs,
                                                std::int64_t samples, std::uint64_t seed) {
  if (samples <= 0) throw Error(Errc::InvalidSampleCount, "sample count must be positive");
  ConditionReport rep;
  rep.check = "norm_domination_empirical";
  const auto states = sample_states(model, samples, seed);
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t j = 0; j < states.size(); ++j) {
    const double ratio = norm_domination_ratio(model, coeffs.r, coeffs.sigma, states[j]);
    if (ratio < best) {
      best = ratio;
      arg = j;
    }
  }
  rep.xi_estimate = best;
  rep.witness = states[arg];
  rep.values["min_ratio"] = best;
  rep.values["samples"] = static_cast<double>(samples);
  rep.values["certified_xi"] = norm_domination_lower_bound(model, coeffs.sigma);
  add_clause(rep, "positive_minimum", best > 0.0 && std::isfinite(best), "min sampled ratio = " + fmt(best));
  conclude(rep);
  return rep;
}

ConditionReport check_spectral_criterion(const AsymptoticSpec& a) {
  a.validate();
  ConditionReport rep;
  rep.check = "spectral_criterion";
  const double d_max = 2.0 * a.eps * (1.0 + a.r) / (1.0 - a.r);
  const double growth = (a.sigma + 2.0 * a.eps - 2.0) / (2.0 * a.sigma);
  const double needed = a.rho * growth;
  rep.values["d_max"] = d_max;
  rep.values["growth_exponent"] = growth;
  rep.values["theta_min"] = needed;
  add_clause(rep, "nash_dimension", a.d > 0.0 && a.d < d_max,
             "d = " + fmt(a.d) + " must lie in (0, 2 eps (1+r)/(1-r)) = (0, " + fmt(d_max) + ")");
  add_common_hypotheses(rep, a);
  add_clause(rep, "noise_growth", a.theta >= needed,
             "theta = " + fmt(a.theta) + " must be >= rho (sigma+2eps-2)/(2 sigma) = " + fmt(needed));
  const double hs_exp = 2.0 * a.theta - a.rho;
  rep.values["hs_exponent"] = hs_exp;
  add_clause(rep, "hilbert_schmidt", hs_exp < -1.0,
             "sum q_i^2/lambda_i needs 2 theta - rho = " + fmt(hs_exp) + " < -1");
  conclude(rep);
  return rep;
}

ConditionReport check_dirichlet_example(const DirichletExampleInput& in, const SpectralModel* model) {
  ConditionReport rep;
  rep.check = "dirichlet_example";
  const double r = in.r;
  const double eps_lo = (1.0 - r) / (2.0 * (1.0 + r));
  const double eps_hi = r / (1.0 + r);
  const double lower = in.eps * (r + 1.0) + 1.0 - r;
  rep.values["eps_lo"] = eps_lo;
  rep.values["eps_hi"] = eps_hi;
  rep.values["lower_exponent"] = lower;
  add_clause(rep, "r_window", r > 1.0 / 3.0 && r < 1.0, "r = " + fmt(r) + " must lie in (1/3, 1)");
  add_clause(rep, "eps_window", in.eps > eps_lo && in.eps < eps_hi,
             "eps = " + fmt(in.eps) + " must lie in (" + fmt(eps_lo) + ", " + fmt(eps_hi) + ")");
  add_clause(rep, "alpha_below_one", in.alpha < 1.0, "alpha = " + fmt(in.alpha) + " must be < 1");
  add_clause(rep, "sandwich_compatible", lower <= in.alpha,
             "eps(r+1)+1-r = " + fmt(lower) + " must be <= alpha = " + fmt(in.alpha));
  if (in.theta) {
    const double q2 = 2.0 * *in.theta;
    add_clause(rep, "power_noise_sandwich", lower <= q2 && q2 <= in.alpha,
               "2 theta = " + fmt(q2) + " must lie in [" + fmt(lower) + ", " + fmt(in.alpha) + "]");
  }
  if (model) {
    bool ok = true;
    std::string where;
    for (std::size_t i = 1; i <= model->size(); ++i) {
      const double q2 = model->q_diag()[static_cast<Eigen::Index>(i - 1)] * model->q_diag()[static_cast<Eigen::Index>(i - 1)];
      const double ii = static_cast<double>(i);
      if (!(in.c1 * std::pow(ii, lower) <= q2 && q2 <= in.c2 * std::pow(ii, in.alpha))) {
        ok = false;
        where = "violated at i = " + std::to_string(i);
        break;
      }
    }
    add_clause(rep, "finite_sandwich", ok, ok ? "c1 i^lower <= q_i^2 <= c2 i^alpha for i <= n" : where);
  }
  conclude(rep);
  return rep;
}

ConditionReport check_power_noise_example(const AsymptoticSpec& a) {
  a.validate();
  ConditionReport rep;
  rep.check = "power_noise_example";
  const double k = a.sigma + 2.0 * a.eps - 2.0;
  const double branch1 = k / (4.0 * (1.0 - a.eps));
  const double branch2 = k * (1.0 - a.r) / (2.0 * a.sigma * a.eps * (1.0 + a.r));
  const double threshold = std::max(branch1, branch2);
  const double alpha_lo = std::max((2.0 * a.theta + 1.0) * a.d / 2.0, (1.0 - a.r) * a.d / (2.0 * a.eps * (1.0 + a.r)));
  const double alpha_hi = a.sigma * a.theta * a.d / k;
  rep.values["theta_branch_noise"] = branch1;
  rep.values["theta_branch_dimension"] = branch2;
  rep.values["theta_threshold"] = threshold;
  rep.values["alpha_lo"] = alpha_lo;
  rep.values["alpha_hi"] = alpha_hi;

  add_common_hypotheses(rep, a);
  const std::string binding = branch1 >= branch2 ? "(sigma+2eps-2)/(4(1-eps))" : "(sigma+2eps-2)(1-r)/(2 sigma eps (1+r))";
  add_clause(rep, "theta_threshold", a.theta > threshold,
             "theta = " + fmt(a.theta) + " must exceed " + fmt(threshold) + ", binding branch " + binding);
  add_clause(rep, "alpha_window_nonempty", alpha_lo < alpha_hi,
             alpha_lo < alpha_hi ? "(" + fmt(alpha_lo) + ", " + fmt(alpha_hi) + "]" : "empty alpha window");
  add_clause(rep, "alpha_in_window", a.alpha > alpha_lo && a.alpha <= alpha_hi,
             "alpha = " + fmt(a.alpha) + " must lie in (" + fmt(alpha_lo) + ", " + fmt(alpha_hi) + "]");
  conclude(rep);
  return rep;
}

ConditionReport check_fractional_criterion(const AsymptoticSpec& a) {
  a.validate();
  ConditionReport rep;
  rep.check = "fractional_criterion";
  const double series = 2.0 * a.theta - a.alpha * a.rho;
  const double growth = a.alpha * a.rho * (a.sigma + 2.0 * a.eps - 2.0) / (2.0 * a.sigma);
  const double alpha_min = a.d * (1.0 - a.r) / (2.0 * a.eps * (1.0 + a.r));
  const double d_max = 2.0 * a.eps * (1.0 + a.r) / (1.0 - a.r);
  rep.values["series_exponent"] = series;
  rep.values["theta_min"] = growth;
  rep.values["alpha_threshold"] = alpha_min;
  rep.values["d_max"] = d_max;

  add_clause(rep, "series_converges", series < -1.0,
             "sum q_i^2/(lambda_i^(0))^alpha needs 2 theta - alpha rho = " + fmt(series) + " < -1");
  add_clause(rep, "noise_growth", a.theta >= growth,
             "theta = " + fmt(a.theta) + " must be >= alpha rho (sigma+2eps-2)/(2 sigma) = " + fmt(growth));
  add_clause(rep, "alpha_threshold", a.alpha > alpha_min,
             "alpha = " + fmt(a.alpha) + " must exceed d(1-r)/(2 eps (1+r)) = " + fmt(alpha_min));
  add_clause(rep, "nash_dimension", a.d > 0.0 && a.d < d_max,
             "d = " + fmt(a.d) + " must lie in (0, " + fmt(d_max) + ")");
  add_common_hypotheses(rep, a);
  conclude(rep);
  return rep;
}

ConditionReport check_embedding(const SpectralModel& model, const CoefficientSet& coeffs, std::int64_t samples,
                                std::uint64_t seed) {
  if (samples <= 0) throw Error(Errc::InvalidSampleCount, "sample count must be positive");
  ConditionReport rep;
  rep.check = "embedding";
  const auto states = sample_states(model, samples, seed);
  double best = 0.0;
  std::size_t arg = 0;
  for (std::size_t j = 0; j < states.size(); ++j) {
    const double ratio = model.norm_h(states[j]) / model.norm_lp(states[j], coeffs.r + 1.0);
    if (ratio > best) {
      best = ratio;
      arg = j;
    }
  }
  rep.values["embedding_constant"] = best;
  rep.witness = states[arg];
  add_clause(rep, "finite_constant", std::isfinite(best), "max |x|_H/|x|_{r+1} = " + fmt(best));
  conclude(rep);
  return rep;
}

}  // namespace fdh
