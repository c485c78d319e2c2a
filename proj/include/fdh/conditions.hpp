#pragma once

// Sufficient-condition calculus for the noise spectrum: the Hilbert-Schmidt
// requirement, the norm-domination condition
//   |x|_{r+1}^2 |x|_H^{sigma-2} >= xi |x|_Q^sigma,
// and the exponent windows that imply it for power-law spectra.

#include "fdh/dynamics.hpp"
#include "fdh/spectral_model.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fdh {

struct Clause {
  std::string name;
  bool holds = false;
  std::string detail;

  bool operator==(const Clause&) const = default;
};

struct ConditionReport {
  std::string check;
  bool holds = false;
  double xi_estimate = 0.0;
  std::optional<StateVector> witness;
  std::string detail;
  std::vector<Clause> clauses;
  /// Named numeric values (window endpoints, thresholds, sums).
  std::map<std::string, double> values;
};

/// Power-law description of an infinite spectrum: q_i = i^theta,
/// lambda_i^{(0)} >= c i^rho, operator power alpha, Nash dimension d.
struct AsymptoticSpec {
  double theta = 1.0;
  double c = 1.0;
  double rho = 2.0;
  double alpha = 1.0;
  double d = 1.0;
  double eps = 0.25;
  double r = 0.5;
  double sigma = 8.0 / 3.0;

  /// Throws InvalidArgument unless c > 0 and rho > 0.
  void validate() const;
};

/// sum_i q_i^2 / lambda_i of a finite model.
ConditionReport hs_check(const SpectralModel& model);
/// sum_i i^{2 theta} / lambda_i^alpha converges iff 2 theta - alpha rho < -1.
ConditionReport hs_check(const AsymptoticSpec& asym);

/// Minimum of |x|_{r+1}^2 |x|_H^{sigma-2} / |x|_Q^sigma over random nonzero states.
ConditionReport check_norm_domination_empirical(const SpectralModel& model, const CoefficientSet& coeffs,
                                                std::int64_t samples, std::uint64_t seed = 0);

/// |x|_{r+1}^2 |x|_H^{sigma-2} / |x|_Q^sigma for one state.
double norm_domination_ratio(const SpectralModel& model, double r, double sigma, const StateVector& x);

/// A xi that provably satisfies the domination condition on a finite model:
/// m_min^2 q_min^2 / max_i(sqrt(lambda_i)/|q_i|)^{sigma-2}.
double norm_domination_lower_bound(const SpectralModel& model, double sigma);

/// Spectral criterion: d < 2 eps (1+r)/(1-r), eps in (0,1), sigma >= 4/(1+r),
/// theta >= rho (sigma + 2 eps - 2) / (2 sigma).
ConditionReport check_spectral_criterion(const AsymptoticSpec& asym);

struct DirichletExampleInput {
  double r = 0.5;
  double eps = 0.25;
  /// Upper growth exponent of q_i^2.
  double alpha = 0.9;
  /// Optional q_i = i^theta; adds 2 theta to the sandwich.
  std::optional<double> theta;
  double c1 = 1.0;
  double c2 = 1.0;
};

/// Dirichlet Laplacian on an interval: r in (1/3,1), eps in ((1-r)/(2(1+r)), r/(1+r)),
/// alpha < 1, c1 i^{eps(r+1)+1-r} <= q_i^2 <= c2 i^alpha. With a model, also checks
/// the sandwich for i <= n.
ConditionReport check_dirichlet_example(const DirichletExampleInput& in, const SpectralModel* model = nullptr);

/// q_i = i^theta with -(-L_0)^alpha: theta above
/// max{(sigma+2eps-2)/(4(1-eps)), (sigma+2eps-2)(1-r)/(2 sigma eps (1+r))} and
/// alpha in ((2theta+1)d/2 v (1-r)d/(2 eps (1+r)), sigma theta d/(sigma+2eps-2)].
ConditionReport check_power_noise_example(const AsymptoticSpec& asym);

/// Fractional-power criterion: sum q_i^2/(lambda_i^{(0)})^alpha < inf,
/// theta >= alpha rho (sigma+2eps-2)/(2 sigma), alpha > d(1-r)/(2 eps (1+r)).
ConditionReport check_fractional_criterion(const AsymptoticSpec& asym);

/// Largest sampled |x|_H / |x|_{r+1}: an empirical embedding constant.
ConditionReport check_embedding(const SpectralModel& model, const CoefficientSet& coeffs, std::int64_t samples,
                                std::uint64_t seed = 0);

/// Draws `count` nonzero states normalized to |x|_H = 1 from a mixture of
/// single eigenmodes, dense Gaussian coefficient vectors, and point masses.
std::vector<StateVector> sample_states(const SpectralModel& model, std::int64_t count, std::uint64_t seed);

}  // namespace fdh
