#pragma once

// Path ensembles and the statistical verdicts built on them. Every path is an
// independent work item keyed by its index; the serial and OpenMP drivers run
// the same per-path kernel and reduce in index order, so their output is
// bit-identical.

#include "fdh/bounds.hpp"
#include "fdh/coupling.hpp"
#include "fdh/dynamics.hpp"
#include "fdh/spectral_model.hpp"
#include "fdh/stats.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fdh {

class TestFunction {
 public:
  enum class Kind { One, ExpNegHSq, RationalH, IndicatorBall };

  static TestFunction one() { return TestFunction(Kind::One); }
  /// exp(-|x|_H^2).
  static TestFunction exp_neg_h_sq() { return TestFunction(Kind::ExpNegHSq); }
  /// 1 / (1 + |x|_H^2).
  static TestFunction rational_h() { return TestFunction(Kind::RationalH); }
  /// 1 on the closed H-ball around center.
  static TestFunction indicator_ball(StateVector center, double radius);

  double operator()(const SpectralModel& model, const StateVector& x) const;

  Kind kind() const noexcept { return kind_; }
  const StateVector& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  std::string_view name() const noexcept;
  static std::optional<Kind> parse_kind(std::string_view name) noexcept;

 private:
  explicit TestFunction(Kind k) : kind_(k) {}
  Kind kind_;
  StateVector center_;
  double radius_ = 0.0;
};

enum class Execution { Serial, OpenMP };

struct EnsembleConfig {
  std::int64_t n_paths = 1000;
  double dt = 1e-3;
  /// Horizon; for invariant-measure runs this includes the burn-in.
  double T = 1.0;
  std::uint64_t seed = 0;
  double burn_in = 0.0;
  /// Spacing of retained samples after burn-in; 0 keeps every step.
  double sample_interval = 0.0;
  Scheme scheme = Scheme::TamedEuler;
  double noise_scale = 1.0;
  double couple_tol_rel = 1e-6;
  /// Number of coupled paths whose step-by-step trace is kept.
  std::int64_t trace_paths = 0;
  Execution execution = Execution::OpenMP;
  /// OpenMP thread count; 0 uses the runtime default.
  int workers = 0;
  /// A run fails once more than this fraction of paths blow up.
  double max_blowup_fraction = 1e-3;

  /// Throws InvalidArgument: n_paths >= 2, dt > 0, T > 0, 0 <= burn_in < T.
  void validate() const;
  StepConfig step_config(std::uint64_t path_index) const;
};

/// Runs work(i) for i in [0, n) on the chosen driver. work must only touch slot i of its output.
void for_each_path(const EnsembleConfig& cfg, std::int64_t n, const std::function<void(std::int64_t)>& work);

struct PathEnd {
  bool ok = false;
  StateVector x;
};

/// X_T for every path started at x.
std::vector<PathEnd> simulate_endpoints(const SpectralModel& model, const CoefficientSet& coeffs,
                                        const EnsembleConfig& cfg, const StateVector& x);

/// Mean of values[i] over paths with ok[i]; throws BlowupLimitExceeded past the blowup limit.
Estimate reduce_paths(const EnsembleConfig& cfg, const std::vector<char>& ok, const std::vector<double>& values);

/// P_T F(x) = E F(X_T).
Estimate estimate_ptf(const SpectralModel& model, const CoefficientSet& coeffs, const EnsembleConfig& cfg,
                      const StateVector& x, const TestFunction& f);

struct CoupledOutcome {
  bool ok = false;
  bool coupled = false;
  double tau = 0.0;
  double log_r = 0.0;
  double zeta_sq_int = 0.0;
  double f_int = 0.0;
  double final_dist_h = 0.0;
  /// Trapezoidal int_0^T |X_t|_{r+1}^{r+1} dt and the same for Y.
  double moment_int_x = 0.0;
  double moment_int_y = 0.0;
  StateVector x_T;
  StateVector y_T;
};

struct CoupledEnsemble {
  CouplingSchedule schedule;
  std::uint64_t n_steps = 0;
  std::vector<CoupledOutcome> paths;
  /// traces[k][j]: left-end values of step j on path k, for k < trace_paths.
  std::vector<std::vector<StepTrace>> traces;
  std::int64_t blowups = 0;
};

/// Runs (X, Y) from (x, y) with the coupling schedule; drift_enabled = false uses beta == 0.
CoupledEnsemble run_coupled(const SpectralModel& model, const CoefficientSet& coeffs, const EnsembleConfig& cfg,
                            const StateVector& x, const StateVector& y, bool drift_enabled = true);

/// Mean of R^exponent F(Y_T) over the coupled ensemble.
Estimate estimate_weighted(const SpectralModel& model, const CoefficientSet& coeffs, const EnsembleConfig& cfg,
                           const StateVector& x, const StateVector& y, const TestFunction& f, double exponent);

struct HarnackVerdict {
  bool holds = false;
  double p = 0.0;
  double slack = 0.05;
  /// Estimate of P_T F(y) through the weighted ensemble.
  Estimate ptf_y;
  /// Estimate of P_T F^p(x).
  Estimate ptf_p_x;
  BoundReport bound;
  /// (upper ci of P_T F(y))^p and harnack_rhs * lower ci of P_T F^p(x), in logs.
  double log_lhs_upper = 0.0;
  double log_rhs_lower = 0.0;
};

/// Harnack check: (P_T F)^p(y) <= P_T F^p(x) * harnack_rhs, compared CI-to-CI with slack.
/// Errors: InvalidP.
HarnackVerdict verify_harnack(const SpectralModel& model, const CoefficientSet& coeffs, const EnsembleConfig& cfg,
                              const StateVector& x, const StateVector& y, double p, const TestFunction& f,
                              double slack = 0.05);

struct MomentCheck {
  std::string process;
  bool holds = false;
  /// CI (3 sigma) of the estimate overlaps [0.95, 1.05] times the bound.
  bool straddle = false;
  LogMeanEstimate estimate;
  double log_bound = 0.0;
};

struct MomentVerdict {
  bool holds = false;
  double lambda_T = 0.0;
  double theta_int = 0.0;
  MomentCheck x;
  std::optional<MomentCheck> y;
};

/// E exp[lambda_T int |X|_{r+1}^{r+1}] <= exp[theta_int + |x|_H^2], and for the coupled Y
/// the same with |y|_H^2 + |x-y|_H^{2(1-eps)} int beta^2 e^{-2 eps Gamma} added.
MomentVerdict verify_exponential_moments(const SpectralModel& model, const CoefficientSet& coeffs,
                                         const EnsembleConfig& cfg, const StateVector& x,
                                         const std::optional<StateVector>& y = std::nullopt);

struct InvariantReport {
  /// Retained states, path-major.
  std::vector<StateVector> samples;
  double eps0 = 0.01;
  /// Per-path time averages, summarized across paths.
  Estimate lp_moment;
  Estimate exp_h_r1;
  std::optional<Estimate> exp_h_sq;
  /// Averages of |.|_{r+1}^{r+1} over even- and odd-indexed paths.
  double half_even = 0.0;
  double half_odd = 0.0;
  double split_rel_diff = 0.0;
  bool finite = false;
  std::int64_t samples_per_path = 0;
  std::int64_t blowups = 0;
};

/// Ergodic averages after burn-in. Errors: NotTimeHomogeneous, PositiveGamma.
InvariantReport estimate_invariant(const SpectralModel& model, const CoefficientSet& coeffs,
                                   const EnsembleConfig& cfg, const StateVector& x0, double eps0 = 0.01);

struct FellerProbe {
  std::vector<double> radii;
  std::vector<Estimate> differences;
  Estimate base;
};

/// P_T F at x and at x + radius e_1/|e_1|_H, common random numbers; reports E[F(X^y_T) - F(X^x_T)].
FellerProbe strong_feller_probe(const SpectralModel& model, const CoefficientSet& coeffs,
                                const EnsembleConfig& cfg, const StateVector& x, const std::vector<double>& radii,
                                const TestFunction& f);

struct ContractionCheck {
  std::int64_t paths = 0;
  /// Largest one-step increase of e^{-2 Gamma_t}|X_t - Y_t|_H^2 over all paths.
  double max_step_increase = 0.0;
  /// Largest |X_t - Y_t|_H^2 / (e^{2 Gamma_t} |x - y|_H^2) over all paths and steps.
  double max_growth_ratio = 0.0;
  std::int64_t blowups = 0;
};

/// Shared-noise pairs with beta == 0.
ContractionCheck check_contraction(const SpectralModel& model, const CoefficientSet& coeffs,
                                   const EnsembleConfig& cfg, const StateVector& x, const StateVector& y);

struct ConvergenceStudy {
  std::vector<double> dts;
  /// sqrt(E |X^dt_T - X^ref_T|_H^2) for each dt.
  std::vector<double> errors;
  double ref_dt = 0.0;
  /// Least-squares slope of log error against log dt.
  double order = 0.0;
};

/// Strong self-convergence against a reference path on dt_min / ref_factor, with
/// coarse increments summed from the reference increments.
ConvergenceStudy strong_self_convergence(const SpectralModel& model, const CoefficientSet& coeffs,
                                         const EnsembleConfig& cfg, const StateVector& x,
                                         const std::vector<double>& dts, int ref_factor = 64);

}  // namespace fdh
