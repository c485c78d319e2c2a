#include "fdh/conditions.hpp"
#include "fdh/error.hpp"
#include "fdh/montecarlo.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace fdh {
namespace {

using testing::dirichlet_model;
using testing::two_point_model;

EnsembleConfig small_run(std::int64_t paths = 200, double T = 0.2) {
  EnsembleConfig cfg;
  cfg.n_paths = paths;
  cfg.T = T;
  cfg.dt = 1e-3;
  cfg.seed = 17;
  return cfg;
}

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::IOError;
}

TEST(TestFunction, Values) {
  const SpectralModel m = two_point_model();
  const StateVector x = StateVector::Constant(2, 0.4);
  const double h = m.norm_h(x);
  EXPECT_EQ(TestFunction::one()(m, x), 1.0);
  EXPECT_NEAR(TestFunction::exp_neg_h_sq()(m, x), std::exp(-h * h), 1e-15);
  EXPECT_NEAR(TestFunction::rational_h()(m, x), 1.0 / (1.0 + h * h), 1e-15);
  EXPECT_EQ(TestFunction::indicator_ball(x, 0.0)(m, x), 1.0);
  EXPECT_EQ(TestFunction::indicator_ball(StateVector::Zero(2), 0.5 * h)(m, x), 0.0);
  EXPECT_THROW(TestFunction::indicator_ball(x, -1.0), Error);
  for (auto k : {TestFunction::one(), TestFunction::exp_neg_h_sq(), TestFunction::rational_h()}) {
    EXPECT_EQ(TestFunction::parse_kind(k.name()), k.kind());
  }
}

TEST(Ensemble, SerialAndOpenMPAreBitIdentical) {
  const SpectralModel m = dirichlet_model(4, 0.25);
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 8.0 / 3.0, norm_domination_lower_bound(m, 8.0 / 3.0));
  const StateVector x = StateVector::Constant(4, 0.3);
  const StateVector y = x + 0.1 * m.eigenfunction(0) / m.norm_h(m.eigenfunction(0));
  EnsembleConfig serial = small_run(64);
  serial.execution = Execution::Serial;
  const Estimate ref = estimate_ptf(m, c, serial, x, TestFunction::exp_neg_h_sq());
  const CoupledEnsemble ref_pair = run_coupled(m, c, serial, x, y);
  for (int w : {1, 2, 8}) {
    EnsembleConfig par = serial;
    par.execution = Execution::OpenMP;
    par.workers = w;
    EXPECT_EQ(estimate_ptf(m, c, par, x, TestFunction::exp_neg_h_sq()), ref) << w;
    const CoupledEnsemble pair = run_coupled(m, c, par, x, y);
    ASSERT_EQ(pair.paths.size(), ref_pair.paths.size());
    for (std::size_t i = 0; i < pair.paths.size(); ++i) {
      EXPECT_EQ(pair.paths[i].log_r, ref_pair.paths[i].log_r);
      EXPECT_EQ(pair.paths[i].y_T, ref_pair.paths[i].y_T);
      EXPECT_EQ(pair.paths[i].coupled, ref_pair.paths[i].coupled);
    }
  }
}

TEST(Ensemble, ExceptionsPropagateFromWorkers) {
  EnsembleConfig cfg = small_run(16);
  cfg.workers = 4;
  EXPECT_EQ(code_of([&] {
              for_each_path(cfg, 16, [](std::int64_t i) {
                if (i == 7) throw Error(Errc::InvalidArgument, "boom");
              });
            }),
            Errc::InvalidArgument);
}

TEST(Ensemble, ConstantTestFunction) {
  const SpectralModel m = two_point_model();
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 8.0 / 3.0, 0.5);
  const Estimate e = estimate_ptf(m, c, small_run(), StateVector::Zero(2), TestFunction::one());
  EXPECT_EQ(e.mean, 1.0);
  EXPECT_EQ(e.std_error, 0.0);
  EXPECT_EQ(e.n, 200);
}

TEST(Ensemble, NoNoiseGivesDeterministicPaths) {
  const SpectralModel m = two_point_model();
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 8.0 / 3.0, 0.5);
  EnsembleConfig cfg = small_run();
  cfg.noise_scale = 0.0;
  const StateVector x = StateVector::Constant(2, 0.4);
  const auto ends = simulate_endpoints(m, c, cfg, x);
  StateVector ref = x;
  for (std::uint64_t k = 0; k < step_count(cfg.T, cfg.dt); ++k) {
    ref = step(m, c, cfg.scheme, static_cast<double>(k) * cfg.dt, cfg.dt, ref, StateVector::Zero(2));
  }
  for (const PathEnd& e : ends) {
    ASSERT_TRUE(e.ok);
    EXPECT_LT((e.x - ref).cwiseAbs().maxCoeff(), 1e-15);
  }
  EXPECT_LT(estimate_ptf(m, c, cfg, x, TestFunction::exp_neg_h_sq()).std_error, 1e-15);
}

TEST(Ensemble, OrnsteinUhlenbeckMean) {
  Matrix op(1, 1);
  op << -1.0;
  const SpectralModel m = SpectralModel::build(MeasureSpace::uniform(1), op, Vector::Ones(1));
  CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 8.0 / 3.0, 1.0);
  c.nonlinearity = Nonlinearity::Linear;
  EnsembleConfig cfg = small_run(4000, 1.0);
  StateVector x(1);
  x << 1.0;
  const auto ends = simulate_endpoints(m, c, cfg, x);
  std::vector<double> v, v2;
  for (const auto& e : ends) {
    v.push_back(e.x[0]);
    v2.push_back(e.x[0] * e.x[0]);
  }
  const Estimate mean = Estimate::from_samples(v);
  const Estimate second = Estimate::from_samples(v2);
  const double mu = std::exp(-1.0);
  const double var = 0.5 * (1.0 - std::exp(-2.0));
  EXPECT_NEAR(mean.mean, mu, 3.0 * mean.std_error);
  EXPECT_NEAR(second.mean, var + mu * mu, 3.0 * second.std_error);
}

class CoupledCase : public ::testing::Test {
 protected:
  SpectralModel m = dirichlet_model(4, 0.25);
  CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 8.0 / 3.0, norm_domination_lower_bound(m, 8.0 / 3.0));
  StateVector x = StateVector::Constant(4, 0.3);
  StateVector y = x + 0.1 * m.eigenfunction(0) / m.norm_h(m.eigenfunction(0));
};

TEST_F(CoupledCase, GirsanovWeightHasUnitMean) {
  EnsembleConfig cfg = small_run(2000, 0.5);
  const Estimate r = estimate_weighted(m, c, cfg, x, y, TestFunction::one(), 1.0);
  EXPECT_NEAR(r.mean, 1.0, 3.0 * r.std_error);
  EXPECT_GT(r.std_error, 0.0);
}

TEST_F(CoupledCase, ZeroExponentWithConstantFIsExactlyOne) {
  const Estimate e = estimate_weighted(m, c, small_run(50), x, y, TestFunction::one(), 0.0);
  EXPECT_EQ(e.mean, 1.0);
  EXPECT_EQ(e.std_error, 0.0);
}

TEST_F(CoupledCase, WeightedEstimatorMatchesDirectSimulation) {
  EnsembleConfig cfg = small_run(2000, 0.5);
  const Estimate w = estimate_weighted(m, c, cfg, x, y, TestFunction::exp_neg_h_sq(), 1.0);
  EnsembleConfig other = cfg;
  other.seed = 99;
  const Estimate d = estimate_ptf(m, c, other, y, TestFunction::exp_neg_h_sq());
  EXPECT_NEAR(w.mean, d.mean, 3.0 * joint_stderr(w, d));
}

TEST_F(CoupledCase, CoincidingStartsHaveUnitWeight) {
  const CoupledEnsemble ens = run_coupled(m, c, small_run(20), x, x);
  for (const auto& p : ens.paths) {
    EXPECT_EQ(p.log_r, 0.0);
    EXPECT_EQ(p.x_T, p.y_T);
  }
}

TEST_F(CoupledCase, PathsCoupleBeforeHorizon) {
  EnsembleConfig cfg = small_run(50, 1.0);
  cfg.dt = 1e-4;
  const CoupledEnsemble ens = run_coupled(m, c, cfg, x, y);
  for (const auto& p : ens.paths) {
    EXPECT_TRUE(p.coupled);
    EXPECT_LE(p.tau, 1.0);
    EXPECT_EQ(p.x_T, p.y_T);
  }
}

TEST_F(CoupledCase, NoDriftMeansNoCoupling) {
  const CoupledEnsemble ens = run_coupled(m, c, small_run(20), x, y, false);
  for (const auto& p : ens.paths) {
    EXPECT_FALSE(p.coupled);
    EXPECT_TRUE(std::isnan(p.tau));
    EXPECT_EQ(p.log_r, 0.0);
  }
}

TEST_F(CoupledCase, StdErrorShrinksWithPaths) {
  // A ball holding about half the mass gives a Bernoulli F with a stable spread.
  std::vector<double> radii;
  for (const PathEnd& e : simulate_endpoints(m, c, small_run(401), x)) radii.push_back(m.norm_h(e.x - x));
  std::nth_element(radii.begin(), radii.begin() + 200, radii.end());
  const TestFunction ball = TestFunction::indicator_ball(x, radii[200]);
  EnsembleConfig big = small_run(6400);
  big.seed = 5;
  const Estimate a = estimate_ptf(m, c, small_run(400), x, ball);
  const Estimate b = estimate_ptf(m, c, big, x, ball);
  EXPECT_NEAR(a.std_error / b.std_error, 4.0, 0.6);
}

TEST_F(CoupledCase, HarnackAndMomentVerdictsHold) {
  EnsembleConfig cfg = small_run(500, 0.5);
  const HarnackVerdict h = verify_harnack(m, c, cfg, x, y, 2.0, TestFunction::exp_neg_h_sq());
  EXPECT_TRUE(h.holds);
  EXPECT_EQ(code_of([&] { verify_harnack(m, c, cfg, x, y, 1.0, TestFunction::one()); }), Errc::InvalidP);
  const MomentVerdict mv = verify_exponential_moments(m, c, cfg, x, y);
  EXPECT_TRUE(mv.holds);
  ASSERT_TRUE(mv.y.has_value());
  EXPECT_TRUE(mv.x.holds && mv.y->holds);
}

TEST_F(CoupledCase, HarnackHoldsAtCoincidingPoints) {
  EnsembleConfig cfg = small_run(300, 0.5);
  for (double p : {2.0, 4.0}) {
    const HarnackVerdict h = verify_harnack(m, c, cfg, x, x, p, TestFunction::rational_h());
    EXPECT_TRUE(h.holds) << p;
    EXPECT_EQ(h.bound.term_quadratic, 0.0);
    EXPECT_EQ(h.bound.term_sigma, 0.0);
  }
}

TEST_F(CoupledCase, ContractionWithoutDrift) {
  EnsembleConfig cfg = small_run(20, 0.2);
  cfg.dt = 1e-4;
  const ContractionCheck cc = check_contraction(m, c, cfg, x, y);
  EXPECT_EQ(cc.paths, 20);
  EXPECT_LE(cc.max_step_increase, 1e-10);
  EXPECT_LE(cc.max_growth_ratio, 1.0 + 1e-8);
}

TEST_F(CoupledCase, FellerProbeSanity) {
  EnsembleConfig cfg = small_run(100);
  const FellerProbe zero = strong_feller_probe(m, c, cfg, x, {0.0, 0.1}, TestFunction::exp_neg_h_sq());
  EXPECT_EQ(zero.differences[0].mean, 0.0);
  EXPECT_EQ(zero.differences[0].std_error, 0.0);
  EXPECT_NE(zero.differences[1].mean, 0.0);
  const FellerProbe one = strong_feller_probe(m, c, cfg, x, {0.1, 0.05}, TestFunction::one());
  for (const auto& d : one.differences) EXPECT_EQ(d.mean, 0.0);
}

TEST_F(CoupledCase, SelfConvergenceErrorsShrink) {
  EnsembleConfig cfg = small_run(50, 0.25);
  const ConvergenceStudy s = strong_self_convergence(m, c, cfg, x, {0.01, 0.005, 0.0025}, 16);
  ASSERT_EQ(s.errors.size(), 3u);
  EXPECT_GT(s.errors[0], s.errors[1]);
  EXPECT_GT(s.errors[1], s.errors[2]);
  EXPECT_GT(s.order, 0.0);
  EXPECT_EQ(code_of([&] { strong_self_convergence(m, c, cfg, x, {0.01}); }), Errc::InvalidArgument);
}

TEST(Invariant, RequiresHomogeneousNonpositiveGamma) {
  const SpectralModel m = two_point_model();
  EnsembleConfig cfg = small_run(10, 1.0);
  cfg.burn_in = 0.5;
  CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.5, 8.0 / 3.0, 0.5);
  EXPECT_EQ(code_of([&] { estimate_invariant(m, c, cfg, StateVector::Zero(2)); }), Errc::PositiveGamma);
  c.gamma = Schedule({0.5}, {-1.0, -2.0});
  EXPECT_EQ(code_of([&] { estimate_invariant(m, c, cfg, StateVector::Zero(2)); }), Errc::NotTimeHomogeneous);
}

TEST(Invariant, SmallRunIsFinite) {
  const SpectralModel m = two_point_model();
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, -1.0, 8.0 / 3.0, 0.5);
  EnsembleConfig cfg = small_run(20, 1.5);
  cfg.burn_in = 0.5;
  cfg.sample_interval = 0.01;
  const InvariantReport rep = estimate_invariant(m, c, cfg, StateVector::Zero(2));
  EXPECT_TRUE(rep.finite);
  // both ends of [burn_in, T] are kept
  EXPECT_EQ(rep.samples_per_path, 101);
  EXPECT_EQ(rep.samples.size(), 2020u);
  ASSERT_TRUE(rep.exp_h_sq.has_value());
  EXPECT_GT(rep.lp_moment.mean, 0.0);
}

TEST(Reduce, BlowupLimit) {
  EnsembleConfig cfg = small_run(100);
  std::vector<char> ok(100, 1);
  std::vector<double> v(100, 2.0);
  ok[5] = 0;
  v[5] = std::nan("");
  EXPECT_EQ(code_of([&] { reduce_paths(cfg, ok, v); }), Errc::BlowupLimitExceeded);
  cfg.max_blowup_fraction = 0.05;
  const Estimate e = reduce_paths(cfg, ok, v);
  EXPECT_EQ(e.n, 99);
  EXPECT_EQ(e.blowups, 1);
  EXPECT_EQ(e.mean, 2.0);
}

TEST(Reduce, ConfigValidation) {
  EnsembleConfig cfg;
  cfg.n_paths = 1;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), Errc::InvalidArgument);
  cfg = EnsembleConfig{};
  cfg.T = 0.0;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), Errc::ZeroHorizon);
}

}  // namespace
}  // namespace fdh
