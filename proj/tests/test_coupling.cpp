#include "fdh/conditions.hpp"
#include "fdh/coupling.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace fdh {
namespace {

using testing::dirichlet_model;
using testing::random_state;
using testing::two_point_model;

SpectralModel one_point(double lambda) {
  Matrix op(1, 1);
  op << -lambda;
  return SpectralModel::build(MeasureSpace::uniform(1), op, Vector::Ones(1));
}

TEST(CouplingSchedule, EpsilonFromSigma) {
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 8.0 / 3.0, 1.0);
  const CouplingSchedule s(c, 0.1, 1.0);
  EXPECT_NEAR(s.epsilon(), 4.0 / 7.0, 1e-14);
  EXPECT_DOUBLE_EQ(s.epsilon() * (s.sigma() + 2.0), s.sigma());
}

TEST(CouplingSchedule, DegenerateWhenStartingTogether) {
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 8.0 / 3.0, 1.0);
  const CouplingSchedule s(c, 0.0, 1.0);
  EXPECT_EQ(s.c(), 0.0);
  EXPECT_EQ(s.beta(0.3), 0.0);
  EXPECT_FALSE(s.drift_enabled());
}

TEST(CouplingSchedule, NormalizingConstantHandValue) {
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 4.0, 1.0);
  const double d = 0.3;
  const CouplingSchedule s(c, d, 1.0);
  EXPECT_NEAR(s.epsilon(), 2.0 / 3.0, 1e-15);
  const double expected = std::pow(d, 2.0 / 3.0) / ((2.0 / 3.0) * std::pow(2.0 / 3.0, 0.25));
  EXPECT_NEAR(s.c(), expected, 1e-14 * expected);
}

TEST(CouplingSchedule, AttractionIntegralMeetsHypothesisWithEquality) {
  CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 3.0, 1.0);
  c.gamma = Schedule({0.4}, {0.7, -0.5});
  c.delta = Schedule({0.2, 0.9}, {1.0, 2.0, 0.5});
  c.xi = Schedule({0.6}, {0.3, 0.8});
  for (double d : {0.01, 0.1, 1.0}) {
    const CouplingSchedule s(c, d, 1.3);
    const double target = std::pow(d, s.epsilon()) / s.epsilon();
    EXPECT_NEAR(s.attraction_integral(), target, 1e-10 * target);
  }
}

TEST(CouplingDrift, OnePointHandValue) {
  const SpectralModel m = one_point(1.0);
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 4.0, 1.0);
  // With gamma = 0, beta is d^eps / (eps T); this T makes beta == 1 for d = 2.
  const double horizon = 1.5 * std::pow(2.0, 2.0 / 3.0);
  StateVector x(1), y(1);
  x << 2.0;
  y << 0.0;
  const CouplingSchedule s = make_schedule(m, c, x, y, horizon);
  EXPECT_NEAR(s.beta(0.0), 1.0, 1e-14);
  EXPECT_NEAR(coupling_drift(s, m, 0.0, x, y)[0], std::cbrt(2.0), 1e-14);
  EXPECT_EQ(coupling_drift(s, m, 0.0, x, y, true)[0], 0.0);
  EXPECT_EQ(coupling_drift(s, m, 0.0, x, x)[0], 0.0);
}

TEST(Zeta, TwoComputationsAgree) {
  const SpectralModel m = dirichlet_model(5, 0.4);
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.2, 8.0 / 3.0, 1.0);
  std::mt19937_64 gen(3);
  for (int k = 0; k < 100; ++k) {
    const StateVector x = random_state(gen, 5);
    const StateVector y = random_state(gen, 5);
    const CouplingSchedule s = make_schedule(m, c, x, y, 1.0);
    const double t = 0.01 * k;
    const SpectralCoeffs z = zeta(s, m, t, x, y);
    const double d = m.norm_h(x - y);
    const double q = m.norm_q(x - y);
    const double alt = s.beta(t) * s.beta(t) * q * q / std::pow(d, 2.0 * s.epsilon());
    EXPECT_NEAR(z.squaredNorm(), alt, 1e-12 * alt);
  }
}

TEST(Zeta, DoublingNoiseHalvesEveryComponent) {
  const SpectralModel m = dirichlet_model(4, 0.2);
  const SpectralModel m2 = m.with_noise(2.0 * m.q_diag());
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 8.0 / 3.0, 1.0);
  std::mt19937_64 gen(4);
  const StateVector x = random_state(gen, 4);
  const StateVector y = random_state(gen, 4);
  const CouplingSchedule s = make_schedule(m, c, x, y, 1.0);
  EXPECT_LT((zeta(s, m2, 0.2, x, y) - 0.5 * zeta(s, m, 0.2, x, y)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(zeta(s, m, 0.2, x, x), SpectralCoeffs::Zero(4));
}

TEST(FDiagnostic, HandValues) {
  const SpectralModel m = two_point_model();
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 4.0, 1.0);
  EXPECT_EQ(f_diagnostic(m, c, StateVector::Zero(2), StateVector::Zero(2)), 0.0);
  EXPECT_NEAR(f_diagnostic(m, c, StateVector::Ones(2), StateVector::Zero(2)), 1.0, 1e-15);
}

TEST(FDiagnostic, DominatedByMomentBound) {
  const SpectralModel m = dirichlet_model(6);
  std::mt19937_64 gen(5);
  for (double r : {0.35, 0.5, 0.9}) {
    const CoefficientSet c = CoefficientSet::constant(r, 1.0, 0.0, 4.0 / (1.0 + r), 1.0);
    for (int k = 0; k < 500; ++k) {
      const StateVector x = random_state(gen, 6, 4.0);
      const StateVector y = random_state(gen, 6, 0.1);
      double bound = 0.0;
      for (Eigen::Index i = 0; i < 6; ++i) {
        bound += m.weights()[i] *
                 (1.0 + std::max(std::pow(std::abs(x[i]), r + 1.0), std::pow(std::abs(y[i]), r + 1.0)));
      }
      EXPECT_LE(f_diagnostic(m, c, x, y), bound * (1.0 + 1e-12));
    }
  }
}

TEST(StepPair, IdenticalStartsStayIdentical) {
  const SpectralModel m = dirichlet_model(4, 0.25);
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 8.0 / 3.0, 1.0);
  const StateVector x = StateVector::Constant(4, 0.2);
  const CouplingSchedule s = make_schedule(m, c, x, x, 1.0);
  StepConfig cfg;
  cfg.rng_seed = 2;
  CoupledPathState st = CoupledPathState::start(x, x);
  for (int k = 0; k < 200; ++k) {
    st = step_pair(m, c, s, cfg, st);
    ASSERT_EQ(st.x, st.y);
  }
  EXPECT_EQ(st.log_stoch_int, 0.0);
  EXPECT_EQ(st.zeta_sq_int, 0.0);
  EXPECT_EQ(girsanov_weight(st), 1.0);
}

TEST(StepPair, XMatchesSinglePathSimulator) {
  const SpectralModel m = dirichlet_model(4, 0.25);
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 8.0 / 3.0, 1.0);
  const StateVector x = StateVector::Constant(4, 0.2);
  const StateVector y = x + 0.05 * m.eigenfunction(0);
  const CouplingSchedule s = make_schedule(m, c, x, y, 1.0);
  StepConfig cfg;
  cfg.rng_seed = 8;
  cfg.path_index = 3;
  CoupledPathState st = CoupledPathState::start(x, y);
  PathSimulator sim(m, c, cfg, x);
  for (int k = 0; k < 300; ++k) {
    st = step_pair(m, c, s, cfg, st);
    sim.advance();
  }
  EXPECT_EQ(st.x, sim.state());
}

TEST(StepPair, AccumulatorsMonotoneAndCouplingSticks) {
  const SpectralModel m = dirichlet_model(4, 0.25);
  const double xi = norm_domination_lower_bound(m, 8.0 / 3.0);
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 8.0 / 3.0, xi);
  const StateVector x = StateVector::Constant(4, 0.2);
  const StateVector y = x + 0.1 * m.eigenfunction(0) / m.norm_h(m.eigenfunction(0));
  const CouplingSchedule s = make_schedule(m, c, x, y, 1.0);
  StepConfig cfg;
  cfg.dt = 1e-4;
  cfg.rng_seed = 1;
  CoupledPathState st = CoupledPathState::start(x, y);
  double prev_zeta = 0.0;
  bool seen_coupled = false;
  for (int k = 0; k < 10000; ++k) {
    st = step_pair(m, c, s, cfg, st);
    ASSERT_GE(st.zeta_sq_int, prev_zeta);
    prev_zeta = st.zeta_sq_int;
    if (seen_coupled) {
      ASSERT_EQ(st.x, st.y);
    }
    seen_coupled = seen_coupled || st.coupled;
  }
  EXPECT_TRUE(st.coupled);
  EXPECT_GT(girsanov_weight(st), 0.0);
  EXPECT_LE(st.zeta_sq_int, holder_chain_bound(s, st.f_int) * (1.0 + 1e-6));
}

TEST(StepPair, ExponentialContractionWithoutDrift) {
  const SpectralModel m = dirichlet_model(4, 0.25);
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.8, 8.0 / 3.0, 1.0);
  const StateVector x = StateVector::Constant(4, 0.5);
  const StateVector y = x - 0.2 * m.eigenfunction(1);
  const CouplingSchedule s = make_schedule(m, c, x, y, 1.0).without_drift();
  const double d0 = m.norm_h(x - y);
  for (std::uint64_t path = 0; path < 5; ++path) {
    StepConfig cfg;
    cfg.dt = 1e-3;
    cfg.path_index = path;
    CoupledPathState st = CoupledPathState::start(x, y);
    for (int k = 0; k < 1000; ++k) {
      st = step_pair(m, c, s, cfg, st);
      const double d = m.norm_h(st.x - st.y);
      ASSERT_LE(d * d, std::exp(2.0 * 0.8 * st.t) * d0 * d0 * (1.0 + 1e-3));
    }
  }
}

}  // namespace
}  // namespace fdh
