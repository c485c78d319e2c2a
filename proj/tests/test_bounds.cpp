#include "fdh/bounds.hpp"
#include "fdh/error.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

namespace fdh {
namespace {

using testing::dirichlet_model;
using testing::two_point_model;

// lambda = 1, q = 1: hs_norm_sq = 1.
SpectralModel unit_model() {
  Matrix op(1, 1);
  op << -1.0;
  return SpectralModel::build(MeasureSpace::uniform(1), op, Vector::Ones(1));
}

CoefficientSet with_eta(CoefficientSet c, double eta) {
  c.eta = eta;
  return c;
}

TEST(Bounds, LambdaTHandValue) {
  const SpectralModel m = unit_model();
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 4.0, 1.0);
  EXPECT_NEAR(lambda_T(c, m, 1.0), 0.5 * std::exp(-3.0), 1e-15);
  EXPECT_NEAR(homogeneous_constants(c, m, 1.0).lambda_T, 0.5 * std::exp(-3.0), 1e-15);
}

TEST(Bounds, ThetaHandValues) {
  EXPECT_NEAR(theta_value(1.0, 0.5, 1.0, 1.0), 33.0, 1e-12);
  EXPECT_NEAR(theta_value(1.0, 0.5, 1.0, 2.0), 9.0, 1e-12);
  EXPECT_EQ(theta_value(1.0, 0.5, 0.0, 1.0), 1.0);
  const SpectralModel m = unit_model();
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 4.0, 1.0);
  EXPECT_NEAR(theta_t(c, m, 0.3), 33.0, 1e-12);
  EXPECT_NEAR(theta_integral(c, m, 2.0), 66.0, 1e-11);
}

TEST(Bounds, GHandValues) {
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 1.0, 4.0, 1.0);
  EXPECT_NEAR(g_integral(c, 1.0), 1.0 - std::exp(-1.0), 1e-14);
  EXPECT_NEAR(g_sq_integral(c, 1.0), 36.0 * (1.0 - std::exp(-2.0)) / 2.0, 1e-12);
  const CoefficientSet c16 = CoefficientSet::constant(0.5, 16.0, 0.0, 4.0, 1.0);
  EXPECT_NEAR(g_t(c16, 0.0), 2.0, 1e-15);
  EXPECT_NEAR(g_integral(c16, 3.0), 6.0, 1e-14);
}

TEST(Bounds, HarnackConstantAtCoincidingPoints) {
  const SpectralModel m = unit_model();
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 8.0 / 3.0, 1.0);
  const StateVector zero = StateVector::Zero(1);
  const BoundReport b = harnack_rhs(c, m, 1.0, 2.0, zero, zero);
  const double expected = 0.25 * (66.0 + 0.5 * std::exp(-3.0));
  EXPECT_NEAR(b.log_harnack_rhs, expected, 1e-12);
  EXPECT_NEAR(b.harnack_rhs, std::exp(expected), 1e-12 * std::exp(expected));
  EXPECT_EQ(b.term_quadratic, 0.0);
  EXPECT_EQ(b.term_sigma, 0.0);
}

TEST(Bounds, ExponentGrowsWithDistanceAndHorizonShrinksSigmaTerm) {
  const SpectralModel m = two_point_model();
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 8.0 / 3.0, 0.3);
  double prev = -std::numeric_limits<double>::infinity();
  for (double d : {0.0, 0.01, 0.1, 0.5, 1.0, 2.0}) {
    const BoundReport b = harnack_rhs_from_norms(c, m, 1.0, 2.0, 1.0, 1.0, d);
    EXPECT_GT(b.log_harnack_rhs, prev);
    prev = b.log_harnack_rhs;
  }
  const double s1 = harnack_rhs_from_norms(c, m, 0.5, 2.0, 1.0, 1.0, 0.5).term_sigma;
  const double s2 = harnack_rhs_from_norms(c, m, 0.25, 2.0, 1.0, 1.0, 0.5).term_sigma;
  EXPECT_GT(s2, s1);
}

TEST(Bounds, DivergesAsPApproachesOne) {
  const SpectralModel m = two_point_model();
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 8.0 / 3.0, 0.3);
  double prev = 0.0;
  for (double p : {1.5, 1.1, 1.01, 1.001}) {
    const double v = harnack_rhs_from_norms(c, m, 1.0, p, 1.0, 1.0, 0.5).log_harnack_rhs;
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_GT(prev, 1e3);
}

TEST(Bounds, ScheduleAndClosedFormAgree) {
  const SpectralModel m = dirichlet_model(4, 0.25);
  for (double gamma : {0.0, 0.7, -0.4}) {
    const CoefficientSet c = with_eta(CoefficientSet::constant(0.6, 1.3, gamma, 3.0, 0.2), 1.5);
    for (double T : {0.1, 1.0, 2.5}) {
      const HomogeneousConstants k = homogeneous_constants(c, m, T);
      EXPECT_NEAR(k.lambda_T, lambda_T(c, m, T), 1e-12 * k.lambda_T);
      EXPECT_NEAR(k.theta * T, theta_integral(c, m, T), 1e-12 * k.theta * T);
      EXPECT_NEAR(k.g_int, g_integral(c, T), 1e-12 * k.g_int);
      EXPECT_NEAR(k.g_sq_int, g_sq_integral(c, T), 1e-12 * k.g_sq_int);
    }
  }
}

TEST(Bounds, PiecewiseScheduleIntegrals) {
  CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 4.0, 1.0);
  c.delta = Schedule({0.5}, {1.0, 16.0});
  // g = 1 on [0, 0.5), 2 on [0.5, 1].
  EXPECT_NEAR(g_integral(c, 1.0), 1.5, 1e-14);
  EXPECT_NEAR(g_sq_integral(c, 1.0), 36.0 * 0.5 + 144.0 * 0.5, 1e-12);
  EXPECT_THROW(homogeneous_constants(c, unit_model(), 1.0), Error);
}

TEST(Bounds, DensityBoundSingleCoincidingSample) {
  const SpectralModel m = two_point_model();
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 8.0 / 3.0, 0.3);
  StateVector x(2);
  x << 0.3, -0.2;
  const std::vector<StateVector> mu{x};
  const HomogeneousConstants k = homogeneous_constants(c, m, 1.0);
  const double nx = m.norm_h(x);
  const double p = 2.0;
  const DensityBound d = density_lp_bound(c, m, 1.0, p, x, mu);
  EXPECT_NEAR(d.log_bound, (2.0 * k.theta + k.lambda_T + 2.0 * nx * nx) / (4.0 * p), 1e-12);
  EXPECT_EQ(d.samples, 1u);
}

TEST(Bounds, DensityBoundIsFiniteAndGrowsWithSpread) {
  const SpectralModel m = two_point_model();
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 8.0 / 3.0, 0.3);
  std::mt19937_64 gen(1);
  std::vector<StateVector> near, far;
  for (int i = 0; i < 100; ++i) {
    near.push_back(testing::random_state(gen, 2, 0.05));
    far.push_back(testing::random_state(gen, 2, 2.0));
  }
  const StateVector x = StateVector::Zero(2);
  const DensityBound a = density_lp_bound(c, m, 1.0, 2.0, x, near);
  const DensityBound b = density_lp_bound(c, m, 1.0, 2.0, x, far);
  EXPECT_TRUE(std::isfinite(a.bound));
  EXPECT_LT(a.log_bound, b.log_bound);
}

TEST(Bounds, Errors) {
  const SpectralModel m = two_point_model();
  const CoefficientSet c = CoefficientSet::constant(0.5, 1.0, 0.0, 8.0 / 3.0, 0.3);
  const StateVector x = StateVector::Zero(2);
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::IOError;
  };
  EXPECT_EQ(code_of([&] { harnack_rhs(c, m, 1.0, 1.0, x, x); }), Errc::InvalidP);
  EXPECT_EQ(code_of([&] { harnack_rhs(c, m, 0.0, 2.0, x, x); }), Errc::ZeroHorizon);
  EXPECT_EQ(code_of([&] { lambda_T(c, m, -1.0); }), Errc::ZeroHorizon);
  EXPECT_EQ(code_of([&] { density_lp_bound(c, m, 1.0, 2.0, x, {}); }), Errc::EmptySample);
  const std::vector<StateVector> mu{x};
  EXPECT_EQ(code_of([&] { density_lp_bound(c, m, 1.0, 0.5, x, mu); }), Errc::InvalidP);
}

}  // namespace
}  // namespace fdh
