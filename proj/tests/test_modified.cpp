#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "geodyn/error.hpp"
#include "geodyn/modified.hpp"

using namespace geodyn;

namespace {

PhaseState ecc06() { return {vec2(0.4, 0.0), vec2(0.0, 2.0)}; }
PhaseState wide() { return {vec2(-3.0, 0.0), vec2(0.0, 0.45)}; }

const std::vector<Method> kAllMethods{Method::SymEuler, Method::StormerVerlet, Method::Vi1,
                                      Method::Vi1Adjoint, Method::Vi2, Method::Vi2Flipped};

double eval_field(const LagrangianField& f, const PhaseState& s) {
  return f({s.x(0), s.x(1)}, {s.v(0), s.v(1)}).f;
}

}  // namespace

TEST(LinearSeries, LeadingTerms) {
  EXPECT_DOUBLE_EQ(linear_modified_series(1.0, 0.1, 1).value, 1.0);
  EXPECT_DOUBLE_EQ(linear_modified_series(2.5, 0.1, 1).value, 2.5);
  EXPECT_NEAR(linear_modified_series(1.0, 0.1, 2).value, 1.0 + 0.01 / 12.0, 1e-16);
}

TEST(LinearSeries, MatchesDispersion) {
  const double omega = linear_dispersion(1.0, 0.1);
  EXPECT_NEAR(omega, 20.0 * std::asin(0.05), 1e-15);
  EXPECT_NEAR(linear_modified_series(1.0, 0.1, 20).value, omega * omega, 1e-12);
  for (double lambda : {0.5, 3.0}) {
    const double w = linear_dispersion(lambda, 0.2);
    EXPECT_NEAR(linear_modified_series(lambda, 0.2, 30).value, w * w, 1e-12 * w * w);
  }
}

TEST(LinearSeries, ConsistentLimit) {
  EXPECT_NEAR(linear_dispersion(2.0, 1e-6), std::sqrt(2.0), 1e-12);
}

TEST(LinearSeries, StabilityBoundary) {
  EXPECT_THROW(linear_dispersion(1.0, 2.0), StabilityError);
  EXPECT_THROW(linear_dispersion(1.0, 2.1), StabilityError);
  EXPECT_THROW(measured_linear_frequency(1.0, 2.1), StabilityError);
}

TEST(LinearSeries, MeasuredFrequency) {
  const double omega = linear_dispersion(1.0, 0.1);
  EXPECT_NEAR(measured_linear_frequency(1.0, 0.1) / omega, 1.0, 1e-6);
}

TEST(ModifiedLagrangian, ZeroStepIsClassical) {
  const PhaseState s{vec2(0.7, -0.3), vec2(0.2, 1.1)};
  const double classical = 0.5 * s.v.squaredNorm() - potential(s.x);
  for (Method m : kAllMethods) EXPECT_NEAR(modified_lagrangian(m, s, 0.0), classical, 1e-15) << to_string(m);
}

TEST(ModifiedLagrangian, StormerVerletCoefficient) {
  const PhaseState s{vec2(1.0, 0.0), vec2(0.0, 1.0)};
  const double h = 0.1;
  const double base = modified_lagrangian(Method::StormerVerlet, s, 0.0);
  EXPECT_NEAR((modified_lagrangian(Method::StormerVerlet, s, h) - base) / (h * h), -1.0 / 24.0, 1e-14);
  EXPECT_NEAR(eval_field(perturbation_lagrangian(Method::StormerVerlet), s), -1.0, 1e-15);
  EXPECT_DOUBLE_EQ(perturbation_scale(Method::StormerVerlet, h), h * h / 24.0);
}

TEST(ModifiedLagrangian, FirstOrderTerms) {
  const PhaseState s{vec2(0.6, 0.8), vec2(-0.4, 0.9)};
  const Vec g = grad_potential(s.x);
  EXPECT_NEAR(eval_field(perturbation_lagrangian(Method::SymEuler), s), s.v.dot(g), 1e-15);
  // Equal split: only the first coordinate keeps a first-order term.
  EXPECT_NEAR(eval_field(perturbation_lagrangian(Method::Vi1, SplitPotential::kepler(0.5)), s), -s.v(0) * g(0),
              1e-15);
  EXPECT_NEAR(eval_field(perturbation_lagrangian(Method::Vi1Adjoint, SplitPotential::kepler(0.5)), s),
              s.v(0) * g(0), 1e-15);
  const double w = 0.3;
  EXPECT_NEAR(eval_field(perturbation_lagrangian(Method::Vi1, SplitPotential::kepler(w)), s),
              -(s.v(0) * g(0) + (1.0 - 2.0 * w) * s.v(1) * g(1)), 1e-15);
  EXPECT_NEAR(eval_field(perturbation_lagrangian(Method::Vi1, SplitPotential::kepler_single()), s),
              -s.v.dot(g), 1e-15);
  EXPECT_DOUBLE_EQ(perturbation_scale(Method::SymEuler, 0.2), 0.1);
  EXPECT_EQ(base_order(Method::Vi1), 1);
  EXPECT_EQ(base_order(Method::Vi2), 2);
}

TEST(ModifiedLagrangian, HyperDualMatchesDouble) {
  const Pair<double> x{0.6, 0.8}, v{-0.4, 0.9};
  const Pair<HyperDual> X{x[0], x[1]}, V{v[0], v[1]};
  for (Method m : kAllMethods) {
    const double a = modified_lagrangian_t<double>(m, x, v, 0.05, {0.3, 0.7});
    const double b = modified_lagrangian_t<HyperDual>(m, X, V, 0.05, {0.3, 0.7}).f;
    EXPECT_NEAR(a, b, 1e-15) << to_string(m);
  }
}

TEST(ModifiedFlow, ClassicalAccelerationAtZeroStep) {
  const PhaseState s{vec2(0.6, 0.8), vec2(-0.4, 0.9)};
  for (Method m : kAllMethods) {
    const Vec a = modified_acceleration(m, s, 0.0, SplitPotential::kepler());
    EXPECT_LT((a + grad_potential(s.x)).norm(), 1e-12) << to_string(m);
  }
}

TEST(ModifiedFlow, Vi1ShadowingIsSecondOrder) {
  const double T = 2.0 * std::numbers::pi;
  for (double w : {0.5, 0.3}) {
    const SplitPotential sp = SplitPotential::kepler(w);
    const double e1 = shadowing_error(Method::Vi1, ecc06(), T / 200, 200, sp);
    const double e2 = shadowing_error(Method::Vi1, ecc06(), T / 400, 400, sp);
    EXPECT_GE(e1 / e2, 3.4) << "w=" << w;
    EXPECT_LE(e1 / e2, 4.6) << "w=" << w;
  }
}

TEST(ModifiedFlow, StormerVerletShadowingIsFourthOrder) {
  const double T = 2.0 * std::numbers::pi;
  const double e1 = shadowing_error(Method::StormerVerlet, ecc06(), T / 200, 200);
  const double e2 = shadowing_error(Method::StormerVerlet, ecc06(), T / 400, 400);
  EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.3);
}

TEST(Drift, LeadingTermsVanishWhereExpected) {
  struct Row {
    Method m;
    bool ecc_zero;
    bool angle_zero;
    int ecc_order;
    int angle_order;
  };
  for (const Row& r : {Row{Method::SymEuler, true, true, 2, 2}, Row{Method::StormerVerlet, true, false, 4, 2},
                       Row{Method::Vi1, true, true, 2, 2}, Row{Method::Vi1Adjoint, true, true, 2, 2},
                       Row{Method::Vi2, true, false, 4, 2}, Row{Method::Vi2Flipped, true, false, 4, 2}}) {
    for (const PhaseState& seed : {wide(), ecc06()}) {
      const DriftPrediction p = predicted_drift(r.m, seed, 0.1);
      EXPECT_EQ(p.ecc_leading_zero, r.ecc_zero) << to_string(r.m);
      EXPECT_EQ(p.angle_leading_zero, r.angle_zero) << to_string(r.m);
      EXPECT_EQ(p.order_ecc, r.ecc_order) << to_string(r.m);
      EXPECT_EQ(p.order_angle, r.angle_order) << to_string(r.m);
    }
  }
}

TEST(Drift, PredictedAngleMatchesMeasured) {
  for (Method m : {Method::StormerVerlet, Method::Vi2, Method::Vi2Flipped}) {
    for (double h : {0.125, 0.0625}) {
      const double predicted = predicted_drift(m, wide(), h).d_angle;
      const double measured = one_period_drift(m, wide(), h).d_angle;
      EXPECT_NEAR(measured / predicted, 1.0, 0.02) << to_string(m) << " h=" << h;
    }
  }
}

TEST(Drift, ElementsOverloadAgreesWithSeed) {
  // Same orbit rotated: magnitudes agree, orientation-free.
  const DriftPrediction a = predicted_drift(Method::StormerVerlet, ecc06(), 0.05);
  const DriftPrediction b = predicted_drift(Method::StormerVerlet, orbit_elements(ecc06()), 0.05);
  EXPECT_NEAR(a.d_angle, b.d_angle, 1e-10 * std::abs(a.d_angle));
}

TEST(Drift, HalvingSequence) {
  const auto hs = halving_sequence(0.5, 6);
  ASSERT_EQ(hs.size(), 6u);
  EXPECT_EQ(hs.front(), 0.5);
  EXPECT_EQ(hs.back(), 0.015625);
}

TEST(Drift, LogSlopeExactOnPowerLaw) {
  const auto hs = halving_sequence(0.5, 5);
  std::vector<double> y;
  for (double h : hs) y.push_back(3.0 * std::pow(h, 2.5));
  EXPECT_NEAR(fit_log_slope(hs, y), 2.5, 1e-12);
  EXPECT_THROW(fit_log_slope({0.5}, {1.0}), InvalidArgumentError);
  EXPECT_THROW(fit_log_slope({0.5, 0.25}, {1.0, 0.0}), InvalidArgumentError);
}

TEST(Drift, MeasuredOrdersOnWideSeed) {
  const auto hs = halving_sequence(0.5, 6);
  struct Row {
    Method m;
    DriftMetric metric;
    double lo;
    double hi;
  };
  for (const Row& r : {Row{Method::SymEuler, DriftMetric::Ecc, 1.7, 2.3}, Row{Method::Vi1, DriftMetric::Ecc, 1.7, 2.3},
                       Row{Method::StormerVerlet, DriftMetric::Ecc, 3.6, 4.4}, Row{Method::Vi2, DriftMetric::Ecc, 3.5, 9.0},
                       Row{Method::SymEuler, DriftMetric::Angle, 1.7, 2.3},
                       Row{Method::StormerVerlet, DriftMetric::Angle, 1.7, 2.3},
                       Row{Method::Vi1, DriftMetric::Angle, 1.7, 2.3}, Row{Method::Vi2, DriftMetric::Angle, 1.7, 2.3}}) {
    const DriftEstimate est = measured_drift_order(r.m, r.metric, wide(), hs);
    EXPECT_GE(est.fitted_order, r.lo) << to_string(r.m) << ' ' << to_string(r.metric);
    EXPECT_LE(est.fitted_order, r.hi) << to_string(r.m) << ' ' << to_string(r.metric);
  }
}

TEST(Drift, WorkerCountDoesNotChangeResults) {
  const auto hs = halving_sequence(0.5, 4);
  const DriftEstimate a = measured_drift_order(Method::Vi2, DriftMetric::Angle, wide(), hs, SplitPotential::kepler(), 1);
  const DriftEstimate b = measured_drift_order(Method::Vi2, DriftMetric::Angle, wide(), hs, SplitPotential::kepler(), 3);
  EXPECT_EQ(a.drift, b.drift);
  EXPECT_EQ(a.fitted_order, b.fitted_order);
}

TEST(Precession, DirectionPerMethod) {
  const double se = precession_per_period(Method::SymEuler, ecc06(), 0.05);
  const double sv = precession_per_period(Method::StormerVerlet, ecc06(), 0.05);
  const double vi1 = precession_per_period(Method::Vi1, ecc06(), 0.05);
  const double vi2 = precession_per_period(Method::Vi2, ecc06(), 0.05);
  EXPECT_LT(se, 0.0);
  EXPECT_LT(sv, 0.0);
  EXPECT_GT(vi1, 0.0);
  EXPECT_GT(vi2, 0.0);
  EXPECT_LT(std::abs(vi2), std::min({std::abs(se), std::abs(sv), std::abs(vi1)}));
  EXPECT_NEAR(vi2, predicted_drift(Method::Vi2, ecc06(), 0.05).d_angle, 0.05 * std::abs(vi2));
  EXPECT_THROW(precession_per_period(Method::Vi2, {vec2(1.0, 0.0), vec2(0.0, 1.0)}, 0.05), CircularOrbitError);
}

TEST(Ids, MetricRoundTrip) {
  for (DriftMetric m : {DriftMetric::Ecc, DriftMetric::Angle}) EXPECT_EQ(parse_metric(to_string(m)), m);
  EXPECT_THROW(parse_metric("energy"), UnknownIdError);
}
