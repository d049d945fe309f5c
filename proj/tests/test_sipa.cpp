#include <gtest/gtest.h>

#include "oracles.hpp"
#include "support.hpp"

using namespace crmimo;

namespace {

Scenario scalar_pair_with_pu() {
  Scenario s = fixtures::scalar_pair();
  s.pu_channels = {ComplexVector::Ones(1)};
  s.P_t = {2.0};
  s.l_ratio = {1.0};
  return s;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST(Sipa, ScalarPairMatchesConstrainedGrid) {
  const SolveReport r = sipa(scalar_pair_with_pu());
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.weighted_sum_rate, oracle::kScalarWithPuOptimum, 2e-3);
  EXPECT_LE(r.interference[0], 2.0 * (1.0 + 1e-4));
  // The power multiplier is pushed down to the clamp (or declared inactive).
  EXPECT_LE(r.aux.q_u, 1e-8);
}

TEST(Sipa, SumPowerOnlyMatchesGrid) {
  SipaOptions o;
  o.mode = ConstraintMode::SumPowerOnly;
  const SolveReport r = sipa(scalar_pair_with_pu(), o);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.weighted_sum_rate, oracle::kScalarSumPowerOptimum, 1e-3);
  EXPECT_TRUE(r.interference.empty());
}

TEST(Sipa, WithoutPrimaryUsersReducesToDipa) {
  const Scenario s = fixtures::random_scenario(6, 3, 4, 2, 0, 10.0);
  const SolveReport r = sipa(s);
  const DipaResult d = dipa(s, order_users(s.weights), {}, 1.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.weighted_sum_rate, d.objective, 1e-5 * d.objective);
  EXPECT_NEAR(r.sum_power, s.P_u, 1e-4 * s.P_u);
}

TEST(Sipa, DistantPrimaryUserBarelyMatters) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Scenario s = experiment::single_pu_scenario(seed, 10.0, 12.0);
    const SolveReport with = sipa(s, experiment::sweep_options());
    SipaOptions none = experiment::sweep_options();
    none.mode = ConstraintMode::SumPowerOnly;
    const SolveReport without = sipa(s, none);
    EXPECT_TRUE(with.converged && without.converged);
    EXPECT_LE(with.weighted_sum_rate, without.weighted_sum_rate * (1.0 + 1e-4));
    EXPECT_GE(with.weighted_sum_rate, without.weighted_sum_rate * (1.0 - 5e-3));
  }
}

TEST(Sipa, PerAntennaThresholdsHold) {
  const Scenario s = fixtures::random_scenario(4, 3, 4, 2, 0, 10.0);
  SipaOptions o;
  o.mode = ConstraintMode::PerAntenna;
  o.per_antenna_threshold = 1.0;
  const SolveReport r = sipa(s, o);
  EXPECT_TRUE(r.converged);
  const HermitianMatrix total = r.bc_cov.total();
  ASSERT_EQ(r.aux.q_t.size(), 4u);
  for (int a = 0; a < 4; ++a) {
    const double p = total(a, a).real();
    EXPECT_LE(p, 1.0 + 1e-4);
    EXPECT_NEAR(p, r.interference[std::size_t(a)], 1e-12);
    EXPECT_LE(r.aux.q_t[std::size_t(a)] * std::abs(p - 1.0), o.eps);
  }
  // Four antennas at one unit each cannot reach P_u = 10.
  EXPECT_TRUE(r.power_inactive);
}

TEST(Sipa, FixedLengthRunsAndBadOptions) {
  const Scenario s = experiment::example3_scenario(1);
  SipaOptions o;
  o.stop_at_convergence = false;
  o.max_outer = 7;
  const SolveReport r = sipa(s, o);
  EXPECT_EQ(r.iterations, 7);
  EXPECT_EQ(r.trace.size(), 7u);
  o.max_outer = 0;
  EXPECT_THROW(sipa(s, o), Error);
  o = {};
  o.step = 0.0;
  EXPECT_THROW(sipa(s, o), Error);
}

TEST(Sipa, TraceStartsAtInitialAuxiliaries) {
  const SolveReport r = sipa(experiment::example3_scenario(2));
  ASSERT_FALSE(r.trace.empty());
  EXPECT_EQ(r.trace.front().q_t, (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(r.trace.front().q_u, 1.0);
  EXPECT_EQ(int(r.trace.size()), r.iterations);
}

// The outer dual g(q) is 0-homogeneous. Rescaling each point by its own inner
// water level puts it on the slice where the inner multiplier is one, and there
// the constraint residual s(q) is a subgradient of the convex g.
TEST(OuterDual, SubgradientInequalityInNormalizedCoordinates) {
  const Scenario s = experiment::example3_scenario(3);
  const UserOrdering o = order_users(s.weights);
  DipaOptions tight;
  tight.eps_power_rel = 1e-10;
  tight.eps = 1e-12;
  tight.inner.grad_tol = 1e-13;
  tight.inner.max_iterations = 100000;
  const auto normalized = [&](AuxiliaryPoint q) {
    const double lambda = evaluate_outer_dual(s, o, q, tight).lambda;
    for (double& x : q.q_t) x *= lambda;
    q.q_u *= lambda;
    return q;
  };
  const auto as_vector = [](const AuxiliaryPoint& q) {
    std::vector<double> v = q.q_t;
    v.push_back(q.q_u);
    return v;
  };
  CounterRng rng(17);
  for (int pair = 0; pair < 10; ++pair) {
    AuxiliaryPoint x{{0.1 + rng.next_unit(), 0.1 + rng.next_unit()}, 0.1 + rng.next_unit()};
    AuxiliaryPoint y{{0.1 + rng.next_unit(), 0.1 + rng.next_unit()}, 0.1 + rng.next_unit()};
    x = normalized(x);
    y = normalized(y);
    const DualPoint gx = evaluate_outer_dual(s, o, x, tight);
    const DualPoint gy = evaluate_outer_dual(s, o, y, tight);
    EXPECT_NEAR(gx.lambda, 1.0, 1e-6);
    const auto xv = as_vector(x), yv = as_vector(y);
    std::vector<double> diff(xv.size());
    for (std::size_t i = 0; i < xv.size(); ++i) diff[i] = yv[i] - xv[i];
    EXPECT_GE(gy.value, gx.value + dot(gx.subgradient, diff) - 1e-6) << "pair " << pair;
    // Complementary slackness of the inner problem: q . s(q) = 0.
    EXPECT_NEAR(dot(gx.subgradient, xv), 0.0, 1e-6 * std::max(1.0, gx.value));
  }
}

TEST(Region, WeightGridShape) {
  EXPECT_EQ(weight_grid(2, 5).size(), 5u);
  EXPECT_EQ(weight_grid(3, 4).size(), 10u);
  for (const auto& w : weight_grid(3, 4)) EXPECT_NEAR(w[0] + w[1] + w[2], 1.0, 3e-6);
  EXPECT_THROW(weight_grid(0, 3), Error);
}

TEST(Region, PointsAreParetoSupporting) {
  const Scenario s = fixtures::random_scenario(9, 2, 2, 1, 1, 10.0);
  const auto grid = weight_grid(2, 7);
  const auto points = region_sweep(s, grid, experiment::sweep_options(), 2);
  for (const auto& p : points) {
    ASSERT_TRUE(p.failure.empty()) << p.failure;
    EXPECT_TRUE(p.converged);
  }
  // Each point maximizes its own weighted rate over the region, so it beats
  // every other boundary point under its weights.
  for (const auto& a : points)
    for (const auto& b : points) EXPECT_GE(dot(a.weights, a.rates), dot(a.weights, b.rates) - 2e-3);
  // Favouring a user never lowers its rate.
  EXPECT_GE(points.front().rates[0], points.back().rates[0]);
  EXPECT_LE(points.front().rates[1], points.back().rates[1]);
}
