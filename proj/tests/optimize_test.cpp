#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "stackelberg/errors.hpp"
#include "stackelberg/games.hpp"
#include "stackelberg/optimize.hpp"

namespace stackelberg {
namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

LogisticGame costly_game(double lambda) {
  PopulationSpec spec;
  spec.alpha = v2(1.5, 1.5);
  spec.n = 20;
  return LogisticGame(generate_population(spec), AgentVariant::kCostly, lambda);
}

LogisticGame constrained_game(double budget) {
  PopulationSpec spec;
  spec.alpha = v2(1.5, 1.5);
  spec.n = 20;
  return LogisticGame(generate_population(spec), AgentVariant::kConstrained, budget);
}

// eta_1 = eta0 and delta_1 = delta0.
StepSchedule fixed_first_step(double eta0, double delta0) {
  StepSchedule s;
  s.eta0 = eta0;
  s.delta0 = delta0;
  return s;
}

TEST(ProjectBall, Examples) {
  EXPECT_EQ(project_ball(v2(3, 4), BallSet{10, 2}), v2(3, 4));
  const Vec p = project_ball(v2(3, 4), BallSet{1, 2});
  EXPECT_NEAR(p[0], 0.6, 1e-15);
  EXPECT_NEAR(p[1], 0.8, 1e-15);
  EXPECT_EQ(project_ball(v2(0, 0), BallSet{0, 2}), v2(0, 0));
  // boundary points are returned unchanged
  EXPECT_EQ(project_ball(v2(3, 4), BallSet{5, 2}), v2(3, 4));
  EXPECT_THROW(project_ball(v2(1, 1), BallSet{1, 3}), DimensionError);
}

TEST(ProjectBall, IdempotentAndNonExpansive) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  const BallSet set{1.5, 3};
  for (int k = 0; k < 1000; ++k) {
    Vec a(3), b(3);
    for (int i = 0; i < 3; ++i) {
      a[i] = 2 * n01(rng);
      b[i] = 2 * n01(rng);
    }
    const Vec pa = project_ball(a, set), pb = project_ball(b, set);
    EXPECT_TRUE(set.contains(pa));
    EXPECT_LE((project_ball(pa, set) - pa).norm(), 1e-12);
    EXPECT_LE((pa - pb).norm(), (a - b).norm() + 1e-12);
  }
}

TEST(SampleSphere, OneDimensionIsFairSign) {
  Rng rng = make_rng(1, Stream::kSphere);
  const int n = 100000;
  int plus = 0;
  for (int k = 0; k < n; ++k) {
    const Vec u = sample_sphere(1, rng);
    ASSERT_EQ(std::abs(u[0]), 1.0);
    plus += u[0] > 0;
  }
  EXPECT_NEAR(plus / double(n), 0.5, 3 * std::sqrt(0.25 / n));
}

TEST(SampleSphere, UnitNormAndCentred) {
  Rng rng = make_rng(2, Stream::kSphere);
  for (int k = 0; k < 1000; ++k) EXPECT_NEAR(sample_sphere(3, rng).norm(), 1.0, 1e-12);
  const int n = 100000;
  Vec mean = Vec::Zero(2);
  for (int k = 0; k < n; ++k) mean += sample_sphere(2, rng);
  mean /= n;
  // each coordinate has variance 1/2 on S^1
  EXPECT_LE(std::abs(mean[0]), 3 * std::sqrt(1.0 / (2.0 * n)));
  EXPECT_LE(std::abs(mean[1]), 3 * std::sqrt(1.0 / (2.0 * n)));
  EXPECT_THROW(sample_sphere(0, rng), DimensionError);
}

TEST(SampleSphere, DeterministicGivenState) {
  Rng a = make_rng(5, Stream::kSphere), b = make_rng(5, Stream::kSphere);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(sample_sphere(4, a), sample_sphere(4, b));
}

TEST(StepSchedule, Values) {
  StepSchedule s;
  s.eta0 = 0.5;
  s.delta0 = 2.0;
  EXPECT_DOUBLE_EQ(s.eta(1, 4), 0.5);
  EXPECT_DOUBLE_EQ(s.eta(16, 4), 0.5 / 8);
  EXPECT_DOUBLE_EQ(s.delta(16, 4), 1.0);
  s.dim_scaling = true;
  EXPECT_DOUBLE_EQ(s.eta(16, 4), 0.5 / 16);
  EXPECT_DOUBLE_EQ(s.delta(16, 4), 2.0);
  s.constant_delta_horizon = 81;
  EXPECT_DOUBLE_EQ(s.delta(1, 4), 4.0 / 3);
  EXPECT_DOUBLE_EQ(s.delta(5000, 4), 4.0 / 3);
}

TEST(StepSchedule, EtaNonIncreasing) {
  StepSchedule s;
  for (long t = 1; t < 1000; ++t) EXPECT_LE(s.eta(t + 1, 3), s.eta(t, 3));
}

TEST(StepSchedule, Validation) {
  StepSchedule s;
  s.delta0 = 0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  s.eta0 = -1;
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  s.exponent_eta = -0.5;
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  s.constant_delta_horizon = 0;
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(ZeroOrderStep, ZeroLossKeepsCenter) {
  Rng rng = make_rng(0, Stream::kSphere);
  const BallSet set{10, 2};
  const ZeroOrderState s = make_zero_order_state(v2(0.3, -0.2), set, rng);
  const ZeroOrderState next = zero_order_step(s, 0.0, fixed_first_step(0.1, 1.0), set, rng);
  EXPECT_EQ(next.phi, s.phi);
  EXPECT_EQ(next.t, 2);
  EXPECT_NEAR(next.last_u.norm(), 1.0, 1e-12);
}

TEST(ZeroOrderStep, Arithmetic) {
  Rng rng = make_rng(0, Stream::kSphere);
  ZeroOrderState s;
  s.phi = v2(0, 0);
  s.last_u = v2(0, 1);
  const ZeroOrderState next = zero_order_step(s, 1.0, fixed_first_step(0.1, 1.0), BallSet{10, 2}, rng);
  EXPECT_NEAR(next.phi[0], 0.0, 1e-15);
  EXPECT_NEAR(next.phi[1], -0.2, 1e-15);
}

TEST(ZeroOrderStep, DeployedPointIsNotProjected) {
  ZeroOrderState s;
  s.phi = v2(1, 0);
  s.last_u = v2(1, 0);
  const Vec deployed = deployed_point(s, fixed_first_step(0.1, 0.5));
  EXPECT_DOUBLE_EQ(deployed[0], 1.5);
  EXPECT_FALSE(BallSet({1, 2}).contains(deployed));
}

TEST(ZeroOrderStep, CenterStaysFeasible) {
  Rng rng = make_rng(4, Stream::kSphere);
  const BallSet set{1, 2};
  ZeroOrderState s = make_zero_order_state(v2(5, 5), set, rng);
  EXPECT_TRUE(set.contains(s.phi));
  for (int k = 0; k < 1000; ++k) {
    s = zero_order_step(s, 50.0, fixed_first_step(1.0, 0.1), set, rng);
    EXPECT_TRUE(set.contains(s.phi));
  }
}

TEST(ZeroOrderStep, ZeroRadiusThrows) {
  Rng rng = make_rng(0, Stream::kSphere);
  ZeroOrderState s;
  s.phi = v2(0, 0);
  s.last_u = v2(1, 0);
  EXPECT_THROW(zero_order_step(s, 1.0, fixed_first_step(0.1, 0.0), BallSet{1, 2}, rng), ConfigError);
}

// Monte Carlo check of E[(d/delta) f(x + delta u) u] = grad of the smoothed f for
// f = ||.||^2, where the smoothed gradient is exactly 2x. Antithetic pairs keep the
// estimator variance independent of delta.
TEST(ZeroOrderStep, SmoothedGradientIdentity) {
  Rng rng = make_rng(8, Stream::kDiagnostics);
  const Vec x = v2(1, 0);
  const double delta = 0.01;
  const int d = 2;
  auto f = [](const Vec& v) { return v.squaredNorm(); };
  Vec mean = Vec::Zero(2);
  const int n = 1000000;
  for (int k = 0; k < n; ++k) {
    const Vec u = sample_sphere(d, rng);
    mean += (d / (2 * delta)) * (f(x + delta * u) - f(x - delta * u)) * u;
  }
  mean /= n;
  EXPECT_LE((mean - v2(2, 0)).norm(), 0.02 * 2);
}

// Decreasing-step zeroth-order descent on a quadratic.
TEST(ZeroOrderStep, QuadraticSmoke) {
  const Vec c = v2(1, -0.5);
  auto f = [&](const Vec& v) { return (v - c).squaredNorm(); };
  const BallSet set{10, 2};
  const long T = 20000;
  StepSchedule s;
  s.eta0 = 0.05;
  s.delta0 = 0.5;
  s.dim_scaling = true;
  s.constant_delta_horizon = T;
  Rng rng = make_rng(1, Stream::kSphere);
  ZeroOrderState state = make_zero_order_state(v2(0, 0), set, rng);
  const double initial = f(state.phi);
  double tail = 0.0;
  for (long t = 1; t <= T; ++t) {
    const double loss = f(deployed_point(state, s));
    state = zero_order_step(state, loss, s, set, rng);
    if (t > T - T / 10) tail += f(state.phi) / (T / 10);
  }
  EXPECT_LT(tail, 0.05 * initial);
}

TEST(AgentStep, Examples) {
  const auto g = constrained_game(2.0);
  const Vec a = agent_gd_step(g, v2(0, 0), v2(1, 0), 0.1, g.action_set());
  EXPECT_NEAR((a - v2(0.1, 0)).norm(), 0.0, 1e-15);
  const Vec b = agent_gd_step(g, v2(2, 0), v2(1, 0), 1.0, g.action_set());
  EXPECT_NEAR((b - v2(2, 0)).norm(), 0.0, 1e-15);
  // without the constraint the step leaves the ball
  EXPECT_NEAR(agent_gd_step(g, v2(2, 0), v2(1, 0), 1.0, std::nullopt)[0], 3.0, 1e-15);
}

TEST(AgentStep, CostlyFixedPoint) {
  const auto g = costly_game(1.0);
  const Vec theta = v2(1, 1);
  Vec mu = v2(0, 0);
  for (int k = 0; k < 1000; ++k) {
    const Vec next = agent_gd_step(g, mu, theta, 0.5, g.action_set());
    const double step = (next - mu).norm();
    mu = next;
    if (step < 1e-10) break;
  }
  EXPECT_NEAR((mu - theta).norm(), 0.0, 1e-9);
}

TEST(AgentStep, CostlyContractionIsExact) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n01;
  for (double lambda : {0.5, 1.0, 4.0}) {
    const auto g = costly_game(lambda);
    const double eta = 0.7 / lambda;
    for (int k = 0; k < 50; ++k) {
      const Vec theta = v2(n01(rng), n01(rng)), mu = v2(n01(rng), n01(rng));
      const Vec target = theta / lambda;
      const Vec next = agent_gd_step(g, mu, theta, eta, std::nullopt);
      EXPECT_NEAR((next - target).norm(), (1 - eta * lambda) * (mu - target).norm(), 1e-12);
    }
  }
}

TEST(DmStep, Examples) {
  const LinearRegressionGame g(v2(1, 0), 0.0, 2.0);
  EXPECT_EQ(dm_gd_step(g, v2(0, 0), v2(1, 0), 0.5, g.theta_set()), v2(1, 0));
  EXPECT_NEAR((dm_gd_step(g, v2(0, 0), v2(0, 0), 0.5, g.theta_set()) - v2(0.5, 0)).norm(), 0, 1e-15);
  const DescentResult r = descend_L_theta(g, v2(1, 0), v2(0, 0), 0.5, 1e-12, 10000);
  EXPECT_NEAR((r.point - v2(0.5, 0)).norm(), 0.0, 1e-11);
  EXPECT_LE(r.residual, 1e-12);
}

TEST(DmStep, LinearConvergence) {
  const LinearRegressionGame g(v2(1, -2), 0.0, 2.0);
  const Vec mu = v2(0.5, 1.0);
  const Vec target = descend_L_theta(g, mu, v2(0, 0), 0.3, 1e-14, 100000).point;
  Vec theta = v2(3, 3);
  double prev = (theta - target).norm();
  // Hessian I + mu mu^T has eigenvalues in [1, 2.25]; step 0.3 contracts by at most 0.7.
  for (int k = 0; k < 30; ++k) {
    theta = dm_gd_step(g, mu, theta, 0.3, g.theta_set());
    const double err = (theta - target).norm();
    EXPECT_LE(err, 0.7 * prev + 1e-13);
    prev = err;
  }
}

TEST(Descent, StopsAtCapWithResidual) {
  const LinearRegressionGame g(v2(1, 0), 0.0, 2.0);
  const DescentResult r = descend_L_theta(g, v2(0, 0), v2(0, 0), 0.01, 1e-12, 5);
  EXPECT_EQ(r.steps, 5);
  EXPECT_GT(r.residual, 1e-12);
  EXPECT_THROW(descend_L_theta(g, v2(0, 0), v2(0, 0), 0.0, 1e-8, 5), ConfigError);
  EXPECT_THROW(descend_R_mu(g, v2(0, 0), v2(0, 0), -1.0, 1e-8, 5), ConfigError);
}

TEST(Descent, AgentsReachConstrainedBestResponse) {
  const auto g = constrained_game(2.0);
  const DescentResult r = descend_R_mu(g, v2(3, 4), v2(0, 0), 0.1, 1e-10, 10000);
  EXPECT_NEAR((r.point - v2(1.2, 1.6)).norm(), 0.0, 1e-9);
}

}  // namespace
}  // namespace stackelberg
