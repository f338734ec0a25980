#include "obskit/trajectory.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

namespace obskit {
namespace {

TEST(PolynomialTrajectory, LinearMotion) {
  const PolynomialTrajectory traj(3.0, {{0, 0}, {1, 0}});
  EXPECT_EQ(traj.eval(5.0), Vec2(2, 0));
}

TEST(PolynomialTrajectory, ReferenceTimeReturnsFirstCoefficientExactly) {
  const PolynomialTrajectory traj(1.25, {{0.1, -7.3}, {3.3, 1e5}, {-2.0, 0.125}, {9.0, 4.0}});
  EXPECT_EQ(traj.eval(1.25), Vec2(0.1, -7.3));
}

TEST(PolynomialTrajectory, FirstDerivative) {
  // d/dt [(0,1) + (2,0) t + (0,3) t^2] = (2,0) + 2 (0,3) t, at t = 1 gives (2, 6).
  const PolynomialTrajectory traj(0.0, {{0, 1}, {2, 0}, {0, 3}});
  EXPECT_EQ(traj.eval(1.0, 1), Vec2(2, 6));
}

TEST(PolynomialTrajectory, DerivativeBeyondOrderIsZero) {
  const PolynomialTrajectory traj(0.0, {{1, 1}, {2, 3}});
  EXPECT_EQ(traj.eval(4.0, 2), Vec2::Zero());
  EXPECT_THROW(traj.eval(0.0, -1), std::invalid_argument);
}

TEST(PolynomialTrajectory, StateVectorRoundTrip) {
  const PolynomialTrajectory traj(2.0, {{1, 2}, {3, 4}, {5, 6}, {7, 8}});
  const Eigen::VectorXd state = traj.state_vector();
  // Raw derivatives: k! a_k.
  EXPECT_DOUBLE_EQ(state(4), 10.0);
  EXPECT_DOUBLE_EQ(state(7), 48.0);
  const PolynomialTrajectory back = PolynomialTrajectory::from_state(2.0, state);
  for (double t : {2.0, 3.5, -1.0}) EXPECT_LT((back.eval(t) - traj.eval(t)).norm(), 1e-12);
}

TEST(PolynomialTrajectory, DerivativeMatchesCentralDifferences) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int p = trial % 6;
    std::vector<Vec2> coeffs;
    for (int k = 0; k <= p; ++k) coeffs.emplace_back(u(rng), u(rng));
    const PolynomialTrajectory traj(0.0, coeffs);
    const double timescale = 1.0;
    const double h = 1e-4 * timescale;
    const double t = u(rng) / 5.0;
    const Vec2 fd = (traj.eval(t + h) - traj.eval(t - h)) / (2 * h);
    const Vec2 exact = traj.eval(t, 1);
    EXPECT_LE((fd - exact).norm(), 1e-6 * std::max(1.0, exact.norm())) << "p=" << p;
  }
}

TEST(RelativeState, StaticTarget) {
  const auto rel = relative_state(PolynomialTrajectory::stationary(0, {3, 4}),
                                  PolynomialTrajectory::stationary(0, {0, 0}), 2.0);
  EXPECT_DOUBLE_EQ(rel.range, 5.0);
  EXPECT_DOUBLE_EQ(rel.range_rate, 0.0);
}

TEST(RelativeState, IdenticalTrajectoriesHaveZeroRange) {
  const PolynomialTrajectory traj(0.0, {{100, 200}, {3, -1}});
  EXPECT_THROW(relative_state(traj, traj, 1.0), ZeroRange);
}

TEST(RelativeState, ClosingTarget) {
  // s(t) = (10 - t, 0): range 10 - t, range rate -1.
  const auto rel = relative_state(PolynomialTrajectory(0.0, {{10, 0}, {-1, 0}}),
                                  PolynomialTrajectory::stationary(0.0, {0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(rel.range, 10.0);
  EXPECT_DOUBLE_EQ(rel.range_rate, -1.0);
}

TEST(RelativeState, RangeRateBoundedBySpeed) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int n = 0; n < 100; ++n) {
    const auto rel = make_relative_state({u(rng), u(rng)}, {u(rng), u(rng)}, 0.0);
    EXPECT_LE(std::abs(rel.range_rate), rel.velocity.norm() * (1 + 1e-15));
  }
}

TEST(SampledTrajectory, RejectsBadInput) {
  EXPECT_THROW(SampledTrajectory({0.0}, {Vec2::Zero()}), std::invalid_argument);
  EXPECT_THROW(SampledTrajectory({0.0, 1.0}, {Vec2::Zero()}), std::invalid_argument);
  EXPECT_THROW(SampledTrajectory({0.0, 0.0}, {Vec2::Zero(), Vec2::Zero()}), std::invalid_argument);
}

TEST(Differentiate, ExactForQuadraticsOnNonUniformGrid) {
  const std::vector<double> t{0.0, 0.3, 0.35, 1.0, 1.7, 2.0};
  std::vector<double> f;
  for (double x : t) f.push_back(2.0 - 3.0 * x + 0.5 * x * x);
  const std::vector<double> d = differentiate<double>(t, f);
  for (std::size_t k = 0; k < t.size(); ++k) EXPECT_NEAR(d[k], -3.0 + t[k], 1e-12);
}

TEST(TransitionMatrix, OrderZeroIsIdentity) {
  EXPECT_EQ(transition_matrix(0, 17.0, 2.0), Eigen::Matrix2d::Identity());
}

TEST(TransitionMatrix, IdentityAtReferenceTime) {
  for (int p = 0; p <= 5; ++p) {
    const Eigen::MatrixXd phi = transition_matrix(p, 4.5, 4.5);
    EXPECT_EQ(phi, Eigen::MatrixXd::Identity(2 * (p + 1), 2 * (p + 1))) << "p=" << p;
  }
}

TEST(TransitionMatrix, TopBlockRowCarriesFactorials) {
  // x(t) = x0 + x0' dt + x0'' dt^2 / 2 with dt = 2: factors 1, 2, 2.
  const Eigen::MatrixXd phi = transition_matrix(2, 3.0, 1.0);
  EXPECT_DOUBLE_EQ(phi(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(phi(0, 2), 2.0);
  EXPECT_DOUBLE_EQ(phi(0, 4), 2.0);
  EXPECT_DOUBLE_EQ(phi(1, 5), 2.0);
  EXPECT_DOUBLE_EQ(phi(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(phi(2, 4), 2.0);
  EXPECT_DOUBLE_EQ(phi(4, 0), 0.0);
}

TEST(TransitionMatrix, ReproducesPolynomialEvaluation) {
  const PolynomialTrajectory traj(0.5, {{1, -2}, {0.3, 0.7}, {-0.1, 0.02}, {0.004, -0.003}});
  const Eigen::VectorXd x = transition_matrix(3, 2.75, 0.5) * traj.state_vector();
  EXPECT_LT((x.head<2>() - traj.eval(2.75)).norm(), 1e-13);
  EXPECT_LT((x.segment<2>(2) - traj.eval(2.75, 1)).norm(), 1e-13);
  EXPECT_LT((x.segment<2>(4) - traj.eval(2.75, 2)).norm(), 1e-13);
}

TEST(TransitionMatrix, SemigroupProperty) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int p = 0; p <= 5; ++p) {
    for (int n = 0; n < 20; ++n) {
      double t0 = u(rng);
      double t1 = u(rng);
      double t2 = u(rng);
      if (t0 > t1) std::swap(t0, t1);
      if (t1 > t2) std::swap(t1, t2);
      if (t0 > t1) std::swap(t0, t1);
      const Eigen::MatrixXd lhs = transition_matrix(p, t2, t0);
      const Eigen::MatrixXd rhs = transition_matrix(p, t2, t1) * transition_matrix(p, t1, t0);
      EXPECT_LT((lhs - rhs).lpNorm<Eigen::Infinity>(), 1e-12);
    }
  }
}

TEST(BlockTransition, SingleOrderZeroAtReference) {
  const std::vector<int> orders{0};
  EXPECT_EQ(assemble_block_transition(orders, 1.0, 1.0), Eigen::Matrix2d::Identity());
}

TEST(BlockTransition, TwoIdenticalBlocks) {
  const std::vector<int> orders{1, 1};
  const Eigen::MatrixXd phi = assemble_block_transition(orders, 2.0, 0.5);
  ASSERT_EQ(phi.rows(), 8);
  EXPECT_EQ(phi.topLeftCorner(4, 4), phi.bottomRightCorner(4, 4));
  EXPECT_TRUE(phi.topRightCorner(4, 4).isZero());
  EXPECT_TRUE(phi.bottomLeftCorner(4, 4).isZero());
}

TEST(BlockTransition, MixedOrdersMatchPerBlockAssembly) {
  const std::vector<int> orders{1, 2};
  const Eigen::MatrixXd phi = assemble_block_transition(orders, 1.0, 0.0);
  ASSERT_EQ(phi.rows(), 10);
  EXPECT_EQ(phi.block(0, 0, 4, 4), transition_matrix(1, 1.0, 0.0));
  EXPECT_EQ(phi.block(4, 4, 6, 6), transition_matrix(2, 1.0, 0.0));
  EXPECT_TRUE(phi.block(0, 4, 4, 6).isZero());
  EXPECT_TRUE(phi.block(4, 0, 6, 4).isZero());
  const std::vector<int> none;
  EXPECT_THROW(assemble_block_transition(none, 1.0, 0.0), std::invalid_argument);
}

TEST(PropagateOde, ZeroStaysZero) {
  EXPECT_TRUE(propagate_ode(Eigen::VectorXd::Zero(6), 0.0, 3.0, 10).isZero());
}

TEST(PropagateOde, ConstantVelocityIsExact) {
  Eigen::VectorXd x(4);
  x << 1.0, -2.0, 0.5, 0.25;
  const Eigen::VectorXd out = propagate_ode(x, 0.0, 4.0, 1);
  EXPECT_NEAR(out(0), 3.0, 1e-14);
  EXPECT_NEAR(out(1), -1.0, 1e-14);
  EXPECT_NEAR(out(2), 0.5, 1e-14);
}

TEST(PropagateOde, MatchesClosedFormTransition) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int p = 0; p <= 5; ++p) {
    for (int n = 0; n < 10; ++n) {
      Eigen::VectorXd x(2 * (p + 1));
      for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = u(rng);
      const Eigen::VectorXd closed = transition_matrix(p, 5.0, 0.0) * x;
      const Eigen::VectorXd numeric = propagate_ode(x, 0.0, 5.0, 500);
      EXPECT_LT((closed - numeric).norm() / x.norm(), 1e-8) << "p=" << p;
    }
  }
}

}  // namespace
}  // namespace obskit
