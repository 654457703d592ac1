#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "neurotrig/errors.hpp"
#include "neurotrig/topology.hpp"
#include "oracles.hpp"

using namespace neurotrig;

namespace {

DirectedTopology make(Eigen::MatrixXd a, Eigen::VectorXd mu) { return {std::move(a), std::move(mu)}; }

DirectedTopology bidirectional_pair(double mu1 = 1.0) {
  Eigen::MatrixXd a(2, 2);
  a << 0, 1, 1, 0;
  return make(a, Eigen::Vector2d(mu1, 0.0));
}

}  // namespace

TEST(Topology, RingPassesValidation) {
  const auto ring = DirectedTopology::ring(4);
  EXPECT_TRUE(validate(ring).ok()) << validate(ring).to_string();
  EXPECT_EQ(ring.adjacency(1, 0), 1.0);
  EXPECT_EQ(ring.adjacency(0, 3), 1.0);
  EXPECT_EQ(ring.leader_gains(0), 1.0);
  EXPECT_EQ(ring.neighbors(0), std::vector<std::size_t>{3});
}

TEST(Topology, OneWayPairIsNotBalanced) {
  Eigen::MatrixXd a(2, 2);
  a << 0, 1, 0, 0;
  const auto report = validate(make(a, Eigen::Vector2d(1, 0)));
  EXPECT_TRUE(report.has(TopologyViolation::kNotBalanced));
  EXPECT_NE(report.to_string().find("Assumption 1"), std::string::npos);
}

TEST(Topology, NoLeaderAccessNamesAssumption) {
  auto ring = DirectedTopology::ring(4);
  ring.leader_gains.setZero();
  const auto report = validate(ring);
  EXPECT_TRUE(report.has(TopologyViolation::kNoLeaderAccess));
  EXPECT_NE(report.to_string().find("Assumption 2"), std::string::npos);
  EXPECT_THROW(q_matrix(ring), ValidationError);
}

TEST(Topology, SelfLoopAndDisconnectionReported) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
  a(0, 1) = a(1, 0) = 1;
  a(2, 3) = a(3, 2) = 1;
  auto t = make(a, Eigen::Vector4d(1, 0, 1, 0));
  EXPECT_TRUE(validate(t).has(TopologyViolation::kNotWeaklyConnected));
  t.adjacency(2, 2) = 1.0;
  EXPECT_TRUE(validate(t).has(TopologyViolation::kSelfLoop));
}

TEST(Topology, MalformedInputRejected) {
  EXPECT_THROW(validate(make(Eigen::MatrixXd::Zero(2, 3), Eigen::Vector2d(1, 0))), MalformedInputError);
  Eigen::MatrixXd neg(2, 2);
  neg << 0, -1, 1, 0;
  EXPECT_THROW(validate(make(neg, Eigen::Vector2d(1, 0))), MalformedInputError);
  EXPECT_THROW(validate(make(Eigen::MatrixXd::Zero(2, 2), Eigen::Vector3d(1, 0, 0))), MalformedInputError);
}

TEST(Topology, LaplacianExamples) {
  Eigen::Matrix2d expected;
  expected << 1, -1, -1, 1;
  EXPECT_EQ(laplacian(bidirectional_pair()), Eigen::MatrixXd(expected));

  EXPECT_EQ(laplacian(make(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1))),
            Eigen::MatrixXd::Zero(1, 1));

  Eigen::Matrix4d ring;
  ring << 1, 0, 0, -1,
         -1, 1, 0, 0,
          0, -1, 1, 0,
          0, 0, -1, 1;
  EXPECT_EQ(laplacian(DirectedTopology::ring(4)), Eigen::MatrixXd(ring));
}

TEST(Topology, QMatrixExamples) {
  const auto single = make(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1));
  EXPECT_EQ(q_matrix(single)(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(min_eigenvalue(q_matrix(single)), 2.0);

  Eigen::Matrix2d expected;
  expected << 4, -2, -2, 2;
  EXPECT_EQ(q_matrix(bidirectional_pair()), Eigen::MatrixXd(expected));
}

TEST(Topology, RingQMatrixMatchesJacobiOracle) {
  const Eigen::MatrixXd q = q_matrix(DirectedTopology::ring(4));
  const auto ev = oracle::jacobi_eigenvalues(q);
  // Frozen oracle value for the pinned 4-ring.
  EXPECT_NEAR(ev.front(), 0.2907246405630781, 1e-12);
  EXPECT_NEAR(min_eigenvalue(q), ev.front(), 1e-12);
  EXPECT_GT(min_eigenvalue(q), 0.0);
}

TEST(Topology, MinEigenvalueExamples) {
  EXPECT_DOUBLE_EQ(min_eigenvalue(Eigen::MatrixXd::Constant(1, 1, 2.0)), 2.0);
  Eigen::Matrix2d m;
  m << 4, -2, -2, 2;
  EXPECT_NEAR(min_eigenvalue(m), 3.0 - std::sqrt(5.0), 1e-14);
  EXPECT_NEAR(min_eigenvalue(Eigen::MatrixXd::Identity(4, 4)), 1.0, 1e-15);
  m(0, 1) = -1.0;
  EXPECT_THROW(min_eigenvalue(m), MalformedInputError);
}

TEST(Topology, RandomBalancedGraphsHavePositiveDefiniteQ) {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = oracle::random_balanced_digraph(rng);
    ASSERT_TRUE(validate(t).ok()) << validate(t).to_string();
    const Eigen::MatrixXd l = laplacian(t);
    EXPECT_LT(l.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
    const Eigen::MatrixXd q = q_matrix(t);
    EXPECT_TRUE(q == q.transpose());
    const double lambda = min_eigenvalue(q);
    EXPECT_GT(lambda, 1e-10);
    EXPECT_NEAR(lambda, oracle::jacobi_eigenvalues(q).front(), 1e-9 * (1.0 + q.norm()));
  }
}
