#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace neurotrig {

/// Weighted communication digraph among followers plus leader pinning gains.
///
/// adjacency(i, j) > 0 means agent i receives from agent j. leader_gains(i) > 0
/// means agent i observes the reference directly.
struct DirectedTopology {
  Eigen::MatrixXd adjacency;
  Eigen::VectorXd leader_gains;

  std::size_t size() const { return static_cast<std::size_t>(adjacency.rows()); }

  /// Weighted in-degree d_i (sum of row i).
  double in_degree(std::size_t i) const;
  /// Weighted out-degree (sum of column i).
  double out_degree(std::size_t i) const;
  /// Indices j with adjacency(i, j) > 0.
  std::vector<std::size_t> neighbors(std::size_t i) const;

  /// Unit-weight directed ring 1 -> 2 -> ... -> N -> 1 with the leader
  /// pinned to agent 1.
  static DirectedTopology ring(std::size_t n_agents);
};

enum class TopologyViolation {
  kSelfLoop,
  kNoLeaderAccess,
  kNotBalanced,
  kNotWeaklyConnected,
};

struct ValidationIssue {
  TopologyViolation kind;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
  bool has(TopologyViolation kind) const;
  std::string to_string() const;
};

inline constexpr double kBalanceTolerance = 1e-9;
inline constexpr double kSymmetryTolerance = 1e-9;

/// Checks zero diagonal, leader access, balance and weak connectivity.
/// Throws MalformedInputError for non-square, non-finite or negative input.
ValidationReport validate(const DirectedTopology& topology);

/// L = D - A with D the weighted in-degree matrix.
Eigen::MatrixXd laplacian(const DirectedTopology& topology);

/// Q = (L + B) + (L + B)^T, B = diag(leader gains). Throws ValidationError
/// when the topology does not satisfy validate().
Eigen::MatrixXd q_matrix(const DirectedTopology& topology);

/// Smallest eigenvalue of a symmetric matrix. The input is symmetrized
/// first; asymmetry beyond kSymmetryTolerance raises MalformedInputError.
double min_eigenvalue(const Eigen::MatrixXd& symmetric);

}  // namespace neurotrig
