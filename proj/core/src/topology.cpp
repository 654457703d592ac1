#include "neurotrig/topology.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "neurotrig/errors.hpp"

namespace neurotrig {
namespace {

void check_shape(const DirectedTopology& t) {
  const auto n = t.adjacency.rows();
  if (n == 0) throw MalformedInputError("topology: adjacency is empty");
  if (t.adjacency.cols() != n) {
    throw MalformedInputError("topology: adjacency is " + std::to_string(n) + "x" +
                              std::to_string(t.adjacency.cols()) + ", expected square");
  }
  if (t.leader_gains.size() != n) {
    throw MalformedInputError("topology: expected " + std::to_string(n) +
                              " leader gains, got " + std::to_string(t.leader_gains.size()));
  }
  if (!t.adjacency.allFinite() || !t.leader_gains.allFinite()) {
    throw MalformedInputError("topology: non-finite entry");
  }
  if ((t.adjacency.array() < 0.0).any()) {
    throw MalformedInputError("topology: negative adjacency weight");
  }
  if ((t.leader_gains.array() < 0.0).any()) {
    throw MalformedInputError("topology: negative leader gain");
  }
}

// Union-find over the symmetrized edge set.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

double DirectedTopology::in_degree(std::size_t i) const {
  return adjacency.row(static_cast<Eigen::Index>(i)).sum();
}

double DirectedTopology::out_degree(std::size_t i) const {
  return adjacency.col(static_cast<Eigen::Index>(i)).sum();
}

std::vector<std::size_t> DirectedTopology::neighbors(std::size_t i) const {
  std::vector<std::size_t> out;
  for (Eigen::Index j = 0; j < adjacency.cols(); ++j) {
    if (adjacency(static_cast<Eigen::Index>(i), j) > 0.0) out.push_back(static_cast<std::size_t>(j));
  }
  return out;
}

DirectedTopology DirectedTopology::ring(std::size_t n_agents) {
  const auto n = static_cast<Eigen::Index>(n_agents);
  DirectedTopology t{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n)};
  if (n > 1) {
    for (Eigen::Index i = 0; i < n; ++i) t.adjacency((i + 1) % n, i) = 1.0;
  }
  if (n > 0) t.leader_gains(0) = 1.0;
  return t;
}

bool ValidationReport::has(TopologyViolation kind) const {
  for (const auto& issue : issues) {
    if (issue.kind == kind) return true;
  }
  return false;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < issues.size(); ++k) {
    if (k) os << "; ";
    os << issues[k].message;
  }
  return os.str();
}

ValidationReport validate(const DirectedTopology& topology) {
  check_shape(topology);
  ValidationReport report;
  const std::size_t n = topology.size();
  const auto& a = topology.adjacency;

  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (a(ii, ii) != 0.0) {
      report.issues.push_back({TopologyViolation::kSelfLoop,
                               "self-loop at agent " + std::to_string(i + 1) +
                                   " (graph must have zero diagonal)"});
    }
  }

  if (!(topology.leader_gains.array() > 0.0).any()) {
    report.issues.push_back({TopologyViolation::kNoLeaderAccess,
                             "Assumption 2 violated: no agent receives the reference "
                             "(all leader gains are zero)"});
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double in = topology.in_degree(i);
    const double out = topology.out_degree(i);
    if (std::abs(in - out) > kBalanceTolerance) {
      std::ostringstream os;
      os << "Assumption 1 violated: graph not balanced at agent " << i + 1
         << " (in-degree " << in << ", out-degree " << out << ")";
      report.issues.push_back({TopologyViolation::kNotBalanced, os.str()});
    }
  }

  DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0.0) {
        sets.unite(i, j);
      }
    }
  }
  const std::size_t root = sets.find(0);
  for (std::size_t i = 1; i < n; ++i) {
    if (sets.find(i) != root) {
      report.issues.push_back({TopologyViolation::kNotWeaklyConnected,
                               "Assumption 1 violated: graph not weakly connected (agent " +
                                   std::to_string(i + 1) + " unreachable from agent 1)"});
      break;
    }
  }
  return report;
}

Eigen::MatrixXd laplacian(const DirectedTopology& topology) {
  check_shape(topology);
  Eigen::MatrixXd l = -topology.adjacency;
  l.diagonal().setZero();
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    double d = 0.0;
    for (Eigen::Index j = 0; j < l.cols(); ++j) {
      if (j != i) d += topology.adjacency(i, j);
    }
    l(i, i) = d;
  }
  return l;
}

Eigen::MatrixXd q_matrix(const DirectedTopology& topology) {
  const auto report = validate(topology);
  if (!report.ok()) {
    throw ValidationError("q_matrix requires a valid topology: " + report.to_string());
  }
  Eigen::MatrixXd lb = laplacian(topology);
  lb.diagonal() += topology.leader_gains;
  // Floating-point addition commutes, so the result is exactly symmetric.
  return lb + lb.transpose();
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  if (symmetric.rows() == 0 || symmetric.rows() != symmetric.cols()) {
    throw MalformedInputError("min_eigenvalue: matrix must be square and non-empty");
  }
  if (!symmetric.allFinite()) throw MalformedInputError("min_eigenvalue: non-finite entry");
  const double asym = (symmetric - symmetric.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance) {
    throw MalformedInputError("min_eigenvalue: matrix is not symmetric (max |A - A^T| = " +
                              std::to_string(asym) + ")");
  }
  const Eigen::MatrixXd sym = 0.5 * (symmetric + symmetric.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw MalformedInputError("min_eigenvalue: eigensolver did not converge");
  }
  return solver.eigenvalues().minCoeff();
}

}  // namespace neurotrig
