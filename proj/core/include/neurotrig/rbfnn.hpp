#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace neurotrig {

/// Gaussian RBF layer: phi_h(x) = exp(-|x - C_h|^2 / b_h^2).
class GaussianNetwork {
 public:
  /// centers: one row per node (p x input_dim); widths: p positive reals.
  GaussianNetwork(Eigen::MatrixXd centers, Eigen::VectorXd widths);

  /// Layout over the hypercube [lo, hi]^input_dim with a common width. When
  /// `nodes` is a perfect input_dim-th power the centers form a tensor grid
  /// (25 nodes in 2-D -> 5x5); otherwise they are spread along the main
  /// diagonal, every coordinate of center h equal to lo + h (hi - lo)/(p - 1).
  static GaussianNetwork uniform_grid(std::size_t nodes, std::size_t input_dim, double lo,
                                      double hi, double width);

  std::size_t nodes() const { return static_cast<std::size_t>(centers_.rows()); }
  std::size_t input_dim() const { return static_cast<std::size_t>(centers_.cols()); }
  const Eigen::MatrixXd& centers() const { return centers_; }
  const Eigen::VectorXd& widths() const { return widths_; }

  /// Throws MalformedInputError on dimension mismatch.
  Eigen::VectorXd eval(const Eigen::VectorXd& input) const;
  /// Gradient of every node w.r.t. the input, one row per node.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& input) const;

 private:
  Eigen::MatrixXd centers_;
  Eigen::VectorXd widths_;
};

/// Adaptive weight vector W-hat with scalar gain Gamma and leakage sigma.
struct WeightEstimate {
  Eigen::VectorXd weights;
  double gain = 0.0;
  double leakage = 0.0;

  WeightEstimate(Eigen::VectorXd initial, double gain, double leakage);
};

/// d/dt W-hat = -Gamma sigma W-hat + Gamma basis error.
Eigen::VectorXd weight_update_rate(const WeightEstimate& w, const Eigen::VectorXd& basis,
                                   double error);
Eigen::VectorXd weight_update_rate(double gain, double leakage, const Eigen::VectorXd& weights,
                                   const Eigen::VectorXd& basis, double error);

/// Tight Lipschitz constant of one Gaussian node: sqrt(2) e^{-1/2} / width,
/// the peak gradient norm reached at radius width / sqrt(2).
double lipschitz_constant(double width);

/// The larger closed-form constant 2 (1.5)^{1/8} e^{(1.5)^{1/4}} / width. Kept
/// as a cross-check; it also bounds the node's variation.
double conservative_lipschitz_constant(double width);

/// Upper bound on |phi(a) - phi(b)| for |a - b| <= delta_input:
/// sum_h lipschitz_constant(b_h) * delta_input.
double basis_deviation_bound(const GaussianNetwork& net, double delta_input);

}  // namespace neurotrig
