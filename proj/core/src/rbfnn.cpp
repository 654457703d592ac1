#include "neurotrig/rbfnn.hpp"

#include <cmath>
#include <string>

#include "neurotrig/errors.hpp"

namespace neurotrig {
namespace {

// Integer m with m^dim == nodes, or 0.
std::size_t exact_root(std::size_t nodes, std::size_t dim) {
  for (std::size_t m = 1;; ++m) {
    std::size_t power = 1;
    for (std::size_t d = 0; d < dim; ++d) power *= m;
    if (power == nodes) return m;
    if (power > nodes) return 0;
  }
}

double grid_coordinate(std::size_t index, std::size_t count, double lo, double hi) {
  if (count == 1) return 0.5 * (lo + hi);
  return lo + (hi - lo) * static_cast<double>(index) / static_cast<double>(count - 1);
}

}  // namespace

GaussianNetwork::GaussianNetwork(Eigen::MatrixXd centers, Eigen::VectorXd widths)
    : centers_(std::move(centers)), widths_(std::move(widths)) {
  if (centers_.rows() == 0 || centers_.cols() == 0) {
    throw MalformedInputError("GaussianNetwork: need at least one node and one input");
  }
  if (widths_.size() != centers_.rows()) {
    throw MalformedInputError("GaussianNetwork: " + std::to_string(centers_.rows()) +
                              " centers but " + std::to_string(widths_.size()) + " widths");
  }
  if (!(widths_.array() > 0.0).all() || !widths_.allFinite() || !centers_.allFinite()) {
    throw MalformedInputError("GaussianNetwork: widths must be positive and finite");
  }
}

GaussianNetwork GaussianNetwork::uniform_grid(std::size_t nodes, std::size_t input_dim,
                                              double lo, double hi, double width) {
  if (nodes == 0 || input_dim == 0) {
    throw MalformedInputError("uniform_grid: nodes and input_dim must be positive");
  }
  if (!(hi > lo)) throw MalformedInputError("uniform_grid: empty range");
  const auto p = static_cast<Eigen::Index>(nodes);
  const auto dim = static_cast<Eigen::Index>(input_dim);
  Eigen::MatrixXd centers(p, dim);
  const std::size_t per_axis = exact_root(nodes, input_dim);
  if (per_axis != 0) {
    for (std::size_t h = 0; h < nodes; ++h) {
      std::size_t rest = h;
      // Last coordinate varies fastest.
      for (Eigen::Index d = dim - 1; d >= 0; --d) {
        centers(static_cast<Eigen::Index>(h), d) = grid_coordinate(rest % per_axis, per_axis, lo, hi);
        rest /= per_axis;
      }
    }
  } else {
    for (std::size_t h = 0; h < nodes; ++h) {
      centers.row(static_cast<Eigen::Index>(h)).setConstant(grid_coordinate(h, nodes, lo, hi));
    }
  }
  return GaussianNetwork(std::move(centers), Eigen::VectorXd::Constant(p, width));
}

Eigen::VectorXd GaussianNetwork::eval(const Eigen::VectorXd& input) const {
  if (input.size() != centers_.cols()) {
    throw MalformedInputError("GaussianNetwork::eval: input has dimension " +
                              std::to_string(input.size()) + ", expected " +
                              std::to_string(centers_.cols()));
  }
  Eigen::VectorXd out(centers_.rows());
  for (Eigen::Index h = 0; h < centers_.rows(); ++h) {
    const double r2 = (centers_.row(h).transpose() - input).squaredNorm();
    out(h) = std::exp(-r2 / (widths_(h) * widths_(h)));
  }
  return out;
}

Eigen::MatrixXd GaussianNetwork::jacobian(const Eigen::VectorXd& input) const {
  const Eigen::VectorXd phi = eval(input);
  Eigen::MatrixXd jac(centers_.rows(), centers_.cols());
  for (Eigen::Index h = 0; h < centers_.rows(); ++h) {
    const double b2 = widths_(h) * widths_(h);
    jac.row(h) = (-2.0 * phi(h) / b2) * (input - centers_.row(h).transpose()).transpose();
  }
  return jac;
}

WeightEstimate::WeightEstimate(Eigen::VectorXd initial, double gain_in, double leakage_in)
    : weights(std::move(initial)), gain(gain_in), leakage(leakage_in) {
  if (!(gain > 0.0) || !(leakage > 0.0)) {
    throw MalformedInputError("WeightEstimate: gain and leakage must be positive");
  }
}

Eigen::VectorXd weight_update_rate(const WeightEstimate& w, const Eigen::VectorXd& basis,
                                   double error) {
  return weight_update_rate(w.gain, w.leakage, w.weights, basis, error);
}

Eigen::VectorXd weight_update_rate(double gain, double leakage, const Eigen::VectorXd& weights,
                                   const Eigen::VectorXd& basis, double error) {
  if (basis.size() != weights.size()) {
    throw MalformedInputError("weight_update_rate: basis and weights differ in size");
  }
  return -gain * leakage * weights + gain * error * basis;
}

double lipschitz_constant(double width) {
  if (!(width > 0.0)) throw MalformedInputError("lipschitz_constant: width must be positive");
  return std::sqrt(2.0) * std::exp(-0.5) / width;
}

double conservative_lipschitz_constant(double width) {
  if (!(width > 0.0)) {
    throw MalformedInputError("conservative_lipschitz_constant: width must be positive");
  }
  return 2.0 * std::pow(1.5, 0.125) * std::exp(std::pow(1.5, 0.25)) / width;
}

double basis_deviation_bound(const GaussianNetwork& net, double delta_input) {
  if (!(delta_input >= 0.0)) {
    throw MalformedInputError("basis_deviation_bound: delta_input must be nonnegative");
  }
  double sum = 0.0;
  for (Eigen::Index h = 0; h < net.widths().size(); ++h) sum += lipschitz_constant(net.widths()(h));
  return sum * delta_input;
}

}  // namespace neurotrig
