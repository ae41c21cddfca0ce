#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "ritz/nn/network.hpp"

namespace ritz::nn {

// Evaluates a scalar-input network at many inputs at once, carrying the
// derivative with respect to the input alongside every activation, and pulls
// cotangents of both the outputs and their input derivatives back to the
// parameters. Columns index inputs.
class TangentBatch {
 public:
  // Output values and d/dt of the outputs, each output_dim × inputs.size().
  void forward(const Architecture& arch, std::span<const double> params, std::span<const double> inputs);

  const Eigen::MatrixXd& value() const { return value_; }
  const Eigen::MatrixXd& tangent() const { return tangent_; }

  // Adds Σ_cols value_bar·∂value/∂β + tangent_bar·∂tangent/∂β into grad.
  // Must follow forward() with the same architecture and parameters.
  void backward(const Eigen::MatrixXd& value_bar, const Eigen::MatrixXd& tangent_bar, std::span<double> grad) const;

 private:
  struct Layer {
    Eigen::MatrixXd y, dy;      // layer input and its t-derivative
    Eigen::MatrixXd dz, s1, s2; // pre-activation derivative, σ'(z), σ''(z)
  };

  const Architecture* arch_ = nullptr;
  std::span<const double> params_;
  std::vector<Layer> layers_;
  Eigen::MatrixXd value_, tangent_;
};

}  // namespace ritz::nn
