#include "ritz/nn/batch.hpp"

#include <cmath>
#include <numbers>

namespace ritz::nn {

namespace {

using Mat = Eigen::MatrixXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMat> weights(std::span<const double> p, const LayerShape& s) {
  return {p.data() + s.weight_offset, static_cast<Eigen::Index>(s.out), static_cast<Eigen::Index>(s.in)};
}

Eigen::Map<RowMat> weights(std::span<double> p, const LayerShape& s) {
  return {p.data() + s.weight_offset, static_cast<Eigen::Index>(s.out), static_cast<Eigen::Index>(s.in)};
}

}  // namespace

void TangentBatch::forward(const Architecture& arch, std::span<const double> params, std::span<const double> inputs) {
  if (arch.input_dim() != 1) throw ConfigError("batched evaluation needs a scalar-input network");
  if (params.size() != arch.param_count()) throw ConfigError("parameter count does not match architecture");
  arch_ = &arch;
  params_ = params;
  const auto& shapes = arch.layers();
  const Eigen::Index n = static_cast<Eigen::Index>(inputs.size());
  layers_.resize(shapes.size());

  Layer& first = layers_[0];
  if (arch.embedding()) {
    const auto& b = arch.embedding()->frequencies;
    const Eigen::Index f = static_cast<Eigen::Index>(b.size());
    first.y.resize(2 * f, n);
    first.dy.resize(2 * f, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < f; ++i) {
        const double w = 2.0 * std::numbers::pi * b[static_cast<std::size_t>(i)];
        const double arg = w * inputs[static_cast<std::size_t>(j)];
        first.y(i, j) = std::sin(arg);
        first.y(f + i, j) = std::cos(arg);
        first.dy(i, j) = w * std::cos(arg);
        first.dy(f + i, j) = -(w * std::sin(arg));
      }
    }
  } else {
    first.y.resize(1, n);
    for (Eigen::Index j = 0; j < n; ++j) first.y(0, j) = inputs[static_cast<std::size_t>(j)];
    first.dy = Mat::Ones(1, n);
  }

  const bool tanh_act = arch.activation() == Activation::kTanh;
  const double omega = arch.omega0();
  for (std::size_t l = 0; l + 1 < shapes.size(); ++l) {
    const LayerShape& s = shapes[l];
    Layer& cur = layers_[l];
    Layer& next = layers_[l + 1];
    const auto W = weights(params, s);
    Mat z = W * cur.y;
    z.colwise() += Eigen::Map<const Eigen::VectorXd>(params.data() + s.bias_offset, static_cast<Eigen::Index>(s.out));
    cur.dz = W * cur.dy;
    if (tanh_act) {
      next.y = z.array().tanh().matrix();
      cur.s1 = (1.0 - next.y.array().square()).matrix();
      cur.s2 = (-2.0 * next.y.array() * cur.s1.array()).matrix();
    } else {
      const Eigen::ArrayXXd wz = omega * z.array();
      next.y = wz.sin().matrix();
      cur.s1 = (omega * wz.cos()).matrix();
      cur.s2 = (-omega * omega * next.y.array()).matrix();
    }
    next.dy = cur.s1.cwiseProduct(cur.dz);
  }
  const LayerShape& so = shapes.back();
  const auto Wo = weights(params, so);
  value_ = Wo * layers_.back().y;
  tangent_ = Wo * layers_.back().dy;
}

void TangentBatch::backward(const Mat& value_bar, const Mat& tangent_bar, std::span<double> grad) const {
  if (arch_ == nullptr) throw ConfigError("backward() called before forward()");
  if (grad.size() != arch_->param_count()) throw ConfigError("gradient buffer does not match architecture");
  if (value_bar.rows() != value_.rows() || value_bar.cols() != value_.cols() ||
      tangent_bar.rows() != value_.rows() || tangent_bar.cols() != value_.cols()) {
    throw ConfigError("cotangent shape does not match the batch");
  }
  const auto& shapes = arch_->layers();
  const LayerShape& so = shapes.back();
  const Layer& top = layers_.back();
  weights(grad, so) += value_bar * top.y.transpose() + tangent_bar * top.dy.transpose();
  const auto Wo = weights(params_, so);
  Mat y_bar = Wo.transpose() * value_bar;
  Mat dy_bar = Wo.transpose() * tangent_bar;

  for (std::size_t l = shapes.size() - 1; l-- > 0;) {
    const LayerShape& s = shapes[l];
    const Layer& cur = layers_[l];
    // y' = σ(z), dy' = σ'(z)·dz
    const Mat z_bar = (cur.s1.array() * y_bar.array() + cur.s2.array() * cur.dz.array() * dy_bar.array()).matrix();
    const Mat dz_bar = cur.s1.cwiseProduct(dy_bar);
    weights(grad, s) += z_bar * cur.y.transpose() + dz_bar * cur.dy.transpose();
    Eigen::Map<Eigen::VectorXd>(grad.data() + s.bias_offset, static_cast<Eigen::Index>(s.out)) +=
        z_bar.rowwise().sum();
    if (l > 0) {
      const auto W = weights(params_, s);
      y_bar = W.transpose() * z_bar;
      dy_bar = W.transpose() * dz_bar;
    }
  }
}

}  // namespace ritz::nn
