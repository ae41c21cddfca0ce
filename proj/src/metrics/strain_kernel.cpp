#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "ritz/core/mask.hpp"
#include "ritz/metrics/strain.hpp"

namespace ritz::metrics {

namespace {

using Mat = Eigen::MatrixXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMat>;
using RowMap = Eigen::Map<RowMat>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

// Activations of a layer over all x nodes together with their x-, t- and
// mixed xt-derivatives. Rows are units; the columns hold four blocks of nx
// columns [value | ∂x | ∂t | ∂x∂t], so each weight matrix needs one product.
enum Block : Eigen::Index { kV = 0, kX = 1, kT = 2, kXT = 3 };

// Pre-activation jet (stacked the same way) and σ', σ'', σ''' for the reverse sweep.
struct HiddenCache {
  Mat z;
  Mat s1, s2, s3;
};

void activate(nn::Activation act, double omega, const Mat& z, Mat& s0, Mat& s1, Mat& s2, Mat& s3) {
  if (act == nn::Activation::kTanh) {
    s0 = z.array().tanh().matrix();
    s1 = (1.0 - s0.array().square()).matrix();
    s2 = (-2.0 * s0.array() * s1.array()).matrix();
    s3 = (-2.0 * s1.array().square() - 2.0 * s0.array() * s2.array()).matrix();
  } else {
    const Eigen::ArrayXXd wz = omega * z.array();
    const Eigen::ArrayXXd sn = wz.sin();
    const Eigen::ArrayXXd cs = wz.cos();
    s0 = sn.matrix();
    s1 = (omega * cs).matrix();
    s2 = (-omega * omega * sn).matrix();
    s3 = (-omega * omega * omega * cs).matrix();
  }
}

}  // namespace

StrainQuadratic strain_quadratic_kernel(const nn::Architecture& arch, const core::QuadGrid& xgrid,
                                        std::span<const double> theta, std::span<const double> velocity,
                                        bool with_gradient) {
  const std::size_t n = arch.param_count();
  if (theta.size() != n || velocity.size() != n) throw ConfigError("strain kernel: parameter length mismatch");
  if (arch.embedding() || arch.input_dim() != 1 || arch.output_dim() != 1) {
    throw ConfigError("strain kernel: displacement network must map x to a scalar");
  }
  const auto& layers = arch.layers();
  const std::size_t L = layers.size();
  const Eigen::Index nx = static_cast<Eigen::Index>(xgrid.size());
  const double pi = std::numbers::pi;
  auto blk = [nx](auto& m, Eigen::Index b) { return m.middleCols(b * nx, nx); };
  auto pair = [nx](auto& m, Eigen::Index b) { return m.middleCols(b * nx, 2 * nx); };

  auto weights = [](std::span<const double> p, const nn::LayerShape& s) {
    return ConstRowMap(p.data() + s.weight_offset, static_cast<Eigen::Index>(s.out), static_cast<Eigen::Index>(s.in));
  };
  auto bias = [](std::span<const double> p, const nn::LayerShape& s) {
    return ConstVecMap(p.data() + s.bias_offset, static_cast<Eigen::Index>(s.out));
  };

  std::vector<Mat> jets(L);
  std::vector<HiddenCache> cache(L - 1);
  Mat& in0 = jets[0];
  in0 = Mat::Zero(1, 4 * nx);
  for (Eigen::Index i = 0; i < nx; ++i) {
    in0(0, i) = xgrid.node(static_cast<std::size_t>(i));
    in0(0, nx + i) = 1.0;
  }

  for (std::size_t l = 0; l + 1 < L; ++l) {
    const nn::LayerShape& s = layers[l];
    const auto W = weights(theta, s);
    const auto Wd = weights(velocity, s);
    const Mat& in = jets[l];
    HiddenCache& c = cache[l];
    // z = W·a + b, ∂x z = W·∂x a, ∂t z = W·∂t a + Ẇ·a + ḃ, ∂x∂t z = W·∂x∂t a + Ẇ·∂x a
    c.z.noalias() = W * in;
    pair(c.z, kT).noalias() += Wd * pair(in, kV);
    blk(c.z, kV).colwise() += bias(theta, s);
    blk(c.z, kT).colwise() += bias(velocity, s);

    Mat s0;
    activate(arch.activation(), arch.omega0(), blk(c.z, kV), s0, c.s1, c.s2, c.s3);
    Mat& out = jets[l + 1];
    out.resize(static_cast<Eigen::Index>(s.out), 4 * nx);
    blk(out, kV) = s0;
    blk(out, kX) = c.s1.cwiseProduct(blk(c.z, kX));
    blk(out, kT) = c.s1.cwiseProduct(blk(c.z, kT));
    blk(out, kXT) =
        (c.s2.array() * blk(c.z, kX).array() * blk(c.z, kT).array() + c.s1.array() * blk(c.z, kXT).array()).matrix();
  }

  const nn::LayerShape& so = layers[L - 1];
  const auto Wo = weights(theta, so);
  const auto Wdo = weights(velocity, so);
  const Mat& top = jets[L - 1];
  Mat M = Wo * top;
  pair(M, kT).noalias() += Wdo * pair(top, kV);

  // ∂x∂t û = π cos(πx)·∂t M + sin(πx)·∂x∂t M
  Eigen::RowVectorXd sx(nx), dsx(nx), rate(nx);
  for (Eigen::Index i = 0; i < nx; ++i) {
    const double x = in0(0, i);
    sx(i) = core::endpoint_mask(x);
    dsx(i) = pi * std::cos(pi * x);
    rate(i) = dsx(i) * M(0, kT * nx + i) + sx(i) * M(0, kXT * nx + i);
  }

  StrainQuadratic out;
  for (Eigen::Index i = 0; i < nx; ++i) out.value += xgrid.weight(static_cast<std::size_t>(i)) * rate(i) * rate(i);
  if (!with_gradient) return out;

  out.d_theta.assign(n, 0.0);
  out.d_velocity.assign(n, 0.0);
  auto grad_w = [](std::vector<double>& g, const nn::LayerShape& s) {
    return RowMap(g.data() + s.weight_offset, static_cast<Eigen::Index>(s.out), static_cast<Eigen::Index>(s.in));
  };
  auto grad_b = [](std::vector<double>& g, const nn::LayerShape& s) {
    return VecMap(g.data() + s.bias_offset, static_cast<Eigen::Index>(s.out));
  };

  // Only the ∂t and ∂x∂t blocks of the output jet enter the rate.
  Mat M_bar = Mat::Zero(1, 4 * nx);
  for (Eigen::Index i = 0; i < nx; ++i) {
    const double rbar = 2.0 * xgrid.weight(static_cast<std::size_t>(i)) * rate(i);
    M_bar(0, kT * nx + i) = dsx(i) * rbar;
    M_bar(0, kXT * nx + i) = sx(i) * rbar;
  }
  grad_w(out.d_theta, so).noalias() += M_bar * top.transpose();
  grad_w(out.d_velocity, so).noalias() += pair(M_bar, kT) * pair(top, kV).transpose();
  Mat a_bar = Wo.transpose() * M_bar;
  pair(a_bar, kV).noalias() += Wdo.transpose() * pair(M_bar, kT);

  Mat z_bar;
  for (std::size_t l = L - 1; l-- > 0;) {
    const nn::LayerShape& s = layers[l];
    const HiddenCache& c = cache[l];
    const Mat& in = jets[l];
    const auto s1 = c.s1.array();
    const auto s2 = c.s2.array();
    const auto zx = blk(c.z, kX).array();
    const auto zt = blk(c.z, kT).array();
    const auto axt_bar = blk(a_bar, kXT).array();
    z_bar.resize(a_bar.rows(), 4 * nx);
    blk(z_bar, kXT) = (s1 * axt_bar).matrix();
    blk(z_bar, kX) = (s2 * zt * axt_bar + s1 * blk(a_bar, kX).array()).matrix();
    blk(z_bar, kT) = (s2 * zx * axt_bar + s1 * blk(a_bar, kT).array()).matrix();
    blk(z_bar, kV) = ((c.s3.array() * zx * zt + s2 * blk(c.z, kXT).array()) * axt_bar +
                      s2 * zt * blk(a_bar, kT).array() + s2 * zx * blk(a_bar, kX).array() +
                      s1 * blk(a_bar, kV).array())
                         .matrix();

    grad_w(out.d_theta, s).noalias() += z_bar * in.transpose();
    grad_b(out.d_theta, s) += blk(z_bar, kV).rowwise().sum();
    grad_w(out.d_velocity, s).noalias() += pair(z_bar, kT) * pair(in, kV).transpose();
    grad_b(out.d_velocity, s) += blk(z_bar, kT).rowwise().sum();

    if (l > 0) {
      const auto W = weights(theta, s);
      const auto Wd = weights(velocity, s);
      a_bar.noalias() = W.transpose() * z_bar;
      pair(a_bar, kV).noalias() += Wd.transpose() * pair(z_bar, kT);
    }
  }
  return out;
}

ad::Var strain_quadratic_fused(const nn::Architecture& arch, const core::QuadGrid& xgrid,
                               std::span<const ad::Var> theta, std::span<const ad::Var> velocity) {
  std::vector<double> th(theta.size()), v(velocity.size());
  for (std::size_t k = 0; k < theta.size(); ++k) th[k] = theta[k].value();
  for (std::size_t k = 0; k < velocity.size(); ++k) v[k] = velocity[k].value();
  const StrainQuadratic q = strain_quadratic_kernel(arch, xgrid, th, v, true);
  ad::Tape::Builder node(ad::OpKind::kFused);
  for (std::size_t k = 0; k < theta.size(); ++k) node.add(theta[k], q.d_theta[k]);
  for (std::size_t k = 0; k < velocity.size(); ++k) node.add(velocity[k], q.d_velocity[k]);
  return node.finish(q.value);
}

}  // namespace ritz::metrics
