#include "ritz/core/path.hpp"

namespace ritz::core {

PathModel::PathModel(std::vector<double> theta0, std::vector<double> theta1, nn::Architecture arch,
                     nn::NetworkParams params)
    : theta0_(std::move(theta0)), theta1_(std::move(theta1)), arch_(std::move(arch)), params_(std::move(params)) {
  if (theta0_.empty()) throw ConfigError("path endpoints must be non-empty");
  if (theta0_.size() != theta1_.size()) throw ConfigError("path endpoints have different dimensions");
  if (arch_.input_dim() != 1) throw ConfigError("path network must take the scalar t as input");
  if (arch_.output_dim() != theta0_.size()) {
    throw ConfigError("path network output dimension " + std::to_string(arch_.output_dim()) +
                      " does not match endpoint dimension " + std::to_string(theta0_.size()));
  }
  if (params_.size() != arch_.param_count()) throw ConfigError("path network parameters do not match architecture");
}

PathModel PathModel::initialized(std::vector<double> theta0, std::vector<double> theta1, nn::Architecture arch,
                                 std::uint64_t seed) {
  nn::NetworkParams params = nn::init_params(arch, seed);
  return PathModel(std::move(theta0), std::move(theta1), std::move(arch), std::move(params));
}

PathPoint path_point(const PathModel& model, double t) {
  const auto p = path_eval(model, ad::Dual<double>(t, 1.0));
  PathPoint out;
  for (const auto& c : p) {
    out.position.push_back(c.value);
    out.velocity.push_back(c.deriv);
  }
  return out;
}

PathJet path_jet(const PathModel& model, double t) {
  using D2 = ad::Dual<ad::Dual<double>>;
  const auto p = path_eval(model, D2(ad::Dual<double>(t, 1.0), ad::Dual<double>(1.0, 0.0)));
  PathJet out;
  for (const auto& c : p) {
    out.position.push_back(c.value.value);
    out.velocity.push_back(c.value.deriv);
    out.acceleration.push_back(c.deriv.deriv);
  }
  return out;
}

}  // namespace ritz::core
