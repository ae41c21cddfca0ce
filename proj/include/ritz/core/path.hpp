#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "ritz/ad/dual.hpp"
#include "ritz/core/mask.hpp"
#include "ritz/nn/network.hpp"

namespace ritz::core {

// θ̂(t) = θ0(1-t) + θ1·t + sin(πt)·N(t; β)
class PathModel {
 public:
  PathModel(std::vector<double> theta0, std::vector<double> theta1, nn::Architecture arch, nn::NetworkParams params);
  static PathModel initialized(std::vector<double> theta0, std::vector<double> theta1, nn::Architecture arch,
                               std::uint64_t seed);

  std::size_t dimension() const { return theta0_.size(); }
  const std::vector<double>& theta0() const { return theta0_; }
  const std::vector<double>& theta1() const { return theta1_; }
  const nn::Architecture& arch() const { return arch_; }
  const nn::NetworkParams& params() const { return params_; }
  nn::NetworkParams& params() { return params_; }

 private:
  std::vector<double> theta0_;
  std::vector<double> theta1_;
  nn::Architecture arch_;
  nn::NetworkParams params_;
};

// Path at t with network parameters `params` (which may live on a graph).
template <class T, class P>
std::vector<T> path_eval(const PathModel& model, std::span<const P> params, const T& t) {
  std::vector<T> n = nn::forward<T, P>(model.arch(), params, t);
  const T mask = endpoint_mask(t);
  const T s = 1.0 - t;
  for (std::size_t i = 0; i < n.size(); ++i) {
    n[i] = model.theta0()[i] * s + model.theta1()[i] * t + mask * n[i];
  }
  return n;
}

template <class T>
std::vector<T> path_eval(const PathModel& model, const T& t) {
  return path_eval<T, double>(model, model.params().values(), t);
}

struct PathPoint {
  std::vector<double> position;
  std::vector<double> velocity;
};

// θ̂(t) and dθ̂/dt by forward mode.
PathPoint path_point(const PathModel& model, double t);

// θ̂, dθ̂/dt and d²θ̂/dt² by nested forward mode.
struct PathJet {
  std::vector<double> position;
  std::vector<double> velocity;
  std::vector<double> acceleration;
};
PathJet path_jet(const PathModel& model, double t);

}  // namespace ritz::core
