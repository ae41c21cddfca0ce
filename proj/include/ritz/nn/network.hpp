#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ritz/ad/dual.hpp"
#include "ritz/ad/param_vector.hpp"
#include "ritz/error.hpp"

namespace ritz::nn {

enum class Activation { kTanh, kSine };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

// Random frequency lift t -> [sin(2πBt), cos(2πBt)]. The frequencies are drawn
// once and never trained.
struct FourierEmbedding {
  std::vector<double> frequencies;
  double variance = 1.0;
  std::uint64_t seed = 0;

  std::size_t feature_count() const { return 2 * frequencies.size(); }
  bool operator==(const FourierEmbedding&) const = default;
};

// B_i ~ Normal(0, variance), i < f.
FourierEmbedding make_fourier_embedding(std::size_t f, double variance, std::uint64_t seed);

struct LayerShape {
  std::size_t in = 0;
  std::size_t out = 0;
  bool bias = true;
  std::size_t weight_offset = 0;
  std::size_t bias_offset = 0;
  bool operator==(const LayerShape&) const = default;
};

// Dense network description. Hidden layers apply the activation element-wise
// to W·y + B; the output layer is linear with no bias.
class Architecture {
 public:
  static Architecture mlp(std::size_t input_dim, std::size_t output_dim, std::vector<std::size_t> hidden_widths);
  static Architecture siren(std::size_t input_dim, std::size_t output_dim, std::vector<std::size_t> hidden_widths,
                            double omega0 = 30.0);
  static Architecture fourier(std::size_t output_dim, std::vector<std::size_t> hidden_widths,
                              FourierEmbedding embedding);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return output_dim_; }
  const std::vector<std::size_t>& hidden_widths() const { return hidden_widths_; }
  Activation activation() const { return activation_; }
  double omega0() const { return omega0_; }
  const std::optional<FourierEmbedding>& embedding() const { return embedding_; }
  static constexpr bool final_layer_bias() { return false; }

  // Width of the first dense layer's input (2f with an embedding).
  std::size_t feature_dim() const;
  const std::vector<LayerShape>& layers() const { return layers_; }
  std::size_t param_count() const;

  // Empty parameter vector with segments W1, B1, ..., W_out.
  ad::ParamVector make_layout() const;

  bool operator==(const Architecture&) const = default;

 private:
  Architecture(std::size_t input_dim, std::size_t output_dim, std::vector<std::size_t> hidden,
               Activation act, double omega0, std::optional<FourierEmbedding> embedding);

  std::size_t input_dim_ = 1;
  std::size_t output_dim_ = 1;
  std::vector<std::size_t> hidden_widths_;
  Activation activation_ = Activation::kTanh;
  double omega0_ = 30.0;
  std::optional<FourierEmbedding> embedding_;
  std::vector<LayerShape> layers_;
};

using NetworkParams = ad::ParamVector;

// Glorot-uniform weights for tanh layers, the sine-network scheme for SIREN
// layers, zero biases. Deterministic in (arch, seed).
NetworkParams init_params(const Architecture& arch, std::uint64_t seed);

// [sin(2πB_1 t) .. sin(2πB_f t), cos(2πB_1 t) .. cos(2πB_f t)]
template <class T>
std::vector<T> fourier_embed(const T& t, const FourierEmbedding& emb) {
  using std::cos;
  using std::sin;
  const std::size_t f = emb.frequencies.size();
  std::vector<T> out;
  out.reserve(2 * f);
  for (std::size_t i = 0; i < f; ++i) out.push_back(sin(2.0 * std::numbers::pi * emb.frequencies[i] * t));
  for (std::size_t i = 0; i < f; ++i) out.push_back(cos(2.0 * std::numbers::pi * emb.frequencies[i] * t));
  return out;
}

// Network output for input vector x. P is the parameter scalar type, T the
// activation scalar type (T may be a forward-mode number over P).
template <class T, class P>
std::vector<T> forward(const Architecture& arch, std::span<const P> params, std::span<const T> input) {
  using std::sin;
  using std::tanh;
  if (params.size() != arch.param_count()) {
    throw ConfigError("parameter count " + std::to_string(params.size()) + " does not match architecture (" +
                      std::to_string(arch.param_count()) + ")");
  }
  std::vector<T> y;
  if (arch.embedding()) {
    if (input.size() != 1) throw ConfigError("Fourier-feature networks take a scalar input");
    y = fourier_embed(input[0], *arch.embedding());
  } else {
    if (input.size() != arch.input_dim()) throw ConfigError("network input has the wrong dimension");
    y.assign(input.begin(), input.end());
  }

  const auto& layers = arch.layers();
  std::vector<T> z;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerShape& s = layers[l];
    const bool hidden = l + 1 < layers.size();
    z.clear();
    z.reserve(s.out);
    for (std::size_t i = 0; i < s.out; ++i) {
      const P* w = params.data() + s.weight_offset + i * s.in;
      const std::size_t terms = s.bias ? s.in + 1 : s.in;
      T zi = ad::sum_of_products<T>(
          terms,
          [&](std::size_t j) { return j < s.in ? ad::lift<T>(w[j]) : ad::lift<T>(params[s.bias_offset + i]); },
          [&](std::size_t j) { return j < s.in ? y[j] : T(1.0); });
      if (hidden) {
        if (arch.activation() == Activation::kTanh) {
          zi = tanh(zi);
        } else {
          zi = sin(arch.omega0() * zi);
        }
      }
      z.push_back(std::move(zi));
    }
    std::swap(y, z);
  }
  return y;
}

template <class T, class P>
std::vector<T> forward(const Architecture& arch, std::span<const P> params, const T& input) {
  return forward<T, P>(arch, params, std::span<const T>(&input, 1));
}

// Architecture descriptor plus flat parameters as a JSON document.
std::string save_network(const Architecture& arch, const NetworkParams& params);
std::pair<Architecture, NetworkParams> load_network(const std::string& text);

}  // namespace ritz::nn
