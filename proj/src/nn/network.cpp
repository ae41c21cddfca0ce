#include "ritz/nn/network.hpp"

#include <cmath>
#include <random>

#include "json.hpp"

namespace ritz::nn {

using nlohmann::json;

std::string to_string(Activation a) { return a == Activation::kTanh ? "tanh" : "sine"; }

Activation activation_from_string(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "sine" || name == "sin") return Activation::kSine;
  throw ConfigError("unknown activation '" + name + "'");
}

FourierEmbedding make_fourier_embedding(std::size_t f, double variance, std::uint64_t seed) {
  if (f == 0) throw ConfigError("Fourier embedding needs at least one frequency");
  if (!(variance > 0.0)) throw ConfigError("Fourier embedding variance must be positive");
  // Separate stream from the weight initialisation drawn with the same seed.
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0xF0u};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, std::sqrt(variance));
  FourierEmbedding emb;
  emb.variance = variance;
  emb.seed = seed;
  emb.frequencies.resize(f);
  for (double& b : emb.frequencies) b = normal(rng);
  return emb;
}

Architecture::Architecture(std::size_t input_dim, std::size_t output_dim, std::vector<std::size_t> hidden,
                           Activation act, double omega0, std::optional<FourierEmbedding> embedding)
    : input_dim_(input_dim),
      output_dim_(output_dim),
      hidden_widths_(std::move(hidden)),
      activation_(act),
      omega0_(omega0),
      embedding_(std::move(embedding)) {
  if (input_dim_ == 0 || output_dim_ == 0) throw ConfigError("network dimensions must be positive");
  for (std::size_t w : hidden_widths_) {
    if (w == 0) throw ConfigError("hidden widths must be positive");
  }
  if (!(omega0_ > 0.0)) throw ConfigError("omega0 must be positive");

  std::size_t in = feature_dim();
  std::size_t offset = 0;
  for (std::size_t w : hidden_widths_) {
    LayerShape s{in, w, true, offset, offset + in * w};
    offset += in * w + w;
    layers_.push_back(s);
    in = w;
  }
  layers_.push_back(LayerShape{in, output_dim_, false, offset, 0});
}

Architecture Architecture::mlp(std::size_t input_dim, std::size_t output_dim, std::vector<std::size_t> hidden_widths) {
  return Architecture(input_dim, output_dim, std::move(hidden_widths), Activation::kTanh, 30.0, std::nullopt);
}

Architecture Architecture::siren(std::size_t input_dim, std::size_t output_dim,
                                 std::vector<std::size_t> hidden_widths, double omega0) {
  return Architecture(input_dim, output_dim, std::move(hidden_widths), Activation::kSine, omega0, std::nullopt);
}

Architecture Architecture::fourier(std::size_t output_dim, std::vector<std::size_t> hidden_widths,
                                   FourierEmbedding embedding) {
  if (embedding.frequencies.empty()) throw ConfigError("Fourier embedding needs at least one frequency");
  return Architecture(1, output_dim, std::move(hidden_widths), Activation::kTanh, 30.0, std::move(embedding));
}

std::size_t Architecture::feature_dim() const {
  return embedding_ ? embedding_->feature_count() : input_dim_;
}

std::size_t Architecture::param_count() const {
  std::size_t n = 0;
  for (const LayerShape& s : layers_) n += s.in * s.out + (s.bias ? s.out : 0);
  return n;
}

ad::ParamVector Architecture::make_layout() const {
  ad::ParamVector pv;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const LayerShape& s = layers_[l];
    const bool last = l + 1 == layers_.size();
    const std::string tag = last ? "out" : std::to_string(l + 1);
    pv.add_segment("W" + tag, s.out, s.in);
    if (s.bias) pv.add_segment("B" + tag, s.out, 1);
  }
  return pv;
}

NetworkParams init_params(const Architecture& arch, std::uint64_t seed) {
  NetworkParams params = arch.make_layout();
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x1Au};
  std::mt19937_64 rng(seq);
  auto values = params.values();
  const auto& layers = arch.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerShape& s = layers[l];
    const double in = static_cast<double>(s.in);
    double limit = 0.0;
    if (arch.activation() == Activation::kSine) {
      limit = l == 0 ? 1.0 / in : std::sqrt(6.0 / in) / arch.omega0();
    } else {
      limit = std::sqrt(6.0 / (in + static_cast<double>(s.out)));
    }
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (std::size_t k = 0; k < s.in * s.out; ++k) values[s.weight_offset + k] = dist(rng);
  }
  return params;
}

std::string save_network(const Architecture& arch, const NetworkParams& params) {
  json j;
  j["input_dim"] = arch.input_dim();
  j["output_dim"] = arch.output_dim();
  j["hidden_widths"] = arch.hidden_widths();
  j["activation"] = to_string(arch.activation());
  j["omega0"] = arch.omega0();
  if (arch.embedding()) {
    j["fourier_f"] = arch.embedding()->frequencies.size();
    j["fourier_sigma2"] = arch.embedding()->variance;
    j["seed"] = arch.embedding()->seed;
    j["fourier_frequencies"] = arch.embedding()->frequencies;
  } else {
    j["fourier_f"] = 0;
    j["fourier_sigma2"] = 0.0;
    j["seed"] = 0;
  }
  j["params"] = params.flatten();
  return j.dump(2);
}

std::pair<Architecture, NetworkParams> load_network(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed network file: ") + e.what());
  }
  try {
    const auto hidden = j.at("hidden_widths").get<std::vector<std::size_t>>();
    const auto output_dim = j.at("output_dim").get<std::size_t>();
    const auto f = j.at("fourier_f").get<std::size_t>();
    const Activation act = activation_from_string(j.at("activation").get<std::string>());
    std::optional<Architecture> arch;
    if (f > 0) {
      FourierEmbedding emb;
      if (j.contains("fourier_frequencies")) {
        emb.frequencies = j.at("fourier_frequencies").get<std::vector<double>>();
        emb.variance = j.at("fourier_sigma2").get<double>();
        emb.seed = j.at("seed").get<std::uint64_t>();
      } else {
        emb = make_fourier_embedding(f, j.at("fourier_sigma2").get<double>(), j.at("seed").get<std::uint64_t>());
      }
      if (emb.frequencies.size() != f) throw ConfigError("fourier_f does not match the stored frequencies");
      arch = Architecture::fourier(output_dim, hidden, std::move(emb));
    } else if (act == Activation::kSine) {
      arch = Architecture::siren(j.at("input_dim").get<std::size_t>(), output_dim, hidden, j.at("omega0").get<double>());
    } else {
      arch = Architecture::mlp(j.at("input_dim").get<std::size_t>(), output_dim, hidden);
    }
    NetworkParams params = arch->make_layout();
    params.assign(j.at("params").get<std::vector<double>>());
    return {std::move(*arch), std::move(params)};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed network file: ") + e.what());
  }
}

}  // namespace ritz::nn
