#include "ritz/cli/config.hpp"

#include <json.hpp>
#include <numbers>
#include <set>

#include "ritz/error.hpp"

namespace ritz::cli {

using nlohmann::json;

namespace {

// Reads the members of one JSON object and rejects anything left unread.
class Section {
 public:
  Section(const json& object, std::string path) : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) throw ConfigError("'" + path_ + "' must be an object");
  }

  bool has(const std::string& key) const { return object_.contains(key); }

  template <class T>
  void read(const std::string& key, T& out) {
    if (!object_.contains(key)) return;
    seen_.insert(key);
    const json& v = object_.at(key);
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw ConfigError("");
        out = v.get<double>();
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_unsigned()) throw ConfigError("");
        out = v.get<T>();
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("");
        out = v.get<std::string>();
      } else {
        if (!v.is_array()) throw ConfigError("");
        using E = typename T::value_type;
        T vals;
        for (const json& e : v) {
          if constexpr (std::is_same_v<E, double>) {
            if (!e.is_number()) throw ConfigError("");
          } else {
            if (!e.is_number_unsigned()) throw ConfigError("");
          }
          vals.push_back(e.get<E>());
        }
        out = std::move(vals);
      }
    } catch (const ConfigError&) {
      throw ConfigError("'" + path_ + "." + key + "' has the wrong type");
    }
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    return Section(object_.at(key), path_.empty() ? key : path_ + "." + key);
  }

  void finish() const {
    for (auto it = object_.begin(); it != object_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError("unknown config key '" + (path_.empty() ? "" : path_ + ".") + it.key() + "'");
      }
    }
  }

 private:
  const json& object_;
  std::string path_;
  std::set<std::string> seen_;
};

bool uses_field(const RunSpec& s) {
  return s.experiment == ExperimentKind::kWaveguide ||
         (s.experiment == ExperimentKind::kGeodesic && s.metric == "waveguide");
}

bool uses_terrain(const RunSpec& s) {
  return s.experiment == ExperimentKind::kLandscape ||
         (s.experiment == ExperimentKind::kGeodesic && s.metric == "landscape");
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kLandscape:
      return "landscape";
    case ExperimentKind::kWaveguide:
      return "waveguide";
    case ExperimentKind::kBar:
      return "bar";
    case ExperimentKind::kGeodesic:
      return "geodesic";
  }
  return "geodesic";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  if (name == "landscape") return ExperimentKind::kLandscape;
  if (name == "waveguide") return ExperimentKind::kWaveguide;
  if (name == "bar") return ExperimentKind::kBar;
  if (name == "geodesic") return ExperimentKind::kGeodesic;
  throw ConfigError("unknown experiment '" + name + "' (expected landscape, waveguide, bar or geodesic)");
}

RunSpec default_spec(ExperimentKind kind, const std::string& metric) {
  RunSpec s;
  s.experiment = kind;
  const double half_pi = 0.5 * std::numbers::pi;
  switch (kind) {
    case ExperimentKind::kLandscape: {
      const experiments::LandscapeConfig c;
      s.metric = "landscape";
      s.hidden = c.hidden;
      s.train = c.train;
      s.theta0 = c.theta0;
      s.theta1 = c.theta1;
      break;
    }
    case ExperimentKind::kWaveguide: {
      const experiments::WaveguideConfig c;
      s.metric = "waveguide";
      s.network = c.network;
      s.hidden = c.hidden;
      s.train = c.train;
      s.theta0 = c.theta0;
      s.theta1 = c.theta1;
      break;
    }
    case ExperimentKind::kBar: {
      const experiments::BarConfig c;
      s.metric = "strain";
      s.hidden = c.path_hidden;
      s.displacement_hidden = c.displacement_hidden;
      s.x_points = c.x_points;
      s.train = c.train;
      s.fit = c.fit;
      break;
    }
    case ExperimentKind::kGeodesic:
      s.metric = metric;
      s.train.epochs = 5000;
      if (metric == "flat") {
        s.theta0 = {0.0, 0.0};
        s.theta1 = {1.0, 1.0};
      } else if (metric == "sphere") {
        s.theta0 = {half_pi, 0.0};
        s.theta1 = {half_pi, half_pi};
      } else if (metric == "landscape") {
        s.theta0 = {-1.0, -1.0};
        s.theta1 = {1.0, 1.0};
      } else if (metric == "waveguide") {
        s.theta0 = {0.0, 0.0, 1.0};
        s.theta1 = {0.0, 0.0, -1.0};
      } else {
        throw ConfigError("unknown metric '" + metric + "' (expected flat, sphere, landscape or waveguide)");
      }
      break;
  }
  return s;
}

std::string to_json_text(const RunSpec& s) {
  json j;
  j["experiment"] = to_string(s.experiment);
  j["seed"] = s.seed;

  json metric = json::object();
  if (s.experiment == ExperimentKind::kGeodesic) metric["name"] = s.metric;
  if (uses_terrain(s)) {
    metric["height"] = s.height;
    metric["frequency"] = s.frequency;
  }
  if (uses_field(s)) {
    metric["n0"] = s.field.n0;
    metric["n1"] = s.field.n1;
    metric["epsilon"] = s.field.epsilon;
    metric["radius"] = s.field.radius;
    metric["tau"] = s.field.tau;
    metric["axis_samples"] = s.field.axis_samples;
  }
  if (s.experiment == ExperimentKind::kBar) {
    metric["u0"] = s.u0;
    metric["u1"] = s.u1;
    metric["x_points"] = s.x_points;
  }
  j["metric"] = metric;

  json arch;
  arch["kind"] = experiments::to_string(s.network);
  arch["hidden"] = s.hidden;
  if (s.network == experiments::NetworkKind::kSiren) arch["omega0"] = s.omega0;
  if (s.network == experiments::NetworkKind::kFourier) {
    arch["fourier_features"] = s.fourier_features;
    arch["fourier_variance"] = s.fourier_variance;
  }
  if (s.experiment == ExperimentKind::kBar) arch["displacement_hidden"] = s.displacement_hidden;
  j["arch"] = arch;

  json train;
  train["epochs"] = s.train.epochs;
  train["learning_rate"] = s.train.learning_rate;
  train["grid_points"] = s.train.grid_points;
  train["adam_beta1"] = s.train.adam_beta1;
  train["adam_beta2"] = s.train.adam_beta2;
  train["adam_eps"] = s.train.adam_eps;
  train["divergence_limit"] = s.train.divergence_limit;
  j["train"] = train;

  if (s.experiment == ExperimentKind::kBar) {
    json fit;
    fit["learning_rate"] = s.fit.learning_rate;
    fit["max_epochs"] = s.fit.max_epochs;
    fit["stop_mse"] = s.fit.stop_mse;
    fit["tolerance"] = s.fit.tolerance;
    j["fit"] = fit;
  } else {
    j["endpoints"] = {{"theta0", s.theta0}, {"theta1", s.theta1}};
  }
  return j.dump(2) + "\n";
}

RunSpec parse_spec(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  Section root(doc, "");
  std::string experiment;
  root.read("experiment", experiment);
  if (experiment.empty()) throw ConfigError("config must name an 'experiment'");
  const ExperimentKind kind = experiment_kind_from_string(experiment);

  std::string metric_name = "sphere";
  if (kind == ExperimentKind::kGeodesic && doc.contains("metric") && doc["metric"].is_object() &&
      doc["metric"].contains("name")) {
    if (!doc["metric"]["name"].is_string()) throw ConfigError("'metric.name' has the wrong type");
    metric_name = doc["metric"]["name"].get<std::string>();
  }
  RunSpec s = default_spec(kind, metric_name);
  root.read("seed", s.seed);

  if (root.has("metric")) {
    Section m = root.child("metric");
    if (kind == ExperimentKind::kGeodesic) m.read("name", s.metric);
    if (uses_terrain(s)) {
      m.read("height", s.height);
      m.read("frequency", s.frequency);
    }
    if (uses_field(s)) {
      m.read("n0", s.field.n0);
      m.read("n1", s.field.n1);
      m.read("epsilon", s.field.epsilon);
      m.read("radius", s.field.radius);
      m.read("tau", s.field.tau);
      m.read("axis_samples", s.field.axis_samples);
    }
    if (kind == ExperimentKind::kBar) {
      m.read("u0", s.u0);
      m.read("u1", s.u1);
      m.read("x_points", s.x_points);
    }
    m.finish();
  }
  if (root.has("arch")) {
    Section a = root.child("arch");
    std::string net = experiments::to_string(s.network);
    a.read("kind", net);
    s.network = experiments::network_kind_from_string(net);
    a.read("hidden", s.hidden);
    if (s.network == experiments::NetworkKind::kSiren) a.read("omega0", s.omega0);
    if (s.network == experiments::NetworkKind::kFourier) {
      a.read("fourier_features", s.fourier_features);
      a.read("fourier_variance", s.fourier_variance);
    }
    if (kind == ExperimentKind::kBar) a.read("displacement_hidden", s.displacement_hidden);
    a.finish();
  }
  if (root.has("train")) {
    Section t = root.child("train");
    t.read("epochs", s.train.epochs);
    t.read("learning_rate", s.train.learning_rate);
    t.read("grid_points", s.train.grid_points);
    t.read("adam_beta1", s.train.adam_beta1);
    t.read("adam_beta2", s.train.adam_beta2);
    t.read("adam_eps", s.train.adam_eps);
    t.read("divergence_limit", s.train.divergence_limit);
    t.finish();
  }
  if (kind == ExperimentKind::kBar && root.has("fit")) {
    Section f = root.child("fit");
    f.read("learning_rate", s.fit.learning_rate);
    f.read("max_epochs", s.fit.max_epochs);
    f.read("stop_mse", s.fit.stop_mse);
    f.read("tolerance", s.fit.tolerance);
    f.finish();
  }
  if (kind != ExperimentKind::kBar && root.has("endpoints")) {
    Section e = root.child("endpoints");
    e.read("theta0", s.theta0);
    e.read("theta1", s.theta1);
    e.finish();
  }
  root.finish();
  validate(s);
  return s;
}

void validate(const RunSpec& s) {
  s.train.validate();
  for (std::size_t w : s.hidden)
    if (w == 0) throw ConfigError("hidden widths must be positive");
  if (s.hidden.empty()) throw ConfigError("at least one hidden layer is required");
  if (s.experiment == ExperimentKind::kBar) {
    if (s.network != experiments::NetworkKind::kMlp) throw ConfigError("the bar path network must be an mlp");
    experiments::bar_profile(s.u0);
    experiments::bar_profile(s.u1);
    if (s.x_points < 2) throw ConfigError("metric.x_points must be at least 2");
    return;
  }
  std::size_t dim = 2;
  if (uses_field(s)) dim = 3;
  if (s.experiment == ExperimentKind::kGeodesic && s.metric != "flat" && s.metric != "sphere" &&
      s.metric != "landscape" && s.metric != "waveguide") {
    throw ConfigError("unknown metric '" + s.metric + "'");
  }
  if (s.theta0.size() != dim || s.theta1.size() != dim) {
    throw ConfigError("endpoints must have dimension " + std::to_string(dim) + " for metric '" + s.metric + "'");
  }
  if (s.network == experiments::NetworkKind::kFourier && (s.fourier_features == 0 || s.fourier_features % 2 != 0)) {
    throw ConfigError("arch.fourier_features must be a positive even number");
  }
}

experiments::LandscapeConfig landscape_config(const RunSpec& s) {
  experiments::LandscapeConfig c;
  c.height = s.height;
  c.frequency = s.frequency;
  c.theta0 = s.theta0;
  c.theta1 = s.theta1;
  c.hidden = s.hidden;
  c.train = s.train;
  c.train.seed = s.seed;
  return c;
}

experiments::WaveguideConfig waveguide_config(const RunSpec& s) {
  experiments::WaveguideConfig c;
  c.network = s.network;
  c.hidden = s.hidden;
  c.fourier_features = s.fourier_features;
  c.fourier_variance = s.fourier_variance;
  c.omega0 = s.omega0;
  c.field = s.field;
  c.theta0 = s.theta0;
  c.theta1 = s.theta1;
  c.train = s.train;
  c.train.seed = s.seed;
  return c;
}

experiments::BarConfig bar_config(const RunSpec& s) {
  experiments::BarConfig c;
  c.u0 = s.u0;
  c.u1 = s.u1;
  c.displacement_hidden = s.displacement_hidden;
  c.path_hidden = s.hidden;
  c.x_points = s.x_points;
  c.fit = s.fit;
  c.train = s.train;
  c.train.seed = s.seed;
  return c;
}

}  // namespace ritz::cli
