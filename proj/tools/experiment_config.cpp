#include "experiment_config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "diffnet/analysis.hpp"
#include "diffnet/rng.hpp"

namespace diffnet::experiment {
namespace {

using nlohmann::json;

constexpr std::uint64_t kProfileSalt = 0x70726F66ULL;
constexpr std::uint64_t kTruthSalt = 0x74727574ULL;
constexpr std::uint64_t kTopologySalt = 0x746F706FULL;

class FieldErrors {
 public:
  explicit FieldErrors(ValidationReport& report) : report_(&report) {}
  void add(const std::string& field, const std::string& message) {
    report_->errors.push_back(field + ": " + message);
  }
  ValidationReport* report_;
};

template <typename T>
bool read_field(const json& j, const std::string& key, T& out,
                FieldErrors& errors, const std::string& prefix) {
  if (!j.contains(key)) return false;
  try {
    out = j.at(key).get<T>();
    return true;
  } catch (const json::exception& e) {
    errors.add(prefix + key, e.what());
    return false;
  }
}

bool parse_scenario(const std::string& text, Scenario& out) {
  if (text == "tracking_example1") out = Scenario::TrackingExample1;
  else if (text == "tracking_example2") out = Scenario::TrackingExample2;
  else if (text == "gamma_sweep") out = Scenario::GammaSweep;
  else if (text == "eta_sensitivity") out = Scenario::EtaSensitivity;
  else if (text == "theory_vs_sim") out = Scenario::TheoryVsSim;
  else if (text == "custom") out = Scenario::Custom;
  else return false;
  return true;
}

FieldSpec parse_field(const json& j, const std::string& path, FieldErrors& errors) {
  FieldSpec field;
  if (j.is_number()) {
    field.kind = FieldSpec::Kind::Scalar;
    field.value = j.get<double>();
  } else if (j.is_array()) {
    field.kind = FieldSpec::Kind::PerNode;
    field.values = j.get<std::vector<double>>();
  } else if (j.is_object() && j.contains("low") && j.contains("high")) {
    field.kind = FieldSpec::Kind::Range;
    field.low = j.at("low").get<double>();
    field.high = j.at("high").get<double>();
  } else {
    errors.add(path, "expected a number, an array, or {low, high}");
  }
  return field;
}

Eigen::VectorXd resolve_field(const FieldSpec& field, int n, CounterRng& rng) {
  Eigen::VectorXd out(n);
  switch (field.kind) {
    case FieldSpec::Kind::Scalar:
      out.setConstant(field.value);
      break;
    case FieldSpec::Kind::PerNode:
      for (int k = 0; k < n; ++k) out[k] = field.values.at(k);
      break;
    case FieldSpec::Kind::Range:
      for (int k = 0; k < n; ++k) out[k] = rng.next_range(field.low, field.high);
      break;
  }
  return out;
}

void check_field(const FieldSpec& field, const std::string& path, int n,
                 double min_exclusive, ValidationReport& report) {
  FieldErrors errors(report);
  auto check_value = [&](double v) {
    if (!(v > min_exclusive) && !(min_exclusive < 0.0 && v == 0.0)) {
      std::ostringstream msg;
      msg << "value " << v << " must be > " << min_exclusive;
      errors.add(path, msg.str());
    }
  };
  switch (field.kind) {
    case FieldSpec::Kind::Scalar:
      check_value(field.value);
      break;
    case FieldSpec::Kind::PerNode:
      if (static_cast<int>(field.values.size()) != n) {
        errors.add(path, "needs exactly one value per node");
        return;
      }
      for (double v : field.values) check_value(v);
      break;
    case FieldSpec::Kind::Range:
      check_value(field.low);
      if (field.high < field.low) errors.add(path, "high must be >= low");
      break;
  }
}

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::TrackingExample1: return "tracking_example1";
    case Scenario::TrackingExample2: return "tracking_example2";
    case Scenario::GammaSweep: return "gamma_sweep";
    case Scenario::EtaSensitivity: return "eta_sensitivity";
    case Scenario::TheoryVsSim: return "theory_vs_sim";
    case Scenario::Custom: return "custom";
  }
  return "?";
}

EngineConfig AlgorithmSpec::engine(long horizon) const {
  EngineConfig config;
  config.mode = mode;
  config.cooperation = cooperation;
  config.regularizer = regularizer;
  config.gamma_mode = gamma_mode;
  config.gamma = gamma;
  config.eta = eta;
  config.eta_source = eta_source;
  config.adaptive_scope = adaptive_scope;
  config.horizon = horizon;
  return config;
}

ExperimentConfig load_config(const std::string& path, ValidationReport& report) {
  ExperimentConfig config;
  config.source_path = path;
  FieldErrors errors(report);

  std::ifstream in(path);
  if (!in) {
    errors.add("(file)", "cannot open " + path);
    return config;
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    errors.add("(parse)", e.what());  // includes byte position
    return config;
  }

  std::string scenario_text = "custom";
  read_field(doc, "scenario", scenario_text, errors, "");
  if (!parse_scenario(scenario_text, config.scenario)) {
    errors.add("scenario", "unknown scenario '" + scenario_text + "'");
  }
  read_field(doc, "seed", config.seed, errors, "");
  read_field(doc, "runs", config.runs, errors, "");
  read_field(doc, "horizon", config.horizon, errors, "");
  read_field(doc, "steady_window", config.steady_window, errors, "");
  read_field(doc, "threads", config.threads, errors, "");
  read_field(doc, "output_dir", config.output_dir, errors, "");
  read_field(doc, "dimension", config.dimension, errors, "");

  if (doc.contains("topology")) {
    const json& t = doc.at("topology");
    read_field(t, "type", config.topology.type, errors, "topology.");
    read_field(t, "nodes", config.topology.nodes, errors, "topology.");
    read_field(t, "radius", config.topology.radius, errors, "topology.");
    read_field(t, "path", config.topology.path, errors, "topology.");
    if (t.contains("edges")) {
      try {
        for (const auto& e : t.at("edges")) {
          config.topology.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        }
      } catch (const json::exception& e) {
        errors.add("topology.edges", e.what());
      }
    }
  } else {
    errors.add("topology", "missing");
  }

  if (doc.contains("profiles")) {
    const json& p = doc.at("profiles");
    if (p.contains("step_size"))
      config.profiles.step_size = parse_field(p.at("step_size"), "profiles.step_size", errors);
    else
      errors.add("profiles.step_size", "missing");
    if (p.contains("regressor_variance"))
      config.profiles.regressor_variance =
          parse_field(p.at("regressor_variance"), "profiles.regressor_variance", errors);
    else
      errors.add("profiles.regressor_variance", "missing");
    if (p.contains("noise_variance"))
      config.profiles.noise_variance =
          parse_field(p.at("noise_variance"), "profiles.noise_variance", errors);
    else
      errors.add("profiles.noise_variance", "missing");
  } else {
    errors.add("profiles", "missing");
  }

  if (doc.contains("truth") && doc.at("truth").contains("segments")) {
    std::size_t index = 0;
    for (const auto& s : doc.at("truth").at("segments")) {
      const std::string prefix = "truth.segments[" + std::to_string(index) + "].";
      TruthSegmentSpec segment;
      read_field(s, "start", segment.start, errors, prefix);
      read_field(s, "support", segment.support, errors, prefix);
      read_field(s, "value", segment.value, errors, prefix);
      read_field(s, "values", segment.explicit_values, errors, prefix);
      if (segment.support < 0 && segment.explicit_values.empty()) {
        errors.add(prefix + "support", "segment needs 'support' or 'values'");
      }
      config.truth.push_back(std::move(segment));
      ++index;
    }
  } else {
    errors.add("truth.segments", "missing");
  }

  if (doc.contains("algorithms")) {
    std::size_t index = 0;
    for (const auto& a : doc.at("algorithms")) {
      const std::string prefix = "algorithms[" + std::to_string(index) + "].";
      AlgorithmSpec algo;
      if (!read_field(a, "label", algo.label, errors, prefix)) {
        errors.add(prefix + "label", "missing");
      }
      std::string text = "atc";
      read_field(a, "mode", text, errors, prefix);
      if (text == "atc") algo.mode = DiffusionMode::Atc;
      else if (text == "cta") algo.mode = DiffusionMode::Cta;
      else errors.add(prefix + "mode", "expected 'atc' or 'cta'");

      text = "no_measurement_exchange";
      read_field(a, "cooperation", text, errors, prefix);
      if (text == "full") algo.cooperation = Cooperation::Full;
      else if (text == "no_measurement_exchange")
        algo.cooperation = Cooperation::NoMeasurementExchange;
      else if (text == "non_cooperative")
        algo.cooperation = Cooperation::NonCooperative;
      else errors.add(prefix + "cooperation", "unknown mode '" + text + "'");

      text = "none";
      read_field(a, "regularizer", text, errors, prefix);
      if (text == "none") {
        algo.regularizer = RegularizerSpec::none();
      } else if (text == "za") {
        algo.regularizer = RegularizerSpec::l1();
      } else if (text == "rza") {
        double epsilon = 0.0;
        if (!read_field(a, "epsilon", epsilon, errors, prefix) || !(epsilon > 0.0)) {
          errors.add(prefix + "epsilon", "rza needs epsilon > 0");
        } else {
          algo.regularizer = RegularizerSpec::reweighted_l1(epsilon);
        }
      } else {
        errors.add(prefix + "regularizer", "expected 'none' | 'za' | 'rza'");
      }

      text = "fixed";
      read_field(a, "gamma_mode", text, errors, prefix);
      if (text == "fixed") {
        algo.gamma_mode = GammaMode::Fixed;
        read_field(a, "gamma", algo.gamma, errors, prefix);
        if (algo.gamma < 0.0) errors.add(prefix + "gamma", "must be >= 0");
      } else if (text == "adaptive") {
        algo.gamma_mode = GammaMode::Adaptive;
        std::string eta_text = "truth_l1";
        read_field(a, "eta_source", eta_text, errors, prefix);
        if (eta_text == "constant") algo.eta_source = EtaSource::Constant;
        else if (eta_text == "truth_l1") algo.eta_source = EtaSource::TruthL1;
        else errors.add(prefix + "eta_source", "expected 'constant' | 'truth_l1'");
        algo.eta = algo.eta_source == EtaSource::TruthL1 ? 1.0 : 0.0;
        read_field(a, "eta", algo.eta, errors, prefix);
        if (algo.eta < 0.0) errors.add(prefix + "eta", "must be >= 0");
        std::string scope_text = "local";
        read_field(a, "adaptive_scope", scope_text, errors, prefix);
        if (scope_text == "local") algo.adaptive_scope = AdaptiveScope::Local;
        else if (scope_text == "network") algo.adaptive_scope = AdaptiveScope::Network;
        else errors.add(prefix + "adaptive_scope", "expected 'local' | 'network'");
      } else {
        errors.add(prefix + "gamma_mode", "expected 'fixed' or 'adaptive'");
      }
      config.algorithms.push_back(std::move(algo));
      ++index;
    }
  }

  if (doc.contains("gamma_sweep")) {
    const json& g = doc.at("gamma_sweep");
    GammaSweepSpec sweep;
    read_field(g, "grid", sweep.grid, errors, "gamma_sweep.");
    read_field(g, "support_sizes", sweep.support_sizes, errors, "gamma_sweep.");
    read_field(g, "algorithm", sweep.algorithm, errors, "gamma_sweep.");
    config.gamma_sweep = std::move(sweep);
  }
  if (doc.contains("eta_sensitivity")) {
    EtaSensitivitySpec spec;
    read_field(doc.at("eta_sensitivity"), "factors", spec.factors, errors,
               "eta_sensitivity.");
    config.eta_sensitivity = std::move(spec);
  }
  return config;
}

void validate_config(const ExperimentConfig& config, ValidationReport& report) {
  FieldErrors errors(report);
  if (config.runs < 1) errors.add("runs", "must be >= 1");
  if (config.horizon < 1) errors.add("horizon", "must be >= 1");
  if (config.dimension < 1) errors.add("dimension", "must be >= 1");
  if (config.steady_window < 1 || config.steady_window > config.horizon) {
    errors.add("steady_window", "must lie in [1, horizon]");
  }

  const auto& topo = config.topology;
  int nodes = topo.nodes;
  if (topo.type == "edge_list_file") {
    if (topo.path.empty()) {
      errors.add("topology.path", "edge_list_file needs a path");
    } else if (!std::filesystem::exists(topo.path)) {
      errors.add("topology.path", "file does not exist: " + topo.path);
    } else {
      try {
        nodes = Topology::load(topo.path).num_nodes();
      } catch (const std::exception& e) {
        errors.add("topology.path", e.what());
      }
    }
  } else if (topo.type == "random_geometric" || topo.type == "complete" ||
             topo.type == "ring" || topo.type == "line" || topo.type == "edges") {
    if (topo.nodes < 1) errors.add("topology.nodes", "must be >= 1");
    if (topo.type == "random_geometric" && !(topo.radius > 0.0)) {
      errors.add("topology.radius", "must be > 0");
    }
    if (topo.type == "edges") {
      for (const auto& [a, b] : topo.edges) {
        if (a < 0 || b < 0 || a >= topo.nodes || b >= topo.nodes) {
          errors.add("topology.edges", "endpoint out of range");
          break;
        }
      }
    }
  } else {
    errors.add("topology.type", "unknown type '" + topo.type + "'");
  }

  if (nodes >= 1) {
    check_field(config.profiles.step_size, "profiles.step_size", nodes, 0.0, report);
    check_field(config.profiles.regressor_variance, "profiles.regressor_variance",
                nodes, 0.0, report);
    check_field(config.profiles.noise_variance, "profiles.noise_variance", nodes,
                -1.0, report);
  }

  long previous_start = -1;
  for (std::size_t s = 0; s < config.truth.size(); ++s) {
    const auto& segment = config.truth[s];
    const std::string prefix = "truth.segments[" + std::to_string(s) + "].";
    if (s == 0 && segment.start != 0) errors.add(prefix + "start", "first segment must start at 0");
    if (segment.start <= previous_start) {
      errors.add(prefix + "start", "starts must be strictly increasing");
    }
    previous_start = segment.start;
    if (!segment.explicit_values.empty()) {
      if (static_cast<int>(segment.explicit_values.size()) != config.dimension) {
        errors.add(prefix + "values", "length must equal dimension");
      }
    } else if (segment.support < 0 || segment.support > config.dimension) {
      errors.add(prefix + "support", "must lie in [0, dimension]");
    }
  }
  if (config.truth.empty()) errors.add("truth.segments", "needs at least one segment");

  if (config.algorithms.empty()) errors.add("algorithms", "needs at least one entry");

  if (config.scenario == Scenario::GammaSweep) {
    if (!config.gamma_sweep) {
      errors.add("gamma_sweep", "required for the gamma_sweep scenario");
    } else {
      if (config.gamma_sweep->grid.empty()) errors.add("gamma_sweep.grid", "empty");
      if (config.gamma_sweep->support_sizes.empty()) {
        errors.add("gamma_sweep.support_sizes", "empty");
      }
      if (config.gamma_sweep->algorithm >= config.algorithms.size()) {
        errors.add("gamma_sweep.algorithm", "index out of range");
      }
    }
  }
  if (config.scenario == Scenario::EtaSensitivity) {
    if (!config.eta_sensitivity || config.eta_sensitivity->factors.empty()) {
      errors.add("eta_sensitivity.factors", "required for the eta_sensitivity scenario");
    }
    bool any_adaptive = false;
    for (const auto& algo : config.algorithms) {
      any_adaptive |= algo.gamma_mode == GammaMode::Adaptive;
    }
    if (!any_adaptive) {
      errors.add("algorithms", "eta_sensitivity needs at least one adaptive entry");
    }
  }

  // step sizes against the Theorem-1 bound (warning, not an error)
  if (report.ok()) {
    try {
      const MaterializedInputs inputs = materialize(config);
      const auto check = validate_combiners(inputs.mats, inputs.topology);
      if (!check.ok()) {
        errors.add("topology", "combiner validation failed: " + check.summary());
      }
      const MomentSet moments = build_moments(
          inputs.topology, inputs.mats, inputs.profiles, config.dimension);
      const Eigen::VectorXd bounds = step_size_bounds(moments);
      for (int k = 0; k < inputs.topology.num_nodes(); ++k) {
        if (inputs.profiles[k].step_size >= bounds[k]) {
          std::ostringstream msg;
          msg << "profiles.step_size: node " << k << " uses mu = "
              << inputs.profiles[k].step_size
              << ", at or above the mean-stability bound " << bounds[k];
          report.warnings.push_back(msg.str());
        }
      }
    } catch (const std::exception& e) {
      errors.add("(materialize)", e.what());
    }
  }
}

MaterializedInputs materialize(const ExperimentConfig& config) {
  const auto& spec = config.topology;
  auto build_topology = [&]() -> Topology {
    if (spec.type == "edge_list_file") return Topology::load(spec.path);
    if (spec.type == "edges") return Topology::from_edges(spec.nodes, spec.edges);
    if (spec.type == "complete") return Topology::complete(spec.nodes);
    if (spec.type == "ring") return Topology::ring(spec.nodes);
    if (spec.type == "line") return Topology::line(spec.nodes);
    if (spec.type == "random_geometric") {
      return Topology::random_geometric(spec.nodes, spec.radius,
                                        fold(config.seed, kTopologySalt));
    }
    throw std::invalid_argument("topology.type: unknown type '" + spec.type + "'");
  };
  Topology topology = build_topology();
  const int n = topology.num_nodes();

  CounterRng profile_rng(fold(config.seed, kProfileSalt));
  const Eigen::VectorXd mu = resolve_field(config.profiles.step_size, n, profile_rng);
  const Eigen::VectorXd su2 =
      resolve_field(config.profiles.regressor_variance, n, profile_rng);
  const Eigen::VectorXd sv2 =
      resolve_field(config.profiles.noise_variance, n, profile_rng);
  std::vector<NodeProfile> profiles(n);
  for (int k = 0; k < n; ++k) profiles[k] = {su2[k], sv2[k], mu[k]};

  std::vector<GroundTruthSchedule::Segment> segments;
  CounterRng truth_rng(fold(config.seed, kTruthSalt));
  for (const auto& s : config.truth) {
    GroundTruthSchedule::Segment segment;
    segment.start = s.start;
    if (!s.explicit_values.empty()) {
      segment.w = Eigen::Map<const Eigen::VectorXd>(
          s.explicit_values.data(), static_cast<long>(s.explicit_values.size()));
    } else {
      segment.w = make_sparse_truth(config.dimension, s.support, s.value, truth_rng);
    }
    segments.push_back(std::move(segment));
  }

  CombinationMatrices mats = build_uniform_combiners(topology, true);
  return MaterializedInputs{std::move(topology), std::move(mats),
                            std::move(profiles),
                            GroundTruthSchedule(config.dimension, segments)};
}

}  // namespace diffnet::experiment
