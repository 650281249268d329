#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "diffnet/engine.hpp"
#include "diffnet/signal.hpp"
#include "diffnet/topology.hpp"

namespace diffnet::experiment {

enum class Scenario {
  TrackingExample1,
  TrackingExample2,
  GammaSweep,
  EtaSensitivity,
  TheoryVsSim,
  Custom,
};

std::string to_string(Scenario s);

struct TopologySpec {
  std::string type = "random_geometric";  // | edge_list_file | edges | complete | ring | line
  int nodes = 0;
  double radius = 0.4;
  std::string path;                        // edge_list_file
  std::vector<std::pair<int, int>> edges;  // inline edges
};

// A per-node scalar field: one shared value, one value per node, or a
// seeded uniform range {low, high}.
struct FieldSpec {
  enum class Kind { Scalar, PerNode, Range } kind = Kind::Scalar;
  double value = 0.0;
  std::vector<double> values;
  double low = 0.0, high = 0.0;
};

struct ProfilesSpec {
  FieldSpec step_size;
  FieldSpec regressor_variance;
  FieldSpec noise_variance;
};

struct TruthSegmentSpec {
  long start = 0;
  int support = -1;     // entries set to `value` at random positions
  double value = 1.0;
  std::vector<double> explicit_values;  // overrides support/value when set
};

struct AlgorithmSpec {
  std::string label;
  DiffusionMode mode = DiffusionMode::Atc;
  Cooperation cooperation = Cooperation::NoMeasurementExchange;
  RegularizerSpec regularizer;
  GammaMode gamma_mode = GammaMode::Fixed;
  double gamma = 0.0;
  double eta = 1.0;  // constant trigger, or scale on ||w^o||_1
  EtaSource eta_source = EtaSource::Constant;
  AdaptiveScope adaptive_scope = AdaptiveScope::Local;

  EngineConfig engine(long horizon) const;
};

struct GammaSweepSpec {
  std::vector<double> grid;
  std::vector<int> support_sizes;
  std::size_t algorithm = 0;  // index into algorithms; swept against gamma=0
};

struct EtaSensitivitySpec {
  std::vector<double> factors;  // multiplicative error on the true trigger
};

struct ExperimentConfig {
  Scenario scenario = Scenario::Custom;
  std::uint64_t seed = 1;
  int runs = 1;
  long horizon = 1;
  long steady_window = 100;
  int threads = 0;
  std::string output_dir = "out";
  int dimension = 1;
  TopologySpec topology;
  ProfilesSpec profiles;
  std::vector<TruthSegmentSpec> truth;
  std::vector<AlgorithmSpec> algorithms;
  std::optional<GammaSweepSpec> gamma_sweep;
  std::optional<EtaSensitivitySpec> eta_sensitivity;

  // path of the file this config was loaded from (for relative lookups)
  std::string source_path;
};

struct ValidationReport {
  std::vector<std::string> errors;    // field-qualified messages
  std::vector<std::string> warnings;  // e.g. step sizes above the mean bound
  bool ok() const { return errors.empty(); }
};

// Parses the JSON document; structural problems (unknown enum values,
// wrong types) surface as errors in the report, and the returned config
// is only meaningful when report.ok().
ExperimentConfig load_config(const std::string& path, ValidationReport& report);

// Semantic validation: dimensions, ranges, stochasticity of the built
// combiners, step sizes against the mean-stability bound (warning).
void validate_config(const ExperimentConfig& config, ValidationReport& report);

// Concrete inputs materialized from the config (seeded, reproducible).
struct MaterializedInputs {
  Topology topology;
  CombinationMatrices mats;  // with data exchange; engine applies cooperation
  std::vector<NodeProfile> profiles;
  GroundTruthSchedule truth;
};

MaterializedInputs materialize(const ExperimentConfig& config);

}  // namespace diffnet::experiment
