#pragma once

#include <string>
#include <vector>

#include "experiment_config.hpp"

namespace diffnet::experiment {

struct ExperimentOutcome {
  bool ok = false;
  std::string output_dir;             // resolved (env override applied)
  std::vector<std::string> messages;  // human-readable progress/summary lines
  std::vector<std::string> files;     // artifacts written, relative to output_dir
};

// Executes the configured scenario and writes the CSV/SVG artifacts.
// Divergences are recorded in summary.csv, not treated as failures.
// DIFFNET_OUTPUT_DIR overrides config.output_dir when set.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

}  // namespace diffnet::experiment
