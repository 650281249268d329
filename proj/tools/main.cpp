#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "experiment_config.hpp"
#include "experiment_runner.hpp"

namespace {

void print_report(const diffnet::experiment::ValidationReport& report) {
  for (const auto& error : report.errors) {
    std::fprintf(stderr, "error: %s\n", error.c_str());
  }
  for (const auto& warning : report.warnings) {
    std::fprintf(stderr, "warning: %s\n", warning.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace diffnet::experiment;

  CLI::App app{"Sparse diffusion LMS simulator and analysis toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  int threads = -1;

  auto* run_cmd = app.add_subcommand("run", "Run an experiment config");
  run_cmd->add_option("config", config_path, "JSON experiment config")->required();
  run_cmd->add_option("--output-dir", output_dir,
                      "Override the configured output directory");
  run_cmd->add_option("--threads", threads, "Monte-Carlo worker count");

  auto* validate_cmd =
      app.add_subcommand("validate", "Validate a config without running it");
  validate_cmd->add_option("config", config_path, "JSON experiment config")
      ->required();

  CLI11_PARSE(app, argc, argv);

  ValidationReport report;
  ExperimentConfig config = load_config(config_path, report);
  if (report.ok()) validate_config(config, report);

  if (app.got_subcommand(validate_cmd)) {
    print_report(report);
    std::printf("%s: %s (%zu error(s), %zu warning(s))\n", config_path.c_str(),
                report.ok() ? "valid" : "invalid", report.errors.size(),
                report.warnings.size());
    return report.ok() ? 0 : 1;
  }

  if (!report.ok()) {
    print_report(report);
    std::fprintf(stderr, "%s: invalid config\n", config_path.c_str());
    return 1;
  }
  print_report(report);  // surfaces warnings before a long run

  if (!output_dir.empty()) config.output_dir = output_dir;
  if (threads >= 0) config.threads = threads;

  try {
    const ExperimentOutcome outcome = run_experiment(config);
    for (const auto& message : outcome.messages) {
      std::printf("%s\n", message.c_str());
    }
    for (const auto& file : outcome.files) {
      std::printf("wrote %s/%s\n", outcome.output_dir.c_str(), file.c_str());
    }
    return outcome.ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
