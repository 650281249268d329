#include "experiment_runner.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "diffnet/analysis.hpp"
#include "diffnet/metrics.hpp"
#include "svg_plot.hpp"
#include "table_io.hpp"

namespace diffnet::experiment {
namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kSweepTruthSalt = 0x73777065ULL;
constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

struct AlgorithmRun {
  AlgorithmSpec spec;
  MonteCarloResult mc;
  LearningCurve curve;  // averaged, linear scale
  SteadyStateStats steady{};
  bool usable = false;  // at least one run completed
};

AlgorithmRun execute(const AlgorithmSpec& spec, const ExperimentConfig& config,
                     const MaterializedInputs& inputs, long snapshot_start = -1) {
  AlgorithmRun out{spec, {}, {}, {}, false};
  EngineConfig engine = spec.engine(config.horizon);
  engine.snapshot_start = snapshot_start;
  out.mc = run_monte_carlo(engine, inputs.topology, inputs.mats, inputs.profiles,
                           inputs.truth, config.runs, config.seed, config.threads);
  out.curve = LearningCurve{spec.label, out.mc.average.msd};
  out.usable = !out.mc.average.msd.empty();
  if (out.usable) out.steady = steady_state(out.curve, config.steady_window);
  return out;
}

std::vector<double> curve_db(const std::vector<double>& linear) {
  std::vector<double> db(linear.size());
  for (std::size_t i = 0; i < linear.size(); ++i) db[i] = to_db(linear[i]);
  return db;
}

std::vector<double> iterations(long horizon) {
  std::vector<double> x(horizon);
  for (long i = 0; i < horizon; ++i) x[i] = static_cast<double>(i);
  return x;
}

void write_curves(const fs::path& dir, const std::vector<AlgorithmRun>& runs,
                  long horizon, ExperimentOutcome& outcome) {
  std::vector<std::string> header{"iteration"};
  for (const auto& run : runs) header.push_back(run.spec.label);
  CsvWriter csv(header);
  for (long i = 0; i < horizon; ++i) {
    std::vector<double> row{static_cast<double>(i)};
    for (const auto& run : runs) {
      row.push_back(run.usable ? run.mc.average.msd[i] : kMissing);
    }
    csv.add_row(row);
  }
  csv.write((dir / "curves.csv").string());
  outcome.files.push_back("curves.csv");

  PlotSpec plot{"Network MSD", "iteration", "MSD [dB]", {}};
  const auto x = iterations(horizon);
  for (const auto& run : runs) {
    if (!run.usable) continue;
    plot.series.push_back({run.spec.label, x, curve_db(run.mc.average.msd)});
  }
  write_line_plot((dir / "curves.svg").string(), plot);
  outcome.files.push_back("curves.svg");
}

void write_summary(const fs::path& dir, const std::vector<AlgorithmRun>& runs,
                   const ExperimentConfig& config, ExperimentOutcome& outcome) {
  CsvWriter csv({"label", "steady_msd_linear", "steady_msd_db", "diverged_runs",
                 "runs", "window_len"});
  for (const auto& run : runs) {
    csv.add_row(run.spec.label,
                {run.usable ? run.steady.mean_msd_linear : kMissing,
                 run.usable ? run.steady.mean_msd_db : kMissing,
                 static_cast<double>(run.mc.diverged_runs),
                 static_cast<double>(config.runs),
                 static_cast<double>(config.steady_window)});
  }
  csv.write((dir / "summary.csv").string());
  outcome.files.push_back("summary.csv");
}

void write_gamma_trace(const fs::path& dir, const std::vector<AlgorithmRun>& runs,
                       long horizon, ExperimentOutcome& outcome) {
  std::vector<const AlgorithmRun*> adaptive;
  for (const auto& run : runs) {
    if (run.spec.gamma_mode == GammaMode::Adaptive) adaptive.push_back(&run);
  }
  if (adaptive.empty()) return;

  std::vector<std::string> header{"iteration"};
  for (const auto* run : adaptive) header.push_back(run->spec.label);
  CsvWriter csv(header);
  for (long i = 0; i < horizon; ++i) {
    std::vector<double> row{static_cast<double>(i)};
    for (const auto* run : adaptive) {
      row.push_back(run->usable ? run->mc.average.gamma_mean[i] : kMissing);
    }
    csv.add_row(row);
  }
  csv.write((dir / "gamma_trace.csv").string());
  outcome.files.push_back("gamma_trace.csv");

  PlotSpec plot{"Adaptive regularization parameter", "iteration", "mean gamma", {}};
  const auto x = iterations(horizon);
  for (const auto* run : adaptive) {
    if (!run->usable) continue;
    plot.series.push_back({run->spec.label, x, run->mc.average.gamma_mean});
  }
  write_line_plot((dir / "gamma_trace.svg").string(), plot);
  outcome.files.push_back("gamma_trace.svg");
}

void run_tracking(const ExperimentConfig& config, const MaterializedInputs& inputs,
                  const fs::path& dir, ExperimentOutcome& outcome) {
  std::vector<AlgorithmRun> runs;
  for (const auto& spec : config.algorithms) {
    runs.push_back(execute(spec, config, inputs));
    const auto& run = runs.back();
    std::ostringstream msg;
    msg << run.spec.label << ": ";
    if (run.usable) {
      msg << "steady MSD " << format_double(run.steady.mean_msd_db) << " dB";
    } else {
      msg << "all runs diverged";
    }
    if (run.mc.diverged_runs > 0) msg << " (" << run.mc.diverged_runs << " diverged)";
    outcome.messages.push_back(msg.str());
  }
  write_curves(dir, runs, config.horizon, outcome);
  write_summary(dir, runs, config, outcome);
  write_gamma_trace(dir, runs, config.horizon, outcome);
}

void run_gamma_sweep(const ExperimentConfig& config,
                     const MaterializedInputs& base_inputs, const fs::path& dir,
                     ExperimentOutcome& outcome) {
  const GammaSweepSpec& sweep = *config.gamma_sweep;
  const AlgorithmSpec& swept = config.algorithms.at(sweep.algorithm);

  std::vector<std::string> header{"gamma"};
  for (int support : sweep.support_sizes) {
    header.push_back("support_" + std::to_string(support));
  }
  CsvWriter csv(header);
  std::vector<std::vector<double>> columns;  // per support, per gamma

  for (int support : sweep.support_sizes) {
    CounterRng truth_rng(fold(fold(config.seed, kSweepTruthSalt),
                              static_cast<std::uint64_t>(support)));
    const auto truth = GroundTruthSchedule::constant(
        make_sparse_truth(config.dimension, support, 1.0, truth_rng));
    MaterializedInputs inputs{base_inputs.topology, base_inputs.mats,
                              base_inputs.profiles, truth};

    AlgorithmSpec baseline = swept;
    baseline.label = swept.label + "-baseline";
    baseline.gamma_mode = GammaMode::Fixed;
    baseline.gamma = 0.0;
    const auto base_run = execute(baseline, config, inputs);

    std::vector<double> diffs;
    for (double gamma : sweep.grid) {
      AlgorithmSpec variant = swept;
      variant.gamma_mode = GammaMode::Fixed;
      variant.gamma = gamma;
      const auto run = execute(variant, config, inputs);
      if (run.usable && base_run.usable) {
        diffs.push_back(differential_msd(run.curve, base_run.curve,
                                         config.steady_window));
      } else {
        diffs.push_back(kMissing);
      }
    }
    columns.push_back(std::move(diffs));
  }

  PlotSpec plot{"Differential MSD vs sparsity parameter", "gamma",
                "differential MSD [dB]", {}};
  for (std::size_t g = 0; g < sweep.grid.size(); ++g) {
    std::vector<double> row{sweep.grid[g]};
    for (const auto& column : columns) row.push_back(column[g]);
    csv.add_row(row);
  }
  for (std::size_t s = 0; s < sweep.support_sizes.size(); ++s) {
    plot.series.push_back(
        {header[s + 1], sweep.grid, columns[s]});
  }
  csv.write((dir / "differential_msd.csv").string());
  outcome.files.push_back("differential_msd.csv");
  write_line_plot((dir / "differential_msd.svg").string(), plot);
  outcome.files.push_back("differential_msd.svg");
  outcome.messages.push_back("gamma sweep: " + std::to_string(sweep.grid.size()) +
                             " gamma values x " +
                             std::to_string(sweep.support_sizes.size()) +
                             " sparsity levels");
}

void run_eta_sensitivity(const ExperimentConfig& config,
                         const MaterializedInputs& inputs, const fs::path& dir,
                         ExperimentOutcome& outcome) {
  const auto& factors = config.eta_sensitivity->factors;
  std::vector<const AlgorithmSpec*> adaptive;
  for (const auto& algo : config.algorithms) {
    if (algo.gamma_mode == GammaMode::Adaptive) adaptive.push_back(&algo);
  }

  std::vector<std::string> header{"eta_factor"};
  for (const auto* algo : adaptive) header.push_back(algo->label + "_msd_db");
  CsvWriter csv(header);
  std::vector<std::vector<double>> columns(adaptive.size());

  for (double factor : factors) {
    std::vector<double> row{factor};
    for (std::size_t a = 0; a < adaptive.size(); ++a) {
      AlgorithmSpec scaled = *adaptive[a];
      scaled.eta *= factor;
      const auto run = execute(scaled, config, inputs);
      const double db = run.usable ? run.steady.mean_msd_db : kMissing;
      row.push_back(db);
      columns[a].push_back(db);
    }
    csv.add_row(row);
  }
  csv.write((dir / "eta_sensitivity.csv").string());
  outcome.files.push_back("eta_sensitivity.csv");

  PlotSpec plot{"Sensitivity to the trigger eta", "eta scaling factor",
                "steady-state MSD [dB]", {}};
  for (std::size_t a = 0; a < adaptive.size(); ++a) {
    plot.series.push_back({adaptive[a]->label, factors, columns[a]});
  }
  write_line_plot((dir / "eta_sensitivity.svg").string(), plot);
  outcome.files.push_back("eta_sensitivity.svg");
  outcome.messages.push_back("eta sensitivity: " + std::to_string(factors.size()) +
                             " factors");
}

void run_theory_vs_sim(const ExperimentConfig& config,
                       const MaterializedInputs& inputs, const fs::path& dir,
                       ExperimentOutcome& outcome) {
  const int n = inputs.topology.num_nodes();
  const int dim = config.dimension;

  // prediction for the first algorithm's cooperation mode at gamma = 0
  const AlgorithmSpec& reference = config.algorithms.front();
  const CombinationMatrices eff =
      effective_combiners(inputs.mats, reference.cooperation);
  const MomentSet moments = build_moments(inputs.topology, eff, inputs.profiles, dim);
  const PerformancePrediction pred = msd_predict(moments, eff);

  // empirical per-node MSD from steady-state snapshots of a gamma-free run
  AlgorithmSpec baseline = reference;
  baseline.gamma_mode = GammaMode::Fixed;
  baseline.gamma = 0.0;
  const long snapshot_start = config.horizon - config.steady_window;
  const auto run = execute(baseline, config, inputs, snapshot_start);

  Eigen::VectorXd empirical = Eigen::VectorXd::Zero(n);
  long count = 0;
  const Eigen::VectorXd& w_true = inputs.truth.active(config.horizon - 1);
  for (const auto& r : run.mc.runs) {
    if (r.diverged) continue;
    for (const auto& w : r.snapshots) {
      for (int k = 0; k < n; ++k) {
        empirical[k] += (w_true - w.segment(k * dim, dim)).squaredNorm();
      }
    }
    count += static_cast<long>(r.snapshots.size());
  }
  if (count > 0) empirical /= static_cast<double>(count);

  CsvWriter csv({"quantity", "predicted_linear", "predicted_db",
                 "empirical_linear", "empirical_db", "error_db"});
  std::vector<double> node_index(n), pred_db(n), emp_db(n);
  for (int k = 0; k < n; ++k) {
    const double p = pred.msd_node[k];
    const double e = count > 0 ? empirical[k] : kMissing;
    csv.add_row("node_" + std::to_string(k),
                {p, to_db(p), e, to_db(e), to_db(e) - to_db(p)});
    node_index[k] = k;
    pred_db[k] = to_db(p);
    emp_db[k] = to_db(e);
  }
  const double emp_net = count > 0 ? empirical.mean() : kMissing;
  csv.add_row("network", {pred.msd_network, to_db(pred.msd_network), emp_net,
                          to_db(emp_net), to_db(emp_net) - to_db(pred.msd_network)});
  csv.write((dir / "prediction.csv").string());
  outcome.files.push_back("prediction.csv");

  write_line_plot((dir / "prediction.svg").string(),
                  {"Theory vs simulation (steady-state MSD)", "node",
                   "MSD [dB]",
                   {{"predicted", node_index, pred_db},
                    {"simulated", node_index, emp_db}}});
  outcome.files.push_back("prediction.svg");

  std::ostringstream msg;
  msg << "network MSD: predicted " << format_double(to_db(pred.msd_network))
      << " dB, simulated " << format_double(to_db(emp_net)) << " dB";
  outcome.messages.push_back(msg.str());
  outcome.messages.push_back("delta = " + format_double(pred.delta) +
                             ", rho(F) = " + format_double(pred.rho_f));
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  ExperimentOutcome outcome;
  std::string out_dir = config.output_dir;
  if (const char* env = std::getenv("DIFFNET_OUTPUT_DIR")) {
    if (*env != '\0') out_dir = env;
  }
  outcome.output_dir = out_dir;

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  const MaterializedInputs inputs = materialize(config);

  switch (config.scenario) {
    case Scenario::TrackingExample1:
    case Scenario::TrackingExample2:
    case Scenario::Custom:
      run_tracking(config, inputs, dir, outcome);
      break;
    case Scenario::GammaSweep:
      run_gamma_sweep(config, inputs, dir, outcome);
      break;
    case Scenario::EtaSensitivity:
      run_eta_sensitivity(config, inputs, dir, outcome);
      break;
    case Scenario::TheoryVsSim:
      run_theory_vs_sim(config, inputs, dir, outcome);
      break;
  }
  outcome.ok = true;
  return outcome;
}

}  // namespace diffnet::experiment
