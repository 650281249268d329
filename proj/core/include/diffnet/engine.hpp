#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "diffnet/regularizer.hpp"
#include "diffnet/signal.hpp"
#include "diffnet/topology.hpp"

namespace diffnet {

enum class DiffusionMode { Atc, Cta };

// Full uses A and C as given; NoMeasurementExchange replaces C by I;
// NonCooperative replaces both by I (stand-alone filters).
enum class Cooperation { Full, NoMeasurementExchange, NonCooperative };

enum class GammaMode { Fixed, Adaptive };

// Neighborhood the adaptive rule sums over: the node's own neighborhood
// (default), or the whole network.
enum class AdaptiveScope { Local, Network };

// Source of the trigger bound eta used by the adaptive rule. TruthL1
// tracks ||w^o(i)||_1 through the schedule (scaled by eta); Constant uses
// eta as-is.
enum class EtaSource { Constant, TruthL1 };

struct EngineConfig {
  DiffusionMode mode = DiffusionMode::Atc;
  Cooperation cooperation = Cooperation::Full;
  RegularizerSpec regularizer;
  GammaMode gamma_mode = GammaMode::Fixed;
  double gamma = 0.0;  // fixed-mode regularization weight, >= 0
  double eta = 0.0;    // adaptive-mode trigger (Constant) or scale (TruthL1)
  EtaSource eta_source = EtaSource::Constant;
  AdaptiveScope adaptive_scope = AdaptiveScope::Local;
  long horizon = 0;
  double divergence_threshold = 1e8;  // any |w| entry beyond this diverges
  bool record_estimates = false;      // keep per-iteration w matrices
  long snapshot_start = -1;           // >= 0: record stacked w_i from here on
};

struct NetworkState {
  Eigen::MatrixXd w;    // M x N, column k is node k's estimate w_{k,i}
  Eigen::MatrixXd psi;  // M x N intermediate estimates
  long iteration = -1;
  Eigen::VectorXd gamma_current;  // per-node weight applied this iteration
};

NetworkState make_initial_state(int num_nodes, int dimension);

struct DivergenceEvent {
  long iteration = -1;
  int node = -1;
};

struct RunResult {
  std::vector<double> msd;         // network MSD per iteration (linear)
  std::vector<double> gamma_mean;  // per-iteration mean of applied gamma
  bool diverged = false;
  DivergenceEvent event;
  std::vector<Eigen::MatrixXd> estimates;  // when record_estimates
  std::vector<Eigen::VectorXd> snapshots;  // stacked NM vectors of w_i
};

// One ATC iteration: per-node adaptation with shared neighborhood data,
// then diffusion of the intermediate estimates. `mats` are used as given;
// resolve EngineConfig::cooperation first (see effective_combiners). The
// per-node gamma is refreshed from config.gamma_mode before adapting;
// `eta_now` overrides config.eta when finite (time-varying triggers).
void atc_step(NetworkState& state, const std::vector<DataSample>& samples,
              const EngineConfig& config, const CombinationMatrices& mats,
              const Topology& topology, const std::vector<NodeProfile>& profiles,
              double eta_now = std::numeric_limits<double>::quiet_NaN());

// One CTA iteration: diffusion of the previous estimates first, then
// adaptation from the combined estimate.
void cta_step(NetworkState& state, const std::vector<DataSample>& samples,
              const EngineConfig& config, const CombinationMatrices& mats,
              const Topology& topology, const std::vector<NodeProfile>& profiles,
              double eta_now = std::numeric_limits<double>::quiet_NaN());

// gamma^o = max{0, sum_l mu_l [f(w_l) - eta] / sum_l mu_l^2 ||df(w_l)||^2}
// over the given member nodes; returns 0 when the denominator falls below
// 1e-15 (the all-zero start makes the quotient 0/0, and the trigger rule
// already forces 0 there).
double adaptive_gamma(const std::vector<int>& members, const Eigen::MatrixXd& w_prev,
                      const std::vector<NodeProfile>& profiles,
                      const RegularizerSpec& spec, double eta);

// Same rule restricted to the neighborhood of node k.
double adaptive_gamma_local(int node, const Topology& topology,
                            const Eigen::MatrixXd& w_prev,
                            const std::vector<NodeProfile>& profiles,
                            const RegularizerSpec& spec, double eta);

// Copies of A and C with the cooperation substitution applied.
CombinationMatrices effective_combiners(const CombinationMatrices& mats,
                                        Cooperation cooperation);

// Runs config.horizon iterations from the all-zero state, recording the
// empirical network MSD (1/N) sum_k ||w^o(i) - w_{k,i}||^2 per iteration.
// Deterministic given (master_seed, run).
RunResult run_realization(const EngineConfig& config, const Topology& topology,
                          const CombinationMatrices& mats,
                          const std::vector<NodeProfile>& profiles,
                          const GroundTruthSchedule& truth,
                          std::uint64_t master_seed, std::uint64_t run = 0);

// Same, with an injected measurement stream.
RunResult run_realization(const EngineConfig& config, const Topology& topology,
                          const CombinationMatrices& mats,
                          const std::vector<NodeProfile>& profiles,
                          const GroundTruthSchedule& truth, DataSource& source);

struct MonteCarloResult {
  RunResult average;            // element-wise mean over completed runs
  std::vector<RunResult> runs;  // per-run results, in run order
  int diverged_runs = 0;
};

using SourceFactory =
    std::function<std::unique_ptr<DataSource>(std::uint64_t run)>;

// Independent realizations on substreams (master_seed, 0..num_runs-1),
// fanned out over `threads` workers (0 = hardware concurrency). The
// average covers only non-diverged runs and is identical for any worker
// count.
MonteCarloResult run_monte_carlo(const EngineConfig& config,
                                 const Topology& topology,
                                 const CombinationMatrices& mats,
                                 const std::vector<NodeProfile>& profiles,
                                 const GroundTruthSchedule& truth, int num_runs,
                                 std::uint64_t master_seed, int threads = 0);

MonteCarloResult run_monte_carlo(const EngineConfig& config,
                                 const Topology& topology,
                                 const CombinationMatrices& mats,
                                 const std::vector<NodeProfile>& profiles,
                                 const GroundTruthSchedule& truth, int num_runs,
                                 const SourceFactory& make_source, int threads = 0);

}  // namespace diffnet
