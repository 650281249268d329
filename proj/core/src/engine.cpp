#include "diffnet/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace diffnet {
namespace {

constexpr double kDenominatorGuard = 1e-15;

void check_dimensions(const NetworkState& state,
                      const std::vector<DataSample>& samples,
                      const CombinationMatrices& mats,
                      const std::vector<NodeProfile>& profiles) {
  const auto n = state.w.cols();
  if (static_cast<Eigen::Index>(samples.size()) != n ||
      static_cast<Eigen::Index>(profiles.size()) != n || mats.A.rows() != n ||
      mats.A.cols() != n || mats.C.rows() != n || mats.C.cols() != n) {
    throw std::invalid_argument("engine: inconsistent dimensions");
  }
}

// Per-node gamma for this iteration, written into state.gamma_current.
void resolve_gamma(NetworkState& state, const EngineConfig& config,
                   const Topology& topology,
                   const std::vector<NodeProfile>& profiles, double eta) {
  const int n = static_cast<int>(state.w.cols());
  if (config.gamma_mode == GammaMode::Fixed) {
    state.gamma_current.setConstant(n, config.gamma);
    return;
  }
  if (config.adaptive_scope == AdaptiveScope::Network) {
    std::vector<int> all(n);
    for (int k = 0; k < n; ++k) all[k] = k;
    state.gamma_current.setConstant(
        n, adaptive_gamma(all, state.w, profiles, config.regularizer, eta));
    return;
  }
  state.gamma_current.resize(n);
  if (config.cooperation == Cooperation::NonCooperative) {
    for (int k = 0; k < n; ++k) {
      state.gamma_current[k] = adaptive_gamma({k}, state.w, profiles,
                                              config.regularizer, eta);
    }
  } else {
    for (int k = 0; k < n; ++k) {
      state.gamma_current[k] = adaptive_gamma_local(k, topology, state.w, profiles,
                                                    config.regularizer, eta);
    }
  }
}

// psi_k = prior_k + mu_k sum_{l in N_k} c_{l,k} u_l^T [d_l - u_l prior_k]
//         - mu_k gamma_k df(prior_k)
// `prior` is w_{i-1} for ATC and the combined psi_{i-1} for CTA.
void adapt_into(Eigen::MatrixXd& out, const Eigen::MatrixXd& prior,
                const std::vector<DataSample>& samples,
                const EngineConfig& config, const CombinationMatrices& mats,
                const Topology& topology,
                const std::vector<NodeProfile>& profiles,
                const Eigen::VectorXd& gamma_by_node,
                Eigen::VectorXd& subgrad_scratch) {
  const int n = static_cast<int>(prior.cols());
  for (int k = 0; k < n; ++k) {
    const double mu = profiles[k].step_size;
    out.col(k) = prior.col(k);
    for (int l : topology.neighbors(k)) {
      const double c = mats.C(k, l);
      if (c == 0.0) continue;
      const double err = samples[l].d - samples[l].u.dot(prior.col(k));
      out.col(k).noalias() += (mu * c * err) * samples[l].u.transpose();
    }
    const double gamma = gamma_by_node[k];
    if (gamma != 0.0) {
      subgradient_into(config.regularizer, prior.col(k), subgrad_scratch);
      out.col(k).noalias() -= (mu * gamma) * subgrad_scratch;
    }
  }
}

// w_k = sum_{l in N_k} a_{l,k} src_l
void combine_into(Eigen::MatrixXd& out, const Eigen::MatrixXd& src,
                  const CombinationMatrices& mats, const Topology& topology) {
  const int n = static_cast<int>(src.cols());
  for (int k = 0; k < n; ++k) {
    out.col(k).setZero();
    for (int l : topology.neighbors(k)) {
      const double a = mats.A(l, k);
      if (a != 0.0) out.col(k).noalias() += a * src.col(l);
    }
  }
}

double current_eta(const EngineConfig& config, const GroundTruthSchedule& truth,
                   long iteration) {
  if (config.eta_source == EtaSource::TruthL1) {
    return config.eta * truth.active(iteration).lpNorm<1>();
  }
  return config.eta;
}

// Returns the first node whose estimate left the trust region, or -1.
int divergence_check(const Eigen::MatrixXd& w, double threshold) {
  const int n = static_cast<int>(w.cols());
  for (int k = 0; k < n; ++k) {
    for (Eigen::Index m = 0; m < w.rows(); ++m) {
      const double x = w(m, k);
      if (!(std::abs(x) <= threshold)) return k;  // catches NaN as well
    }
  }
  return -1;
}

}  // namespace

NetworkState make_initial_state(int num_nodes, int dimension) {
  NetworkState state;
  state.w = Eigen::MatrixXd::Zero(dimension, num_nodes);
  state.psi = Eigen::MatrixXd::Zero(dimension, num_nodes);
  state.iteration = -1;
  state.gamma_current = Eigen::VectorXd::Zero(num_nodes);
  return state;
}

double adaptive_gamma(const std::vector<int>& members,
                      const Eigen::MatrixXd& w_prev,
                      const std::vector<NodeProfile>& profiles,
                      const RegularizerSpec& spec, double eta) {
  double numerator = 0.0;
  double denominator = 0.0;
  Eigen::VectorXd grad;
  for (int l : members) {
    const double mu = profiles[l].step_size;
    numerator += mu * (eval_f(spec, w_prev.col(l)) - eta);
    subgradient_into(spec, w_prev.col(l), grad);
    denominator += mu * mu * grad.squaredNorm();
  }
  if (numerator <= 0.0 || denominator < kDenominatorGuard) return 0.0;
  return numerator / denominator;
}

double adaptive_gamma_local(int node, const Topology& topology,
                            const Eigen::MatrixXd& w_prev,
                            const std::vector<NodeProfile>& profiles,
                            const RegularizerSpec& spec, double eta) {
  return adaptive_gamma(topology.neighbors(node), w_prev, profiles, spec, eta);
}

CombinationMatrices effective_combiners(const CombinationMatrices& mats,
                                        Cooperation cooperation) {
  const auto n = mats.A.rows();
  switch (cooperation) {
    case Cooperation::Full:
      return mats;
    case Cooperation::NoMeasurementExchange:
      return {mats.A, Eigen::MatrixXd::Identity(n, n)};
    case Cooperation::NonCooperative:
      return {Eigen::MatrixXd::Identity(n, n), Eigen::MatrixXd::Identity(n, n)};
  }
  throw std::logic_error("engine: unknown cooperation mode");
}

void atc_step(NetworkState& state, const std::vector<DataSample>& samples,
              const EngineConfig& config, const CombinationMatrices& mats,
              const Topology& topology,
              const std::vector<NodeProfile>& profiles, double eta_now) {
  check_dimensions(state, samples, mats, profiles);
  resolve_gamma(state, config, topology, profiles,
                std::isnan(eta_now) ? config.eta : eta_now);
  Eigen::VectorXd scratch;
  adapt_into(state.psi, state.w, samples, config, mats, topology, profiles,
             state.gamma_current, scratch);
  combine_into(state.w, state.psi, mats, topology);
  ++state.iteration;
}

void cta_step(NetworkState& state, const std::vector<DataSample>& samples,
              const EngineConfig& config, const CombinationMatrices& mats,
              const Topology& topology,
              const std::vector<NodeProfile>& profiles, double eta_now) {
  check_dimensions(state, samples, mats, profiles);
  resolve_gamma(state, config, topology, profiles,
                std::isnan(eta_now) ? config.eta : eta_now);
  Eigen::VectorXd scratch;
  combine_into(state.psi, state.w, mats, topology);
  adapt_into(state.w, state.psi, samples, config, mats, topology, profiles,
             state.gamma_current, scratch);
  ++state.iteration;
}

RunResult run_realization(const EngineConfig& config, const Topology& topology,
                          const CombinationMatrices& mats,
                          const std::vector<NodeProfile>& profiles,
                          const GroundTruthSchedule& truth,
                          DataSource& source) {
  const int n = topology.num_nodes();
  const int dim = truth.dimension();
  if (static_cast<int>(profiles.size()) != n) {
    throw std::invalid_argument("engine: profile count != node count");
  }
  const CombinationMatrices eff = effective_combiners(mats, config.cooperation);

  RunResult result;
  result.msd.reserve(config.horizon);
  result.gamma_mean.reserve(config.horizon);

  NetworkState state = make_initial_state(n, dim);
  std::vector<DataSample> samples(n);
  for (long i = 0; i < config.horizon; ++i) {
    for (int k = 0; k < n; ++k) samples[k] = source.sample(k, i);
    const double eta_now = current_eta(config, truth, i);
    if (config.mode == DiffusionMode::Atc) {
      atc_step(state, samples, config, eff, topology, profiles, eta_now);
    } else {
      cta_step(state, samples, config, eff, topology, profiles, eta_now);
    }

    const int bad_node = divergence_check(state.w, config.divergence_threshold);
    if (bad_node >= 0) {
      result.diverged = true;
      result.event = {i, bad_node};
      break;
    }

    const Eigen::VectorXd& w_true = truth.active(i);
    double msd = 0.0;
    for (int k = 0; k < n; ++k) msd += (w_true - state.w.col(k)).squaredNorm();
    result.msd.push_back(msd / n);
    result.gamma_mean.push_back(state.gamma_current.mean());
    if (config.record_estimates) result.estimates.push_back(state.w);
    if (config.snapshot_start >= 0 && i >= config.snapshot_start) {
      result.snapshots.emplace_back(
          Eigen::Map<const Eigen::VectorXd>(state.w.data(), state.w.size()));
    }
  }
  return result;
}

RunResult run_realization(const EngineConfig& config, const Topology& topology,
                          const CombinationMatrices& mats,
                          const std::vector<NodeProfile>& profiles,
                          const GroundTruthSchedule& truth,
                          std::uint64_t master_seed, std::uint64_t run) {
  GaussianDataSource source(master_seed, run, profiles, truth);
  return run_realization(config, topology, mats, profiles, truth, source);
}

MonteCarloResult run_monte_carlo(const EngineConfig& config,
                                 const Topology& topology,
                                 const CombinationMatrices& mats,
                                 const std::vector<NodeProfile>& profiles,
                                 const GroundTruthSchedule& truth, int num_runs,
                                 const SourceFactory& make_source, int threads) {
  if (num_runs < 1) throw std::invalid_argument("monte carlo: num_runs must be >= 1");
  MonteCarloResult result;
  result.runs.resize(num_runs);

  int workers = threads > 0 ? threads
                            : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, num_runs));

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next.fetch_add(1); r < num_runs; r = next.fetch_add(1)) {
      auto source = make_source(static_cast<std::uint64_t>(r));
      result.runs[r] = run_realization(config, topology, mats, profiles, truth,
                                       *source);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // average in run order over completed runs only
  result.average.msd.assign(config.horizon, 0.0);
  result.average.gamma_mean.assign(config.horizon, 0.0);
  int completed = 0;
  for (const RunResult& run : result.runs) {
    if (run.diverged) {
      ++result.diverged_runs;
      result.average.diverged = true;
      continue;
    }
    ++completed;
    for (long i = 0; i < config.horizon; ++i) {
      result.average.msd[i] += run.msd[i];
      result.average.gamma_mean[i] += run.gamma_mean[i];
    }
  }
  if (completed > 0) {
    const double inv = 1.0 / completed;
    for (long i = 0; i < config.horizon; ++i) {
      result.average.msd[i] *= inv;
      result.average.gamma_mean[i] *= inv;
    }
  } else {
    result.average.msd.clear();
    result.average.gamma_mean.clear();
  }
  return result;
}

MonteCarloResult run_monte_carlo(const EngineConfig& config,
                                 const Topology& topology,
                                 const CombinationMatrices& mats,
                                 const std::vector<NodeProfile>& profiles,
                                 const GroundTruthSchedule& truth, int num_runs,
                                 std::uint64_t master_seed, int threads) {
  SourceFactory factory = [&](std::uint64_t run) {
    return std::make_unique<GaussianDataSource>(master_seed, run, profiles, truth);
  };
  return run_monte_carlo(config, topology, mats, profiles, truth, num_runs,
                         factory, threads);
}

}  // namespace diffnet
