#include "diffnet/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace diffnet {
namespace {

constexpr std::uint64_t kDataSalt = 0x64617461ULL;

}  // namespace

GroundTruthSchedule::GroundTruthSchedule(int dimension,
                                         std::vector<Segment> segments)
    : dimension_(dimension), segments_(std::move(segments)) {
  if (dimension_ <= 0) throw std::invalid_argument("truth: dimension must be positive");
  if (segments_.empty()) throw std::invalid_argument("truth: needs at least one segment");
  if (segments_.front().start != 0) {
    throw std::invalid_argument("truth: first segment must start at iteration 0");
  }
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    if (segments_[s].w.size() != dimension_) {
      throw std::invalid_argument("truth: segment dimension mismatch");
    }
    if (s > 0 && segments_[s].start <= segments_[s - 1].start) {
      throw std::invalid_argument("truth: segment starts must be strictly increasing");
    }
  }
}

GroundTruthSchedule GroundTruthSchedule::constant(Eigen::VectorXd w) {
  const int dim = static_cast<int>(w.size());
  return GroundTruthSchedule(dim, {Segment{0, std::move(w)}});
}

const Eigen::VectorXd& GroundTruthSchedule::active(long iteration) const {
  auto it = std::upper_bound(
      segments_.begin(), segments_.end(), iteration,
      [](long i, const Segment& seg) { return i < seg.start; });
  return std::prev(it)->w;
}

Eigen::VectorXd make_sparse_truth(int dimension, int support_size, double value,
                                  CounterRng& rng) {
  if (dimension <= 0) throw std::invalid_argument("make_sparse_truth: dimension must be positive");
  if (support_size < 0 || support_size > dimension) {
    throw std::invalid_argument("make_sparse_truth: support_size out of [0, M]");
  }
  std::vector<int> idx(dimension);
  std::iota(idx.begin(), idx.end(), 0);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(dimension);
  for (int s = 0; s < support_size; ++s) {
    const int j = s + rng.next_below(dimension - s);
    std::swap(idx[s], idx[j]);
    w[idx[s]] = value;
  }
  return w;
}

GaussianDataSource::GaussianDataSource(std::uint64_t master_seed,
                                       std::uint64_t run,
                                       std::vector<NodeProfile> profiles,
                                       const GroundTruthSchedule& truth)
    : base_key_(fold(fold(master_seed, kDataSalt), run)),
      profiles_(std::move(profiles)),
      truth_(&truth) {
  if (profiles_.empty()) throw std::invalid_argument("data source: no node profiles");
}

DataSample GaussianDataSource::sample(int node, long iteration) {
  const NodeProfile& prof = profiles_[static_cast<std::size_t>(node)];
  CounterRng rng(fold(fold(base_key_, static_cast<std::uint64_t>(node)),
                      static_cast<std::uint64_t>(iteration)));
  const int dim = truth_->dimension();
  const double su = std::sqrt(prof.regressor_variance);
  DataSample out;
  out.u.resize(dim);
  for (int m = 0; m < dim; ++m) out.u[m] = su * rng.next_gaussian();
  const double noise = std::sqrt(prof.noise_variance) * rng.next_gaussian();
  out.d = out.u.dot(truth_->active(iteration)) + noise;
  return out;
}

DataSample sample_once(const NodeProfile& node_profile,
                       const GroundTruthSchedule& truth, int node,
                       long iteration, std::uint64_t master_seed,
                       std::uint64_t run) {
  std::vector<NodeProfile> profiles(static_cast<std::size_t>(node) + 1, node_profile);
  GaussianDataSource source(master_seed, run, std::move(profiles), truth);
  return source.sample(node, iteration);
}

}  // namespace diffnet
