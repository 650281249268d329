#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "diffnet/rng.hpp"

namespace diffnet {

struct NodeProfile {
  double regressor_variance = 1.0;  // sigma^2_u, > 0
  double noise_variance = 0.0;      // sigma^2_v, >= 0
  double step_size = 0.1;           // mu, > 0
};

// Piecewise-constant sparse ground truth. The active vector at iteration i
// is the last segment whose start is <= i.
class GroundTruthSchedule {
 public:
  struct Segment {
    long start = 0;
    Eigen::VectorXd w;
  };

  GroundTruthSchedule(int dimension, std::vector<Segment> segments);
  static GroundTruthSchedule constant(Eigen::VectorXd w);

  const Eigen::VectorXd& active(long iteration) const;
  int dimension() const { return dimension_; }
  const std::vector<Segment>& segments() const { return segments_; }

 private:
  int dimension_;
  std::vector<Segment> segments_;
};

// Vector with exactly support_size entries equal to `value` at uniformly
// chosen distinct positions, the rest zero.
Eigen::VectorXd make_sparse_truth(int dimension, int support_size, double value,
                                  CounterRng& rng);

struct DataSample {
  Eigen::RowVectorXd u;  // 1 x M regressor
  double d = 0.0;        // scalar measurement, d = u w^o + v
};

// Measurement stream; the engine calls sample() exactly once per
// (node, iteration).
class DataSource {
 public:
  virtual ~DataSource() = default;
  virtual DataSample sample(int node, long iteration) = 0;
  virtual int dimension() const = 0;
};

// White Gaussian regressors with per-node power and additive white noise.
// Every (node, iteration) pair draws from its own substream derived from
// (master_seed, run), so streams are reproducible bit-for-bit regardless
// of scheduling, and distinct pairs never share a substream.
class GaussianDataSource final : public DataSource {
 public:
  GaussianDataSource(std::uint64_t master_seed, std::uint64_t run,
                     std::vector<NodeProfile> profiles,
                     const GroundTruthSchedule& truth);

  DataSample sample(int node, long iteration) override;
  int dimension() const override { return truth_->dimension(); }

 private:
  std::uint64_t base_key_;
  std::vector<NodeProfile> profiles_;
  const GroundTruthSchedule* truth_;
};

// One-off draw, equivalent to GaussianDataSource(seed, run, ...).sample(node, i).
DataSample sample_once(const NodeProfile& node_profile,
                       const GroundTruthSchedule& truth, int node,
                       long iteration, std::uint64_t master_seed,
                       std::uint64_t run = 0);

}  // namespace diffnet
