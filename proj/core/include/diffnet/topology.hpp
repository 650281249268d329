#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace diffnet {

// Undirected network graph. Every node belongs to its own neighborhood
// (self-loops are implied and cannot be removed), so neighborhood sums in
// the diffusion updates always include the node's own data.
class Topology {
 public:
  static Topology from_edges(int num_nodes,
                             const std::vector<std::pair<int, int>>& edges);
  static Topology complete(int num_nodes);
  static Topology line(int num_nodes);
  static Topology ring(int num_nodes);

  // Seeded generator: nodes placed uniformly in the unit square, pairs
  // closer than `radius` are linked. Disconnected components are bridged
  // through their closest pair, so the result is always connected and is
  // reproducible from the seed.
  static Topology random_geometric(int num_nodes, double radius,
                                   std::uint64_t seed);

  // Plain-text edge list: header line "nodes N", then one "u v" pair per
  // line, 0-indexed.
  static Topology load(const std::string& path);
  void save(const std::string& path) const;

  int num_nodes() const { return static_cast<int>(neighbors_.size()); }
  bool adjacent(int a, int b) const;
  // sorted, includes k itself
  const std::vector<int>& neighbors(int k) const { return neighbors_[k]; }
  int degree(int k) const { return static_cast<int>(neighbors_[k].size()); }
  bool connected() const { return connected_; }
  // a < b, self-loops omitted
  std::vector<std::pair<int, int>> edges() const;

 private:
  explicit Topology(std::vector<std::vector<int>> neighbors);

  std::vector<std::vector<int>> neighbors_;
  bool connected_ = false;
};

// Combination weights, nonzero only on edges of the topology:
//   A(l,k) = a_{l,k}, the weight node k applies to the estimate of
//            neighbor l; left-stochastic (columns sum to 1).
//   C(k,l) = c_{l,k}, the weight node k applies to the data of
//            neighbor l; right-stochastic (rows sum to 1).
struct CombinationMatrices {
  Eigen::MatrixXd A;
  Eigen::MatrixXd C;
};

inline constexpr double kStochasticTol = 1e-12;

// a_{l,k} = 1/|N_k| for l in N_k; C = I when exchange_data is false,
// otherwise c_{l,k} = 1/|N_k|.
CombinationMatrices build_uniform_combiners(const Topology& topology,
                                            bool exchange_data);

struct CombinerValidation {
  bool nonnegative = false;
  bool sparsity_ok = false;       // weights vanish outside the neighborhoods
  bool a_left_stochastic = false;
  bool c_right_stochastic = false;
  double min_entry = 0.0;              // most negative entry seen
  double max_pattern_violation = 0.0;  // largest |weight| on a non-edge
  double max_column_defect = 0.0;      // max |1 - column sum of A|
  double max_row_defect = 0.0;         // max |1 - row sum of C|

  bool ok() const {
    return nonnegative && sparsity_ok && a_left_stochastic && c_right_stochastic;
  }
  std::string summary() const;
};

CombinerValidation validate_combiners(const CombinationMatrices& mats,
                                      const Topology& topology);

// matrix (x) I_M
Eigen::MatrixXd block_extend(const Eigen::MatrixXd& matrix, int block_dim);

}  // namespace diffnet
