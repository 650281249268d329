#include "diffnet/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "diffnet/rng.hpp"

namespace diffnet {
namespace {

bool bfs_connected(const std::vector<std::vector<int>>& neighbors) {
  const int n = static_cast<int>(neighbors.size());
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  int reached = 1;
  while (!queue.empty()) {
    const int k = queue.front();
    queue.pop_front();
    for (int l : neighbors[k]) {
      if (!seen[l]) {
        seen[l] = 1;
        ++reached;
        queue.push_back(l);
      }
    }
  }
  return reached == n;
}

std::vector<int> component_of(const std::vector<std::vector<int>>& neighbors,
                              int start, std::vector<int>& label, int id) {
  std::vector<int> members;
  std::deque<int> queue{start};
  label[start] = id;
  while (!queue.empty()) {
    const int k = queue.front();
    queue.pop_front();
    members.push_back(k);
    for (int l : neighbors[k]) {
      if (label[l] < 0) {
        label[l] = id;
        queue.push_back(l);
      }
    }
  }
  return members;
}

}  // namespace

Topology::Topology(std::vector<std::vector<int>> neighbors)
    : neighbors_(std::move(neighbors)) {
  for (std::size_t k = 0; k < neighbors_.size(); ++k) {
    auto& nk = neighbors_[k];
    nk.push_back(static_cast<int>(k));
    std::sort(nk.begin(), nk.end());
    nk.erase(std::unique(nk.begin(), nk.end()), nk.end());
  }
  connected_ = bfs_connected(neighbors_);
}

Topology Topology::from_edges(int num_nodes,
                              const std::vector<std::pair<int, int>>& edges) {
  if (num_nodes <= 0) throw std::invalid_argument("topology: num_nodes must be positive");
  std::vector<std::vector<int>> nbrs(num_nodes);
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= num_nodes || b >= num_nodes) {
      throw std::invalid_argument("topology: edge endpoint out of range");
    }
    if (a == b) continue;  // self-loops are implicit
    nbrs[a].push_back(b);
    nbrs[b].push_back(a);
  }
  return Topology(std::move(nbrs));
}

Topology Topology::complete(int num_nodes) {
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < num_nodes; ++a)
    for (int b = a + 1; b < num_nodes; ++b) edges.emplace_back(a, b);
  return from_edges(num_nodes, edges);
}

Topology Topology::line(int num_nodes) {
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a + 1 < num_nodes; ++a) edges.emplace_back(a, a + 1);
  return from_edges(num_nodes, edges);
}

Topology Topology::ring(int num_nodes) {
  auto edges = std::vector<std::pair<int, int>>{};
  for (int a = 0; a + 1 < num_nodes; ++a) edges.emplace_back(a, a + 1);
  if (num_nodes > 2) edges.emplace_back(num_nodes - 1, 0);
  return from_edges(num_nodes, edges);
}

Topology Topology::random_geometric(int num_nodes, double radius,
                                    std::uint64_t seed) {
  if (num_nodes <= 0) throw std::invalid_argument("topology: num_nodes must be positive");
  if (radius <= 0.0) throw std::invalid_argument("topology: radius must be positive");
  CounterRng rng(fold(seed, 0x746F706FULL));  // topology salt
  std::vector<double> x(num_nodes), y(num_nodes);
  for (int k = 0; k < num_nodes; ++k) {
    x[k] = rng.next_range(0.0, 1.0);
    y[k] = rng.next_range(0.0, 1.0);
  }
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < num_nodes; ++a) {
    for (int b = a + 1; b < num_nodes; ++b) {
      const double dx = x[a] - x[b], dy = y[a] - y[b];
      if (std::sqrt(dx * dx + dy * dy) < radius) edges.emplace_back(a, b);
    }
  }
  // bridge components until connected: link the closest cross-component pair
  auto nbrs = [&edges, num_nodes] {
    std::vector<std::vector<int>> n(num_nodes);
    for (auto& [a, b] : edges) {
      n[a].push_back(b);
      n[b].push_back(a);
    }
    return n;
  };
  while (true) {
    auto n = nbrs();
    std::vector<int> label(num_nodes, -1);
    component_of(n, 0, label, 0);
    int outside = -1;
    for (int k = 0; k < num_nodes; ++k)
      if (label[k] < 0) { outside = k; break; }
    if (outside < 0) break;
    component_of(n, outside, label, 1);
    double best = std::numeric_limits<double>::infinity();
    std::pair<int, int> link{-1, -1};
    for (int a = 0; a < num_nodes; ++a) {
      if (label[a] != 0) continue;
      for (int b = 0; b < num_nodes; ++b) {
        if (label[b] != 1) continue;
        const double dx = x[a] - x[b], dy = y[a] - y[b];
        const double dist = dx * dx + dy * dy;
        if (dist < best) {
          best = dist;
          link = {a, b};
        }
      }
    }
    edges.push_back(link);
  }
  return from_edges(num_nodes, edges);
}

Topology Topology::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("topology: cannot open " + path);
  std::string word;
  int num_nodes = 0;
  if (!(in >> word >> num_nodes) || word != "nodes") {
    throw std::runtime_error("topology: expected header 'nodes N' in " + path);
  }
  std::vector<std::pair<int, int>> edges;
  int a = 0, b = 0;
  while (in >> a >> b) edges.emplace_back(a, b);
  return from_edges(num_nodes, edges);
}

void Topology::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("topology: cannot write " + path);
  out << "nodes " << num_nodes() << "\n";
  for (const auto& [a, b] : edges()) out << a << " " << b << "\n";
}

bool Topology::adjacent(int a, int b) const {
  const auto& nk = neighbors_[a];
  return std::binary_search(nk.begin(), nk.end(), b);
}

std::vector<std::pair<int, int>> Topology::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < num_nodes(); ++a)
    for (int b : neighbors_[a])
      if (a < b) out.emplace_back(a, b);
  return out;
}

CombinationMatrices build_uniform_combiners(const Topology& topology,
                                            bool exchange_data) {
  const int n = topology.num_nodes();
  CombinationMatrices mats{Eigen::MatrixXd::Zero(n, n),
                           Eigen::MatrixXd::Identity(n, n)};
  if (exchange_data) mats.C.setZero();
  for (int k = 0; k < n; ++k) {
    const double w = 1.0 / topology.degree(k);
    for (int l : topology.neighbors(k)) {
      mats.A(l, k) = w;
      if (exchange_data) mats.C(k, l) = w;
    }
  }
  return mats;
}

CombinerValidation validate_combiners(const CombinationMatrices& mats,
                                      const Topology& topology) {
  const int n = topology.num_nodes();
  CombinerValidation report;
  report.min_entry = std::min(mats.A.minCoeff(), mats.C.minCoeff());
  report.nonnegative = report.min_entry >= 0.0;
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      if (!topology.adjacent(l, k)) {
        report.max_pattern_violation =
            std::max({report.max_pattern_violation, std::abs(mats.A(l, k)),
                      std::abs(mats.C(l, k)), std::abs(mats.C(k, l))});
      }
    }
    report.max_column_defect =
        std::max(report.max_column_defect, std::abs(mats.A.col(k).sum() - 1.0));
    report.max_row_defect =
        std::max(report.max_row_defect, std::abs(mats.C.row(k).sum() - 1.0));
  }
  report.sparsity_ok = report.max_pattern_violation == 0.0;
  report.a_left_stochastic = report.max_column_defect <= kStochasticTol;
  report.c_right_stochastic = report.max_row_defect <= kStochasticTol;
  return report;
}

std::string CombinerValidation::summary() const {
  std::ostringstream out;
  out << (ok() ? "pass" : "fail")
      << " (nonnegative=" << (nonnegative ? "ok" : "fail")
      << ", sparsity=" << (sparsity_ok ? "ok" : "fail")
      << " max " << max_pattern_violation
      << ", A columns=" << (a_left_stochastic ? "ok" : "fail")
      << " defect " << max_column_defect
      << ", C rows=" << (c_right_stochastic ? "ok" : "fail")
      << " defect " << max_row_defect << ")";
  return out.str();
}

Eigen::MatrixXd block_extend(const Eigen::MatrixXd& matrix, int block_dim) {
  if (block_dim < 1) throw std::invalid_argument("block_extend: block_dim must be >= 1");
  const auto rows = matrix.rows(), cols = matrix.cols();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows * block_dim, cols * block_dim);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      out.block(r * block_dim, c * block_dim, block_dim, block_dim)
          .diagonal()
          .setConstant(matrix(r, c));
  return out;
}

}  // namespace diffnet
