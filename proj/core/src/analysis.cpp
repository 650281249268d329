#include "diffnet/analysis.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace diffnet {
namespace {

double spectral_radius_dense(const Eigen::MatrixXd& x) {
  return Eigen::EigenSolver<Eigen::MatrixXd>(x, /*computeEigenvectors=*/false)
      .eigenvalues()
      .cwiseAbs()
      .maxCoeff();
}

Eigen::Map<const Eigen::MatrixXd> as_matrix(const Eigen::VectorXd& sigma,
                                            Eigen::Index side) {
  if (sigma.size() != side * side) {
    throw std::invalid_argument("variance operator: vec length mismatch");
  }
  return {sigma.data(), side, side};
}

}  // namespace

MomentSet build_moments(const Topology& topology, const CombinationMatrices& mats,
                        const std::vector<NodeProfile>& profiles, int dim) {
  const int n = topology.num_nodes();
  if (static_cast<int>(profiles.size()) != n) {
    throw std::invalid_argument("moments: profile count != node count");
  }
  if (dim <= 0) throw std::invalid_argument("moments: dim must be positive");

  Eigen::VectorXd su2(n), mu(n);
  Eigen::VectorXd noise_power(n);  // sigma^2_{v,l} sigma^2_{u,l}
  for (int k = 0; k < n; ++k) {
    su2[k] = profiles[k].regressor_variance;
    mu[k] = profiles[k].step_size;
    noise_power[k] = profiles[k].noise_variance * profiles[k].regressor_variance;
  }
  // all blocks are multiples of I_M, so assemble N x N scalar parts first
  const Eigen::VectorXd d_scalar = mats.C * su2;
  const Eigen::MatrixXd g_scalar =
      mats.C * noise_power.asDiagonal() * mats.C.transpose();

  MomentSet moments;
  moments.num_nodes = n;
  moments.dim = dim;
  moments.D = block_extend(Eigen::MatrixXd(d_scalar.asDiagonal()), dim);
  moments.G = block_extend(g_scalar, dim);
  moments.step = block_extend(Eigen::MatrixXd(mu.asDiagonal()), dim);
  return moments;
}

Eigen::VectorXd step_size_bounds(const MomentSet& moments) {
  Eigen::VectorXd bounds(moments.num_nodes);
  for (int k = 0; k < moments.num_nodes; ++k) {
    const double lambda_max =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(moments.d_block(k))
            .eigenvalues()
            .maxCoeff();
    bounds[k] = 2.0 / lambda_max;
  }
  return bounds;
}

MeanStability check_mean_stability(const MomentSet& moments) {
  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(moments.num_nodes);
  const Eigen::MatrixXd i_minus_md =
      Eigen::MatrixXd::Identity(moments.stacked(), moments.stacked()) -
      moments.step * moments.D;
  for (int k = 0; k < moments.num_nodes; ++k) {
    blocks.push_back(
        i_minus_md.block(k * moments.dim, k * moments.dim, moments.dim, moments.dim));
  }
  const double delta = block_max_norm_blockdiag(blocks);
  return {delta, delta < 1.0};
}

double block_max_norm_vector(const Eigen::VectorXd& z, int block_dim) {
  if (block_dim <= 0 || z.size() % block_dim != 0) {
    throw std::invalid_argument("block_max_norm_vector: bad block dimension");
  }
  double best = 0.0;
  for (Eigen::Index k = 0; k < z.size() / block_dim; ++k) {
    best = std::max(best, z.segment(k * block_dim, block_dim).norm());
  }
  return best;
}

double block_max_norm_blockdiag(const std::vector<Eigen::MatrixXd>& blocks) {
  double best = 0.0;
  for (const auto& block : blocks) {
    if (!block.isApprox(block.transpose(), 1e-12)) {
      throw std::invalid_argument("block_max_norm_blockdiag: block not symmetric");
    }
    const auto eigs =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(block).eigenvalues();
    best = std::max(best, eigs.cwiseAbs().maxCoeff());
  }
  return best;
}

Eigen::VectorXd bias_predict(const MomentSet& moments,
                             const CombinationMatrices& mats, double gamma,
                             const Eigen::VectorXd& steady_subgradient) {
  const int nm = moments.stacked();
  if (steady_subgradient.size() != nm) {
    throw std::invalid_argument("bias_predict: subgradient length mismatch");
  }
  if (gamma == 0.0) return Eigen::VectorXd::Zero(nm);
  const MeanStability stability = check_mean_stability(moments);
  if (!stability.stable) {
    throw StabilityError("bias_predict: delta >= 1, mean recursion unstable");
  }
  const Eigen::MatrixXd a_t = block_extend(mats.A.transpose(), moments.dim);
  const Eigen::MatrixXd b =
      a_t * (Eigen::MatrixXd::Identity(nm, nm) - moments.step * moments.D);
  const Eigen::VectorXd rhs = a_t * (moments.step * steady_subgradient);
  return gamma *
         (Eigen::MatrixXd::Identity(nm, nm) - b).partialPivLu().solve(rhs);
}

double bias_bound(double gamma, double mu_max, double subgrad_max, double delta) {
  if (delta >= 1.0) {
    throw StabilityError("bias_bound: delta >= 1, bound undefined");
  }
  return gamma * mu_max * subgrad_max / (1.0 - delta);
}

VarianceOperator::VarianceOperator(const MomentSet& moments,
                                   const CombinationMatrices& mats) {
  const int nm = moments.stacked();
  const Eigen::MatrixXd a_t = block_extend(mats.A.transpose(), moments.dim);
  b_ = a_t * (Eigen::MatrixXd::Identity(nm, nm) - moments.step * moments.D);
  rho_b_ = spectral_radius_dense(b_);
}

Eigen::MatrixXd VarianceOperator::dense(int max_stacked_dim) const {
  const Eigen::Index nm = b_.rows();
  if (nm > max_stacked_dim) {
    throw std::invalid_argument(
        "variance operator: dense form requested above the size cap; use the "
        "operator interface");
  }
  const Eigen::MatrixXd bt = b_.transpose();
  Eigen::MatrixXd f(nm * nm, nm * nm);
  for (Eigen::Index r = 0; r < nm; ++r)
    for (Eigen::Index c = 0; c < nm; ++c)
      f.block(r * nm, c * nm, nm, nm) = bt(r, c) * bt;
  return f;
}

Eigen::VectorXd VarianceOperator::apply(const Eigen::VectorXd& sigma) const {
  const Eigen::Index nm = b_.rows();
  const auto s = as_matrix(sigma, nm);
  const Eigen::MatrixXd out = b_.transpose() * s * b_;
  return Eigen::Map<const Eigen::VectorXd>(out.data(), nm * nm);
}

Eigen::VectorXd VarianceOperator::apply_adjoint(const Eigen::VectorXd& sigma) const {
  const Eigen::Index nm = b_.rows();
  const auto s = as_matrix(sigma, nm);
  const Eigen::MatrixXd out = b_ * s * b_.transpose();
  return Eigen::Map<const Eigen::VectorXd>(out.data(), nm * nm);
}

namespace {

Eigen::VectorXd fixed_point_solve(const Eigen::VectorXd& rhs, double tol,
                                  double rho,
                                  const std::function<Eigen::VectorXd(
                                      const Eigen::VectorXd&)>& apply_f) {
  if (rho >= 1.0) {
    throw StabilityError("variance operator: rho(F) >= 1, series diverges");
  }
  Eigen::VectorXd x = rhs;
  constexpr long kMaxIterations = 2'000'000;
  for (long j = 0; j < kMaxIterations; ++j) {
    Eigen::VectorXd next = rhs + apply_f(x);
    const double change = (next - x).norm();
    const double scale = std::max(next.norm(), 1e-300);
    x.swap(next);
    if (change <= tol * scale) return x;
  }
  throw StabilityError("variance operator: fixed point failed to converge");
}

}  // namespace

Eigen::VectorXd VarianceOperator::solve(const Eigen::VectorXd& rhs,
                                        double tol) const {
  return fixed_point_solve(rhs, tol, spectral_radius(),
                           [this](const Eigen::VectorXd& x) { return apply(x); });
}

Eigen::VectorXd VarianceOperator::solve_adjoint(const Eigen::VectorXd& rhs,
                                                double tol) const {
  return fixed_point_solve(
      rhs, tol, spectral_radius(),
      [this](const Eigen::VectorXd& x) { return apply_adjoint(x); });
}

VarianceOperator build_F_approx(const MomentSet& moments,
                                const CombinationMatrices& mats) {
  return {moments, mats};
}

Eigen::VectorXd node_selector(int k, int num_nodes, int dim) {
  const Eigen::MatrixXd t = node_weight_matrix(k, num_nodes, dim);
  return Eigen::Map<const Eigen::VectorXd>(t.data(), t.size());
}

Eigen::VectorXd network_selector(int num_nodes, int dim) {
  const int nm = num_nodes * dim;
  const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(nm, nm);
  return Eigen::Map<const Eigen::VectorXd>(q.data(), q.size());
}

Eigen::MatrixXd node_weight_matrix(int k, int num_nodes, int dim) {
  const int nm = num_nodes * dim;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(nm, nm);
  t.block(k * dim, k * dim, dim, dim).setIdentity();
  return t;
}

Eigen::MatrixXd network_weight_matrix(int num_nodes, int dim) {
  const int nm = num_nodes * dim;
  return Eigen::MatrixXd::Identity(nm, nm) / static_cast<double>(num_nodes);
}

GammaTerms estimate_gamma_terms(const std::vector<Eigen::VectorXd>& snapshots,
                                const Eigen::VectorXd& w_true,
                                const MomentSet& moments,
                                const CombinationMatrices& mats,
                                const RegularizerSpec& spec,
                                const Eigen::MatrixXd& sigma_weight) {
  if (snapshots.empty()) {
    throw std::invalid_argument("estimate_gamma_terms: empty snapshot window");
  }
  const int nm = moments.stacked();
  const int dim = moments.dim;
  if (w_true.size() != dim) {
    throw std::invalid_argument("estimate_gamma_terms: w_true dimension mismatch");
  }
  const Eigen::MatrixXd a_b = block_extend(mats.A, dim);
  const Eigen::MatrixXd core = moments.step * a_b * sigma_weight * a_b.transpose();
  // alpha kernel: step A Sigma A^T (I - step D);  beta kernel symmetrized
  const Eigen::MatrixXd alpha_kernel =
      core * (Eigen::MatrixXd::Identity(nm, nm) - moments.step * moments.D);
  const Eigen::MatrixXd beta_kernel = core * moments.step;

  Eigen::VectorXd stacked_true(nm);
  for (int k = 0; k < moments.num_nodes; ++k) {
    stacked_true.segment(k * dim, dim) = w_true;
  }

  double alpha = 0.0, beta = 0.0;
  Eigen::VectorXd grad(nm), subgrad_block;
  for (const Eigen::VectorXd& w : snapshots) {
    if (w.size() != nm) {
      throw std::invalid_argument("estimate_gamma_terms: snapshot length mismatch");
    }
    for (int k = 0; k < moments.num_nodes; ++k) {
      subgradient_into(spec, w.segment(k * dim, dim), subgrad_block);
      grad.segment(k * dim, dim) = subgrad_block;
    }
    const Eigen::VectorXd err = stacked_true - w;
    alpha += -2.0 * grad.dot(alpha_kernel * err);
    beta += grad.dot(beta_kernel * grad);
  }
  const double inv = 1.0 / static_cast<double>(snapshots.size());
  return {alpha * inv, beta * inv};
}

DominanceInterval dominance_interval(double alpha_hat, double beta_hat) {
  if (beta_hat < 0.0) {
    throw std::invalid_argument("dominance_interval: beta must be nonnegative");
  }
  DominanceInterval interval;
  if (alpha_hat <= 0.0 || beta_hat == 0.0) return interval;  // empty, gamma* = 0
  interval.empty = false;
  interval.upper = alpha_hat / beta_hat;
  interval.gamma_star = alpha_hat / (2.0 * beta_hat);
  return interval;
}

PerformancePrediction msd_predict(const MomentSet& moments,
                                  const CombinationMatrices& mats, double gamma,
                                  const GammaTermEstimates* estimates,
                                  const Eigen::VectorXd* w_true,
                                  const RegularizerSpec* spec) {
  const int n = moments.num_nodes;
  const int dim = moments.dim;
  const int nm = moments.stacked();

  PerformancePrediction pred;
  pred.gamma = gamma;
  pred.delta = check_mean_stability(moments).delta;

  const VarianceOperator f(moments, mats);
  pred.rho_f = f.spectral_radius();
  if (pred.rho_f >= 1.0) {
    throw StabilityError("msd_predict: rho(F) >= 1, no steady state");
  }

  const Eigen::MatrixXd a_t = block_extend(mats.A.transpose(), dim);
  const Eigen::MatrixXd noise_term =
      a_t * moments.step * moments.G.transpose() * moments.step * a_t.transpose();
  const Eigen::VectorXd r =
      Eigen::Map<const Eigen::VectorXd>(noise_term.data(), noise_term.size());

  // MSD_k = r^T (I - F)^{-1} t_k for every k via one adjoint solve
  const Eigen::VectorXd x = f.solve_adjoint(r);
  const auto x_mat = Eigen::Map<const Eigen::MatrixXd>(x.data(), nm, nm);
  pred.msd_node.resize(n);
  for (int k = 0; k < n; ++k) {
    pred.msd_node[k] = x_mat.block(k * dim, k * dim, dim, dim).trace();
  }
  pred.msd_network = pred.msd_node.sum() / static_cast<double>(n);

  if (estimates != nullptr) {
    if (static_cast<int>(estimates->node.size()) != n) {
      throw std::invalid_argument("msd_predict: need one gamma term per node");
    }
    for (int k = 0; k < n; ++k) {
      const GammaTerms& t = estimates->node[k];
      pred.msd_node[k] += gamma * (gamma * t.beta - t.alpha);
    }
    pred.msd_network +=
        gamma * (gamma * estimates->network.beta - estimates->network.alpha) / n;
    pred.includes_gamma_term = true;
  }

  if (gamma != 0.0 && w_true != nullptr && spec != nullptr) {
    Eigen::VectorXd steady_grad(nm);
    const Eigen::VectorXd g = subgradient(*spec, *w_true);
    for (int k = 0; k < n; ++k) steady_grad.segment(k * dim, dim) = g;
    pred.bias = bias_predict(moments, mats, gamma, steady_grad);
    double mu_max = 0.0;
    for (int k = 0; k < n; ++k) {
      mu_max = std::max(mu_max, moments.step(k * dim, k * dim));
    }
    pred.bias_bound =
        bias_bound(gamma, mu_max, subgradient_max_norm(*spec, dim), pred.delta);
  } else {
    pred.bias = Eigen::VectorXd::Zero(nm);
    pred.bias_bound = 0.0;
  }
  return pred;
}

}  // namespace diffnet
