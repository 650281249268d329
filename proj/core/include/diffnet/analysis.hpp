#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "diffnet/regularizer.hpp"
#include "diffnet/signal.hpp"
#include "diffnet/topology.hpp"

namespace diffnet {

// Raised when a computation requires a stable recursion (delta < 1 or
// rho(F) < 1) and the inputs violate it.
class StabilityError : public std::runtime_error {
 public:
  explicit StabilityError(const std::string& what) : std::runtime_error(what) {}
};

// Second-order moments entering the mean and mean-square recursions, for
// white regressors R_{u,k} = sigma^2_{u,k} I_M:
//   D    = E D_i, block-diagonal with blocks sum_l c_{l,k} R_{u,l}
//   G    = E g_i g_i^T, the weighted noise covariance
//   step = diag(mu_k I_M)
struct MomentSet {
  Eigen::MatrixXd D;
  Eigen::MatrixXd G;
  Eigen::MatrixXd step;
  int num_nodes = 0;
  int dim = 0;

  int stacked() const { return num_nodes * dim; }
  Eigen::MatrixXd d_block(int k) const {
    return D.block(k * dim, k * dim, dim, dim);
  }
};

MomentSet build_moments(const Topology& topology, const CombinationMatrices& mats,
                        const std::vector<NodeProfile>& profiles, int dim);

// Per-node mean-stability bound 2 / lambda_max(sum_l c_{l,k} R_{u,l}).
Eigen::VectorXd step_size_bounds(const MomentSet& moments);

struct MeanStability {
  double delta = 0.0;  // rho(I - step * D)
  bool stable = false;
};
MeanStability check_mean_stability(const MomentSet& moments);

// max_k ||z_k|| over the stacked M-blocks of z.
double block_max_norm_vector(const Eigen::VectorXd& z, int block_dim);

// Block maximum norm of a block-diagonal symmetric matrix: max_k rho(X_k).
double block_max_norm_blockdiag(const std::vector<Eigen::MatrixXd>& blocks);

// bias = gamma [I - A^T(I - step D)]^{-1} A^T step * steady_subgradient,
// the closed-form steady-state mean error under regularization. The
// steady-state subgradient expectation can be sourced from the oracle
// sign pattern of w^o or from an empirical average; the caller supplies it.
Eigen::VectorXd bias_predict(const MomentSet& moments,
                             const CombinationMatrices& mats, double gamma,
                             const Eigen::VectorXd& steady_subgradient);

// ||bias||_{b,infty} <= gamma mu_max df_max / (1 - delta); requires delta < 1.
double bias_bound(double gamma, double mu_max, double subgrad_max, double delta);

// Small-step approximation of the variance-recursion operator,
// F ~= B^T (x) B^T with B = A^T (I - step D), held in factored form.
// F is stable exactly when B is, and rho(F) = rho(B)^2.
class VarianceOperator {
 public:
  VarianceOperator(const MomentSet& moments, const CombinationMatrices& mats);

  const Eigen::MatrixXd& b() const { return b_; }
  double spectral_radius() const { return rho_b_ * rho_b_; }  // rho(F)
  double rho_b() const { return rho_b_; }

  // Dense (NM)^2 x (NM)^2 matrix; guarded so an oversized request fails
  // instead of exhausting memory.
  Eigen::MatrixXd dense(int max_stacked_dim = 64) const;

  // F vec(S) = vec(B^T S B)
  Eigen::VectorXd apply(const Eigen::VectorXd& sigma) const;
  // F^T vec(S) = vec(B S B^T)
  Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& sigma) const;

  // Fixed-point solve of (I - F) x = rhs (adjoint: (I - F^T) x = rhs),
  // iterating x <- rhs + F x until the relative change drops to tol.
  // Convergent because rho(F) < 1; throws StabilityError otherwise.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs, double tol = 1e-10) const;
  Eigen::VectorXd solve_adjoint(const Eigen::VectorXd& rhs,
                                double tol = 1e-10) const;

 private:
  Eigen::MatrixXd b_;
  double rho_b_ = 0.0;
};

VarianceOperator build_F_approx(const MomentSet& moments,
                                const CombinationMatrices& mats);

// Weighting selectors of the variance relation:
//   t_k = vec(diag(e_k) (x) I_M), the node-k MSD selector;
//   q   = vec(I_{NM}), the network selector (used as q/N).
Eigen::VectorXd node_selector(int k, int num_nodes, int dim);
Eigen::VectorXd network_selector(int num_nodes, int dim);
// The corresponding weighting matrices Sigma.
Eigen::MatrixXd node_weight_matrix(int k, int num_nodes, int dim);
Eigen::MatrixXd network_weight_matrix(int num_nodes, int dim);

// Steady-state limits of the regularization cross terms for a weighting
// Sigma, estimated by averaging over steady-state snapshots of gamma-free
// runs:
//   alpha = -2 E df(w)^T step A_b Sigma A_b^T (I - step D) (1 (x) w^o - w)
//   beta  =    E || df(w) ||^2 weighted by step A_b Sigma A_b^T step
struct GammaTerms {
  double alpha = 0.0;
  double beta = 0.0;
};

GammaTerms estimate_gamma_terms(const std::vector<Eigen::VectorXd>& snapshots,
                                const Eigen::VectorXd& w_true,
                                const MomentSet& moments,
                                const CombinationMatrices& mats,
                                const RegularizerSpec& spec,
                                const Eigen::MatrixXd& sigma_weight);

// gamma values that let the regularized filter beat the gamma = 0
// baseline: (0, alpha/beta) when alpha > 0, empty otherwise; the MSD
// optimum sits at gamma* = max{0, alpha / (2 beta)}.
struct DominanceInterval {
  bool empty = true;
  double upper = 0.0;
  double gamma_star = 0.0;
};
DominanceInterval dominance_interval(double alpha_hat, double beta_hat);

struct GammaTermEstimates {
  std::vector<GammaTerms> node;  // one per node, same order
  GammaTerms network;
};

struct PerformancePrediction {
  Eigen::VectorXd msd_node;    // N entries
  double msd_network = 0.0;
  Eigen::VectorXd bias;        // NM entries (zero when gamma = 0)
  double bias_bound = 0.0;
  double delta = 0.0;          // rho(I - step D)
  double rho_f = 0.0;          // rho of the approximate F
  double gamma = 0.0;
  bool includes_gamma_term = false;  // false: prediction covers gamma = 0
};

// Closed-form steady-state MSD per node and for the network. The gamma-
// free term is exact under the small-step approximation of F; the gamma
// correction gamma beta (gamma - alpha/beta) is added per weighting when
// estimates are supplied. The bias vector uses the oracle subgradient of
// w_true scaled by gamma.
PerformancePrediction msd_predict(const MomentSet& moments,
                                  const CombinationMatrices& mats,
                                  double gamma = 0.0,
                                  const GammaTermEstimates* estimates = nullptr,
                                  const Eigen::VectorXd* w_true = nullptr,
                                  const RegularizerSpec* spec = nullptr);

}  // namespace diffnet
