#pragma once

#include <Eigen/Dense>

namespace diffnet {

enum class PenaltyKind { None, L1, ReweightedL1 };

// Convex sparsity penalty f(w). L1 is the plain zero-attractor; the
// reweighted form sums |w_m| / (epsilon + |w_m|) and shrinks only
// coefficients whose magnitude is comparable to epsilon.
struct RegularizerSpec {
  PenaltyKind kind = PenaltyKind::None;
  double epsilon = 0.1;  // reweighted form only, must be > 0

  static RegularizerSpec none() { return {PenaltyKind::None, 0.0}; }
  static RegularizerSpec l1() { return {PenaltyKind::L1, 0.0}; }
  static RegularizerSpec reweighted_l1(double epsilon) {
    return {PenaltyKind::ReweightedL1, epsilon};
  }
};

double eval_f(const RegularizerSpec& spec, const Eigen::VectorXd& w);

// Componentwise subgradient with sign(0) = 0, so already-zero
// coefficients are left untouched.
Eigen::VectorXd subgradient(const RegularizerSpec& spec, const Eigen::VectorXd& w);
void subgradient_into(const RegularizerSpec& spec, const Eigen::VectorXd& w,
                      Eigen::VectorXd& out);

// Upper bound on ||subgradient(w)|| over all w of the given dimension:
// 0 (none), sqrt(M) (l1), sqrt(M)/epsilon (reweighted).
double subgradient_max_norm(const RegularizerSpec& spec, int dimension);

}  // namespace diffnet
