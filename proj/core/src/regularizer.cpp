#include "diffnet/regularizer.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace diffnet {
namespace {

inline double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

double eval_f(const RegularizerSpec& spec, const Eigen::VectorXd& w) {
  assert(w.allFinite());
  switch (spec.kind) {
    case PenaltyKind::None:
      return 0.0;
    case PenaltyKind::L1:
      return w.lpNorm<1>();
    case PenaltyKind::ReweightedL1: {
      assert(spec.epsilon > 0.0);
      double sum = 0.0;
      for (Eigen::Index m = 0; m < w.size(); ++m) {
        const double a = std::abs(w[m]);
        sum += a / (spec.epsilon + a);
      }
      return sum;
    }
  }
  throw std::logic_error("regularizer: unknown kind");
}

void subgradient_into(const RegularizerSpec& spec, const Eigen::VectorXd& w,
                      Eigen::VectorXd& out) {
  assert(w.allFinite());
  out.resize(w.size());
  switch (spec.kind) {
    case PenaltyKind::None:
      out.setZero();
      return;
    case PenaltyKind::L1:
      for (Eigen::Index m = 0; m < w.size(); ++m) out[m] = sign0(w[m]);
      return;
    case PenaltyKind::ReweightedL1:
      assert(spec.epsilon > 0.0);
      for (Eigen::Index m = 0; m < w.size(); ++m) {
        out[m] = sign0(w[m]) / (spec.epsilon + std::abs(w[m]));
      }
      return;
  }
  throw std::logic_error("regularizer: unknown kind");
}

Eigen::VectorXd subgradient(const RegularizerSpec& spec, const Eigen::VectorXd& w) {
  Eigen::VectorXd out;
  subgradient_into(spec, w, out);
  return out;
}

double subgradient_max_norm(const RegularizerSpec& spec, int dimension) {
  switch (spec.kind) {
    case PenaltyKind::None:
      return 0.0;
    case PenaltyKind::L1:
      return std::sqrt(static_cast<double>(dimension));
    case PenaltyKind::ReweightedL1:
      return std::sqrt(static_cast<double>(dimension)) / spec.epsilon;
  }
  throw std::logic_error("regularizer: unknown kind");
}

}  // namespace diffnet
