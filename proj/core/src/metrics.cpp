#include "diffnet/metrics.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace diffnet {

double to_db(double linear) {
  if (linear == 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(linear);
}

double network_msd_instant(const Eigen::MatrixXd& estimates,
                           const Eigen::VectorXd& w_true) {
  if (estimates.rows() != w_true.size()) {
    throw std::invalid_argument("network_msd_instant: dimension mismatch");
  }
  double sum = 0.0;
  for (Eigen::Index k = 0; k < estimates.cols(); ++k) {
    sum += (w_true - estimates.col(k)).squaredNorm();
  }
  return sum / static_cast<double>(estimates.cols());
}

SteadyStateStats steady_state(const LearningCurve& curve, long window_len) {
  const long n = static_cast<long>(curve.values.size());
  if (window_len <= 0 || window_len > n) {
    throw std::invalid_argument("steady_state: window longer than curve");
  }
  SteadyStateStats stats;
  stats.window_start = n - window_len;
  stats.window_len = window_len;
  stats.mean_msd_linear =
      std::accumulate(curve.values.begin() + stats.window_start,
                      curve.values.end(), 0.0) /
      static_cast<double>(window_len);
  stats.mean_msd_db = to_db(stats.mean_msd_linear);
  return stats;
}

double differential_msd(const LearningCurve& a, const LearningCurve& b,
                        long window_len) {
  if (a.values.size() != b.values.size()) {
    throw std::invalid_argument("differential_msd: curve length mismatch");
  }
  return steady_state(a, window_len).mean_msd_db -
         steady_state(b, window_len).mean_msd_db;
}

}  // namespace diffnet
