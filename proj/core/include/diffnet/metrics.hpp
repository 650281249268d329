#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace diffnet {

struct LearningCurve {
  std::string label;
  std::vector<double> values;  // linear-scale MSD per iteration
};

struct SteadyStateStats {
  long window_start = 0;
  long window_len = 0;
  double mean_msd_linear = 0.0;
  double mean_msd_db = 0.0;  // 10 log10(mean), -inf when the mean is 0
};

// 10 log10(x); exact zeros map to -inf rather than an arithmetic error.
double to_db(double linear);

// (1/N) sum_k ||w^o - w_k||^2 for column-per-node estimates.
double network_msd_instant(const Eigen::MatrixXd& estimates,
                           const Eigen::VectorXd& w_true);

// Mean over the final window_len entries; averaging happens in linear
// scale, dB is derived afterwards.
SteadyStateStats steady_state(const LearningCurve& curve, long window_len);

// steady_state(a) dB minus steady_state(b) dB; negative means a wins.
double differential_msd(const LearningCurve& a, const LearningCurve& b,
                        long window_len);

}  // namespace diffnet
