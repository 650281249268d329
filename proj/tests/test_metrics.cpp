#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "diffnet/metrics.hpp"
#include "diffnet/rng.hpp"

using namespace diffnet;

TEST_CASE("instantaneous network MSD") {
  Eigen::VectorXd truth(2);
  truth << 1.0, 2.0;

  Eigen::MatrixXd exact(2, 3);
  exact.colwise() = truth;
  CHECK(network_msd_instant(exact, truth) == 0.0);

  Eigen::MatrixXd single(2, 1);
  single << 0.0, 1.0;  // error [1, 1]
  CHECK(network_msd_instant(single, truth) == doctest::Approx(2.0));

  Eigen::MatrixXd two(2, 2);
  two.col(0) << 0.0, 2.0;  // error [1, 0]
  two.col(1) << 1.0, 1.0;  // error [0, 1]
  CHECK(network_msd_instant(two, truth) == doctest::Approx(1.0));
}

TEST_CASE("network MSD is invariant to node order and orthonormal rotation") {
  CounterRng rng(31);
  const int dim = 5, nodes = 4;
  Eigen::VectorXd truth(dim);
  Eigen::MatrixXd w(dim, nodes);
  for (int m = 0; m < dim; ++m) truth[m] = rng.next_range(-1, 1);
  for (int k = 0; k < nodes; ++k)
    for (int m = 0; m < dim; ++m) w(m, k) = rng.next_range(-1, 1);
  const double base = network_msd_instant(w, truth);

  Eigen::MatrixXd permuted(dim, nodes);
  const int order[nodes] = {2, 0, 3, 1};
  for (int k = 0; k < nodes; ++k) permuted.col(k) = w.col(order[k]);
  CHECK(network_msd_instant(permuted, truth) == doctest::Approx(base));

  Eigen::MatrixXd gauss(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) gauss(r, c) = rng.next_gaussian();
  const Eigen::MatrixXd q =
      Eigen::HouseholderQR<Eigen::MatrixXd>(gauss).householderQ();
  CHECK(network_msd_instant(q * w, q * truth) == doctest::Approx(base));
}

TEST_CASE("steady-state window statistics") {
  LearningCurve flat{"flat", std::vector<double>(500, 0.01)};
  const auto stats = steady_state(flat, 100);
  CHECK(stats.window_start == 400);
  CHECK(stats.mean_msd_linear == doctest::Approx(0.01));
  CHECK(stats.mean_msd_db == doctest::Approx(-20.0));

  SUBCASE("window equal to the curve takes the overall mean") {
    LearningCurve ramp{"ramp", {1.0, 2.0, 3.0, 4.0}};
    CHECK(steady_state(ramp, 4).mean_msd_linear == doctest::Approx(2.5));
  }
  SUBCASE("tail value dominates") {
    std::vector<double> values(400, 1.0);
    std::fill(values.begin() + 300, values.end(), 1e-3);
    const auto tail = steady_state(LearningCurve{"", values}, 100);
    CHECK(tail.mean_msd_db == doctest::Approx(-30.0));
  }
  SUBCASE("oversized window is rejected") {
    CHECK_THROWS_AS(steady_state(flat, 501), std::invalid_argument);
    CHECK_THROWS_AS(steady_state(flat, 0), std::invalid_argument);
  }
  SUBCASE("exact zero reports -inf instead of failing") {
    LearningCurve zero{"zero", std::vector<double>(10, 0.0)};
    CHECK(std::isinf(steady_state(zero, 10).mean_msd_db));
    CHECK(steady_state(zero, 10).mean_msd_db < 0);
  }
}

TEST_CASE("differential MSD in dB") {
  LearningCurve a{"a", std::vector<double>(200, 0.02)};
  LearningCurve b{"b", std::vector<double>(200, 0.2)};
  CHECK(differential_msd(a, a, 50) == doctest::Approx(0.0));
  CHECK(differential_msd(a, b, 50) == doctest::Approx(-10.0));
  CHECK(differential_msd(a, b, 50) == doctest::Approx(-differential_msd(b, a, 50)));

  LearningCurve wrong{"c", std::vector<double>(100, 0.2)};
  CHECK_THROWS_AS(differential_msd(a, wrong, 50), std::invalid_argument);
}
