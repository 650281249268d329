#include <doctest.h>

#include "diffnet/regularizer.hpp"
#include "diffnet/rng.hpp"

using namespace diffnet;

namespace {

Eigen::VectorXd random_vector(int dim, CounterRng& rng, double scale = 2.0) {
  Eigen::VectorXd v(dim);
  for (int m = 0; m < dim; ++m) v[m] = rng.next_range(-scale, scale);
  return v;
}

}  // namespace

TEST_CASE("penalty values") {
  Eigen::VectorXd w(3);
  w << 1.0, -2.0, 0.0;
  CHECK(eval_f(RegularizerSpec::l1(), w) == doctest::Approx(3.0));
  CHECK(eval_f(RegularizerSpec::none(), w) == 0.0);

  const auto rza = RegularizerSpec::reweighted_l1(0.1);
  CHECK(eval_f(rza, Eigen::VectorXd::Zero(5)) == 0.0);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(8);
  e1[0] = 1.0;
  CHECK(eval_f(rza, e1) == doctest::Approx(1.0 / 1.1));
}

TEST_CASE("subgradients use sign(0) = 0") {
  Eigen::VectorXd w(3);
  w << 3.0, -0.5, 0.0;
  const Eigen::VectorXd g = subgradient(RegularizerSpec::l1(), w);
  CHECK(g[0] == 1.0);
  CHECK(g[1] == -1.0);
  CHECK(g[2] == 0.0);

  Eigen::VectorXd one(1);
  one << 1.0;
  CHECK(subgradient(RegularizerSpec::reweighted_l1(0.1), one)[0] ==
        doctest::Approx(1.0 / 1.1));

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(4);
  for (const auto& spec : {RegularizerSpec::none(), RegularizerSpec::l1(),
                           RegularizerSpec::reweighted_l1(0.1)}) {
    CHECK(subgradient(spec, zero).isZero(0.0));
  }
}

TEST_CASE("subgradient norm bounds") {
  CHECK(subgradient_max_norm(RegularizerSpec::l1(), 4) == doctest::Approx(2.0));
  CHECK(subgradient_max_norm(RegularizerSpec::reweighted_l1(0.1), 4) ==
        doctest::Approx(20.0));
  CHECK(subgradient_max_norm(RegularizerSpec::none(), 4) == 0.0);

  CounterRng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 1 + rng.next_below(10);
    const Eigen::VectorXd w = random_vector(dim, rng);
    for (const auto& spec :
         {RegularizerSpec::l1(), RegularizerSpec::reweighted_l1(0.25)}) {
      const Eigen::VectorXd g = subgradient(spec, w);
      const double entry_bound =
          spec.kind == PenaltyKind::L1 ? 1.0 : 1.0 / spec.epsilon;
      CHECK(g.cwiseAbs().maxCoeff() <= entry_bound + 1e-15);
      CHECK(g.norm() <= subgradient_max_norm(spec, dim) + 1e-12);
    }
  }
}

TEST_CASE("subgradient inequality f(x+y) - f(x) >= df(x)^T y for the convex penalty") {
  // Holds globally for the l1 penalty. The reweighted sum |w|/(eps+|w|) is
  // not convex, so its update vector is not a true subgradient and the
  // global inequality fails there (e.g. x=0.1, y=1, eps=0.1 in 1-D).
  CounterRng rng(99);
  const auto l1 = RegularizerSpec::l1();
  for (int trial = 0; trial < 1000; ++trial) {
    const int dim = 1 + rng.next_below(10);
    const Eigen::VectorXd x = random_vector(dim, rng);
    const Eigen::VectorXd y = random_vector(dim, rng);
    const double lhs = eval_f(l1, x + y) - eval_f(l1, x);
    const double rhs = subgradient(l1, x).dot(y);
    CHECK(lhs - rhs >= -1e-12);
  }
}

TEST_CASE("reweighted attractor reduces to the plain sign as epsilon grows") {
  CounterRng rng(11);
  const Eigen::VectorXd w = random_vector(6, rng);
  const double eps = 1e6;
  const Eigen::VectorXd scaled =
      eps * subgradient(RegularizerSpec::reweighted_l1(eps), w);
  const Eigen::VectorXd sign = subgradient(RegularizerSpec::l1(), w);
  CHECK((scaled - sign).cwiseAbs().maxCoeff() <= 1e-5);
}

TEST_CASE("subgradient keeps the sign pattern of w") {
  CounterRng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd w = random_vector(7, rng);
    for (const auto& spec :
         {RegularizerSpec::l1(), RegularizerSpec::reweighted_l1(0.5)}) {
      const Eigen::VectorXd g = subgradient(spec, w);
      for (int m = 0; m < w.size(); ++m) {
        if (w[m] > 0.0) CHECK(g[m] > 0.0);
        if (w[m] < 0.0) CHECK(g[m] < 0.0);
        if (w[m] == 0.0) CHECK(g[m] == 0.0);
      }
    }
  }
}
