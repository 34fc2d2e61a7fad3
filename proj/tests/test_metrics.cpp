#include <doctest.h>

#include <Eigen/Dense>
#include <vector>

#include "npmix/metrics.hpp"

using namespace npmix;

TEST_SUITE("metrics") {

TEST_CASE("misclassification is zero under a pure relabeling") {
  const std::vector<int> truth{0, 0, 1, 1, 2, 2, 2};
  const std::vector<int> pred{2, 2, 0, 0, 1, 1, 1};
  const MisclassificationResult r = misclassification(pred, truth, 3);
  CHECK(r.count == 0);
  CHECK(r.permutation == std::vector<int>{1, 2, 0});
}

TEST_CASE("misclassification counts the minimal disagreement") {
  const std::vector<int> truth{0, 0, 0, 1, 1, 1};
  const std::vector<int> pred{1, 1, 0, 0, 0, 0};
  // best relabeling maps pred 1 -> true 0 and pred 0 -> true 1, leaving a
  // single disagreement at position 2
  const MisclassificationResult r = misclassification(pred, truth, 2);
  CHECK(r.count == 1);
  CHECK(r.permutation == std::vector<int>{1, 0});
}

TEST_CASE("misclassification validates its inputs") {
  CHECK_THROWS_AS(misclassification({0, 1}, {0}, 2), std::invalid_argument);
  CHECK_THROWS_AS(misclassification({0, 2}, {0, 1}, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(misclassification({0}, {0}, 9), std::invalid_argument);
}

TEST_CASE("bias and variance match a frozen reference computation") {
  std::vector<Eigen::VectorXd> est(3, Eigen::VectorXd(2));
  est[0] << 0.1, 0.2;
  est[1] << 0.3, 0.4;
  est[2] << -0.1, 0.3;
  Eigen::VectorXd truth(2);
  truth << 0.0, 0.5;
  const BiasVariance bv = bias_variance(est, truth);
  // mean is (0.1, 0.3): squared bias 0.01 + 0.04; per-component unbiased
  // variances 0.04 and 0.01
  CHECK(bv.squared_bias == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(bv.variance == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("bias_variance validates its inputs") {
  Eigen::VectorXd truth(2);
  truth << 0.0, 0.0;
  std::vector<Eigen::VectorXd> one(1, truth);
  CHECK_THROWS_AS(bias_variance(one, truth), std::invalid_argument);
  std::vector<Eigen::VectorXd> bad(2, truth);
  bad[1] = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(bias_variance(bad, truth), std::invalid_argument);
}

}  // TEST_SUITE
