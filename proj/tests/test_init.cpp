#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "helpers.hpp"
#include "npmix/grid.hpp"
#include "npmix/init.hpp"
#include "npmix/kernels.hpp"

using namespace npmix;

namespace {

// Two well-separated blobs: 30 points near (0, 0) and 20 near (10, 10).
Eigen::MatrixXd two_blobs() {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> noise(0.0, 0.3);
  Eigen::MatrixXd data(50, 2);
  for (int i = 0; i < 30; ++i)
    data.row(i) << noise(rng), noise(rng);
  for (int i = 30; i < 50; ++i)
    data.row(i) << 10.0 + noise(rng), 10.0 + noise(rng);
  return data;
}

}  // namespace

TEST_SUITE("init") {

TEST_CASE("kmeans separates well-separated blobs exactly") {
  const Eigen::MatrixXd data = two_blobs();
  const std::vector<int> labels = kmeans(data, 2, 1);
  REQUIRE(labels.size() == 50);
  for (int i = 1; i < 30; ++i) CHECK(labels[i] == labels[0]);
  for (int i = 31; i < 50; ++i) CHECK(labels[i] == labels[30]);
  CHECK(labels[0] != labels[30]);
}

TEST_CASE("kmeans is deterministic under the seed") {
  const Eigen::MatrixXd data = two_blobs();
  CHECK(kmeans(data, 3, 42) == kmeans(data, 3, 42));
}

TEST_CASE("kmeans validates m against n") {
  const Eigen::MatrixXd data = two_blobs();
  CHECK_THROWS_AS(kmeans(data, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(kmeans(data, 51, 1), std::invalid_argument);
}

TEST_CASE("hard-label start has class-proportion lambda and zero rho") {
  const Eigen::MatrixXd data = two_blobs();
  const GridPtr grid = build_grid(data, 0.15, {25, 25});
  const BandwidthMatrix H(0.5 * Eigen::MatrixXd::Identity(2, 2));
  std::vector<int> labels(50, 0);
  for (int i = 30; i < 50; ++i) labels[i] = 1;
  const MixtureState s = init_state_from_labels(data, labels, grid, H);
  s.validate();
  CHECK(s.num_components() == 2);
  CHECK(s.lambda[0] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(s.lambda[1] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(s.rho.cwiseAbs().maxCoeff() == 0.0);
  // each class density concentrates over its own blob
  Eigen::VectorXd at(2);
  at << 0.0, 0.0;
  CHECK(interpolate(s.f[0], at) > interpolate(s.f[1], at));
  at << 10.0, 10.0;
  CHECK(interpolate(s.f[1], at) > interpolate(s.f[0], at));
}

TEST_CASE("hard-label start rejects inconsistent labels") {
  const Eigen::MatrixXd data = two_blobs();
  const GridPtr grid = build_grid(data, 0.15, {25, 25});
  const BandwidthMatrix H(0.5 * Eigen::MatrixXd::Identity(2, 2));
  std::vector<int> short_labels(49, 0);
  CHECK_THROWS_AS(init_state_from_labels(data, short_labels, grid, H),
                  std::logic_error);
  std::vector<int> negative(50, 0);
  negative[3] = -1;
  CHECK_THROWS_AS(init_state_from_labels(data, negative, grid, H),
                  std::logic_error);
  std::vector<int> gap(50, 0);
  gap[0] = 2;  // class 1 empty
  CHECK_THROWS_AS(init_state_from_labels(data, gap, grid, H),
                  std::logic_error);
}

TEST_CASE("gmm start yields a valid state on separated blobs") {
  const Eigen::MatrixXd data = two_blobs();
  const GridPtr grid = build_grid(data, 0.15, {25, 25});
  const BandwidthMatrix H(0.5 * Eigen::MatrixXd::Identity(2, 2));
  const MixtureState s = gmm_diag_init(data, 2, 1, grid, H);
  s.validate();
  CHECK(s.num_components() == 2);
  CHECK(s.lambda.minCoeff() > 0.3);  // proportions are 0.6 / 0.4
  CHECK_THROWS_AS(gmm_diag_init(data, 26, 1, grid, H), std::invalid_argument);
}

}  // TEST_SUITE
