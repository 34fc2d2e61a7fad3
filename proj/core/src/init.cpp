#include "npmix/init.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "npmix/rng.hpp"

namespace npmix {

namespace {

// k-means++ seeding: centers drawn proportionally to squared distance from
// the nearest already-chosen center.
Eigen::MatrixXd seed_centers(const Eigen::MatrixXd& data, int m,
                             std::mt19937_64& rng) {
  const Eigen::Index n = data.rows();
  Eigen::MatrixXd centers(m, data.cols());
  const auto first = static_cast<Eigen::Index>(uniform01(rng) * n);
  centers.row(0) = data.row(std::min(first, n - 1));
  Eigen::VectorXd d2 =
      (data.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < m; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double r = uniform01(rng) * total;
      for (; pick < n - 1; ++pick) {
        r -= d2[pick];
        if (r <= 0.0) break;
      }
    } else {
      pick = std::min(static_cast<Eigen::Index>(uniform01(rng) * n), n - 1);
    }
    centers.row(c) = data.row(pick);
    d2 = d2.cwiseMin(
        (data.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

struct LloydResult {
  std::vector<int> labels;
  double inertia = std::numeric_limits<double>::infinity();
  bool valid = false;
};

LloydResult lloyd(const Eigen::MatrixXd& data, int m, std::mt19937_64& rng) {
  const Eigen::Index n = data.rows();
  Eigen::MatrixXd centers = seed_centers(data, m, rng);
  LloydResult res;
  res.labels.assign(n, 0);
  for (int iter = 0; iter < 300; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (data.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < m; ++c) {
        const double d = (data.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (res.labels[i] != best) {
        res.labels[i] = best;
        changed = true;
      }
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(m, data.cols());
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(m);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(res.labels[i]) += data.row(i);
      counts[res.labels[i]] += 1;
    }
    if (counts.minCoeff() == 0) return res;  // invalid, caller restarts
    for (int c = 0; c < m; ++c) centers.row(c) = sums.row(c) / counts[c];
    if (!changed && iter > 0) break;
  }
  res.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    res.inertia += (data.row(i) - centers.row(res.labels[i])).squaredNorm();
  res.valid = true;
  return res;
}

}  // namespace

std::vector<int> kmeans(const Eigen::MatrixXd& data, int m, uint64_t seed) {
  const Eigen::Index n = data.rows();
  if (m < 1 || n < m) throw std::invalid_argument("kmeans: need n >= m >= 1");
  if (m == 1) return std::vector<int>(n, 0);
  std::mt19937_64 rng(seed);
  LloydResult best;
  for (int restart = 0; restart < 50; ++restart) {
    LloydResult r = lloyd(data, m, rng);
    if (r.valid && r.inertia < best.inertia) best = std::move(r);
  }
  if (!best.valid)
    throw std::runtime_error("kmeans: no restart produced nonempty clusters");
  return best.labels;
}

MixtureState init_state_from_labels(const Eigen::MatrixXd& data,
                                    const std::vector<int>& labels,
                                    GridPtr grid, const BandwidthMatrix& H) {
  const Eigen::Index n = data.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw std::logic_error("init_state_from_labels: label count mismatch");
  const int m = *std::max_element(labels.begin(), labels.end()) + 1;
  Eigen::MatrixXd resp = Eigen::MatrixXd::Zero(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (labels[i] < 0) throw std::logic_error("init_state_from_labels: bad label");
    resp(i, labels[i]) = 1.0;
  }
  Eigen::VectorXd counts = resp.colwise().sum().transpose();
  if (counts.minCoeff() == 0.0)
    throw std::logic_error("init_state_from_labels: empty class");

  PointKernel pk(grid, H, data);
  MixtureState state;
  state.lambda = counts / static_cast<double>(n);
  state.rho = Eigen::VectorXd::Zero(m);
  for (int j = 0; j < m; ++j) {
    DensityField fj(grid, pk.spread_to_grid(resp.col(j)));
    fj.normalize();
    state.f.push_back(std::move(fj));
  }
  return state;
}

MixtureState gmm_diag_init(const Eigen::MatrixXd& data, int m, uint64_t seed,
                           GridPtr grid, const BandwidthMatrix& H) {
  const Eigen::Index n = data.rows();
  const int d = static_cast<int>(data.cols());
  if (n < 2 * m) throw std::invalid_argument("gmm_diag_init: need n >= 2m");

  const std::vector<int> labels = kmeans(data, m, seed);
  Eigen::MatrixXd mu(m, d);
  Eigen::MatrixXd var(m, d);
  Eigen::VectorXd pi = Eigen::VectorXd::Zero(m);
  const double var_floor = 1e-6 * (data.rowwise() - data.colwise().mean())
                                      .array()
                                      .square()
                                      .colwise()
                                      .mean()
                                      .maxCoeff();
  {
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(m);
    mu.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      mu.row(labels[i]) += data.row(i);
      counts[labels[i]] += 1;
    }
    for (int j = 0; j < m; ++j) mu.row(j) /= counts[j];
    var.setZero();
    for (Eigen::Index i = 0; i < n; ++i)
      var.row(labels[i]) += (data.row(i) - mu.row(labels[i])).array().square().matrix();
    for (int j = 0; j < m; ++j) {
      var.row(j) /= counts[j];
      pi[j] = static_cast<double>(counts[j]) / n;
    }
    var = var.cwiseMax(var_floor);
  }

  Eigen::MatrixXd resp(n, m);
  for (int iter = 0; iter < 100; ++iter) {
    // E step with diagonal Gaussians
    for (Eigen::Index i = 0; i < n; ++i) {
      double norm = 0.0;
      for (int j = 0; j < m; ++j) {
        double logp = std::log(pi[j]);
        for (int k = 0; k < d; ++k) {
          const double z = data(i, k) - mu(j, k);
          logp -= 0.5 * (std::log(2.0 * std::numbers::pi * var(j, k)) +
                         z * z / var(j, k));
        }
        resp(i, j) = logp;
      }
      const double mx = resp.row(i).maxCoeff();
      resp.row(i) = (resp.row(i).array() - mx).exp();
      norm = resp.row(i).sum();
      resp.row(i) /= norm;
    }
    // M step
    const Eigen::VectorXd nk = resp.colwise().sum().transpose();
    const Eigen::MatrixXd mu_new = resp.transpose() * data;
    Eigen::MatrixXd mu_prev = mu;
    for (int j = 0; j < m; ++j) mu.row(j) = mu_new.row(j) / nk[j];
    var.setZero();
    for (Eigen::Index i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        var.row(j) += resp(i, j) *
                      (data.row(i) - mu.row(j)).array().square().matrix();
    for (int j = 0; j < m; ++j) var.row(j) /= nk[j];
    var = var.cwiseMax(var_floor);
    pi = nk / static_cast<double>(n);
    if ((mu - mu_prev).cwiseAbs().maxCoeff() < 1e-10) break;
  }

  PointKernel pk(grid, H, data);
  MixtureState state;
  state.lambda = pi;
  state.rho = Eigen::VectorXd::Zero(m);
  for (int j = 0; j < m; ++j) {
    DensityField fj(grid, pk.spread_to_grid(resp.col(j)));
    fj.normalize();
    state.f.push_back(std::move(fj));
  }
  // guard against EM collapsing a component to zero weight
  state.lambda = state.lambda.cwiseMax(1e-10);
  state.lambda /= state.lambda.sum();
  return state;
}

}  // namespace npmix
