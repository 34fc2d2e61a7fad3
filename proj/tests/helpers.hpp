#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "npmix/grid.hpp"

namespace npmix_tests {

inline double pearson(const std::vector<double>& x,
                      const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline std::vector<double> ordinal_ranks(const std::vector<double>& x) {
  std::vector<int> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (size_t pos = 0; pos < idx.size(); ++pos)
    r[idx[pos]] = static_cast<double>(pos + 1);
  return r;
}

inline double spearman(const std::vector<double>& x,
                       const std::vector<double>& y) {
  return pearson(ordinal_ranks(x), ordinal_ranks(y));
}

// Bivariate normal density values on a grid: independent N(mu, sigma^2)
// coordinates tilted by correlation rho.
inline Eigen::VectorXd gaussian2d_values(const npmix::TensorGrid& grid,
                                         double mu1, double s1, double mu2,
                                         double s2, double rho = 0.0) {
  const double det = 1.0 - rho * rho;
  Eigen::VectorXd v(grid.total_points());
  for (Eigen::Index g = 0; g < grid.total_points(); ++g) {
    const Eigen::VectorXd x = grid.node(g);
    const double z1 = (x[0] - mu1) / s1;
    const double z2 = (x[1] - mu2) / s2;
    const double q = (z1 * z1 - 2.0 * rho * z1 * z2 + z2 * z2) / det;
    v[g] = std::exp(-0.5 * q) /
           (2.0 * std::numbers::pi * s1 * s2 * std::sqrt(det));
  }
  return v;
}

}  // namespace npmix_tests
