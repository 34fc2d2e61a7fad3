#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "npmix/grid.hpp"
#include "npmix/kernels.hpp"
#include "npmix/mm.hpp"

namespace npmix {

/// Lloyd's algorithm with k-means++ seeding; up to 50 restarts, best inertia
/// wins, runs that produce an empty cluster are discarded. Deterministic
/// under the seed.
std::vector<int> kmeans(const Eigen::MatrixXd& data, int m, uint64_t seed);

/// Hard-label starting state: lambda from class proportions, per-cluster
/// kernel density estimates with the shared bandwidth, rho = 0.
MixtureState init_state_from_labels(const Eigen::MatrixXd& data,
                                    const std::vector<int>& labels,
                                    GridPtr grid, const BandwidthMatrix& H);

/// Diagonal-covariance Gaussian-mixture EM start (k-means seeded, at most
/// 100 EM iterations); soft responsibilities drive the proportions and
/// responsibility-weighted kernel estimates.
MixtureState gmm_diag_init(const Eigen::MatrixXd& data, int m, uint64_t seed,
                           GridPtr grid, const BandwidthMatrix& H);

}  // namespace npmix
