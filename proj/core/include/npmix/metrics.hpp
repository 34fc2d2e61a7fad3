#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace npmix {

struct MisclassificationResult {
  int count = 0;
  std::vector<int> permutation;  // permutation[pred_label] = true_label
};

/// Minimum disagreement count over all m! relabelings of the predicted
/// clusters (brute force; m <= 8).
MisclassificationResult misclassification(const std::vector<int>& labels_pred,
                                          const std::vector<int>& labels_true,
                                          int m);

struct BiasVariance {
  double squared_bias = 0.0;  // ||mean - truth||^2
  double variance = 0.0;      // sum of per-component sample variances
};

/// Requires at least 2 estimates; variances use the unbiased divisor.
BiasVariance bias_variance(const std::vector<Eigen::VectorXd>& estimates,
                           const Eigen::VectorXd& truth);

}  // namespace npmix
