#include "npmix/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace npmix {

MisclassificationResult misclassification(const std::vector<int>& labels_pred,
                                          const std::vector<int>& labels_true,
                                          int m) {
  if (labels_pred.size() != labels_true.size())
    throw std::invalid_argument("misclassification: length mismatch");
  if (m > 8) throw std::invalid_argument("misclassification: m > 8 unsupported");
  for (size_t i = 0; i < labels_pred.size(); ++i)
    if (labels_pred[i] < 0 || labels_pred[i] >= m || labels_true[i] < 0 ||
        labels_true[i] >= m)
      throw std::invalid_argument("misclassification: label out of range");

  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  MisclassificationResult best;
  best.count = static_cast<int>(labels_pred.size()) + 1;
  do {
    int count = 0;
    for (size_t i = 0; i < labels_pred.size(); ++i)
      if (perm[labels_pred[i]] != labels_true[i]) ++count;
    if (count < best.count) {
      best.count = count;
      best.permutation = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

BiasVariance bias_variance(const std::vector<Eigen::VectorXd>& estimates,
                           const Eigen::VectorXd& truth) {
  const auto R = static_cast<Eigen::Index>(estimates.size());
  if (R < 2) throw std::invalid_argument("bias_variance: need >= 2 estimates");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(truth.size());
  for (const auto& e : estimates) {
    if (e.size() != truth.size())
      throw std::invalid_argument("bias_variance: estimate size mismatch");
    mean += e;
  }
  mean /= static_cast<double>(R);

  BiasVariance out;
  out.squared_bias = (mean - truth).squaredNorm();
  for (const auto& e : estimates)
    out.variance += (e - mean).squaredNorm();
  out.variance /= static_cast<double>(R - 1);
  return out;
}

}  // namespace npmix
