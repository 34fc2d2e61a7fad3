#pragma once

#include <Eigen/Dense>

namespace npmix {

/// Symmetric positive-definite bandwidth matrix with cached determinant and
/// inverse. Immutable; the constructor rejects anything non-SPD.
class BandwidthMatrix {
 public:
  explicit BandwidthMatrix(Eigen::MatrixXd H);

  int dims() const { return static_cast<int>(H_.rows()); }
  const Eigen::MatrixXd& matrix() const { return H_; }
  const Eigen::MatrixXd& inverse() const { return H_inv_; }
  const Eigen::MatrixXd& inverse_sqrt() const { return H_inv_sqrt_; }
  double det() const { return det_; }

 private:
  Eigen::MatrixXd H_;
  Eigen::MatrixXd H_inv_;
  Eigen::MatrixXd H_inv_sqrt_;
  double det_ = 0.0;
};

/// Rescaled Gaussian kernel |H|^{-1/2} K(H^{-1/2} u) with K the standard
/// d-variate normal density.
double kernel_at(const Eigen::VectorXd& u, const BandwidthMatrix& H);

/// Normal-reference full-matrix rule
///   H = (4/(d+2))^{2/(d+4)} n^{-2/(d+4)} * sample covariance.
/// A singular covariance is regularized by 1e-9 * trace/d on the diagonal
/// (with a warning). Requires n >= d + 2.
BandwidthMatrix normal_reference_bandwidth(const Eigen::MatrixXd& data);

}  // namespace npmix
