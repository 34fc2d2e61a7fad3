#include "npmix/kernels.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>

namespace npmix {

BandwidthMatrix::BandwidthMatrix(Eigen::MatrixXd H) : H_(std::move(H)) {
  if (H_.rows() != H_.cols() || H_.rows() == 0)
    throw std::invalid_argument("BandwidthMatrix: not square");
  const double scale = std::max(1.0, H_.cwiseAbs().maxCoeff());
  if ((H_ - H_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("BandwidthMatrix: not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H_);
  if (eig.info() != Eigen::Success)
    throw std::invalid_argument("BandwidthMatrix: eigendecomposition failed");
  const Eigen::VectorXd& ev = eig.eigenvalues();
  if (ev.minCoeff() <= 0.0)
    throw std::invalid_argument("BandwidthMatrix: not positive definite");
  det_ = ev.prod();
  const Eigen::MatrixXd& V = eig.eigenvectors();
  H_inv_ = V * ev.cwiseInverse().asDiagonal() * V.transpose();
  H_inv_sqrt_ = V * ev.cwiseSqrt().cwiseInverse().asDiagonal() * V.transpose();
}

double kernel_at(const Eigen::VectorXd& u, const BandwidthMatrix& H) {
  const int d = H.dims();
  if (u.size() != d) throw std::logic_error("kernel_at: dimension mismatch");
  const double q = u.dot(H.inverse() * u);
  const double norm =
      std::pow(2.0 * std::numbers::pi, -0.5 * d) / std::sqrt(H.det());
  return norm * std::exp(-0.5 * q);
}

BandwidthMatrix normal_reference_bandwidth(const Eigen::MatrixXd& data) {
  const auto n = data.rows();
  const int d = static_cast<int>(data.cols());
  if (n < d + 2)
    throw std::invalid_argument("normal_reference_bandwidth: need n >= d + 2");
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - mean;
  Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    std::cerr << "normal_reference_bandwidth: singular covariance, "
                 "regularizing\n";
    cov += 1e-9 * (cov.trace() / d) * Eigen::MatrixXd::Identity(d, d);
  }
  const double c = std::pow(4.0 / (d + 2), 2.0 / (d + 4)) *
                   std::pow(static_cast<double>(n), -2.0 / (d + 4));
  return BandwidthMatrix(c * cov);
}

}  // namespace npmix
