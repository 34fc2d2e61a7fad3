#include "npmix/smoothing.hpp"

#include <cmath>
#include <stdexcept>

namespace npmix {

SmoothingOperator::SmoothingOperator(GridPtr grid, const BandwidthMatrix& H)
    : grid_(std::move(grid)), H_(H) {
  if (!grid_) throw std::invalid_argument("SmoothingOperator: null grid");
  const Eigen::Index G = grid_->total_points();
  const Eigen::MatrixXd& nodes = grid_->nodes();
  kernel_matrix_.resize(G, G);
  Eigen::VectorXd diff(grid_->dims());
  for (Eigen::Index g = 0; g < G; ++g) {
    for (Eigen::Index u = g; u < G; ++u) {
      diff = (nodes.row(g) - nodes.row(u)).transpose();
      const double k = kernel_at(diff, H_);
      kernel_matrix_(g, u) = k;
      kernel_matrix_(u, g) = k;
    }
  }
  // Normalize every row to unit quadrature mass: the truncated kernel then
  // averages against a probability measure on the domain, which is what
  // makes N f <= S f (Jensen) hold pointwise up to the boundary.
  const Eigen::VectorXd mass = kernel_matrix_ * grid_->quad_weights();
  kernel_matrix_.array().colwise() /= mass.array();
}

Eigen::VectorXd SmoothingOperator::linear(const Eigen::VectorXd& values) const {
  return kernel_matrix_ * grid_->quad_weights().cwiseProduct(values);
}

Eigen::VectorXd SmoothingOperator::nonlinear(
    const Eigen::VectorXd& values) const {
  if (values.minCoeff() <= 0.0)
    throw std::logic_error("nonlinear smoother: non-positive density value");
  const Eigen::VectorXd smoothed_log =
      kernel_matrix_ * grid_->quad_weights().cwiseProduct(
                           values.array().log().matrix());
  return smoothed_log.array().exp();
}

Eigen::VectorXd SmoothingOperator::linear_at(const Eigen::VectorXd& values,
                                             const Eigen::MatrixXd& x) const {
  PointKernel pk(grid_, H_, x);
  return pk.smooth_at_points(values);
}

Eigen::VectorXd SmoothingOperator::nonlinear_at(
    const Eigen::VectorXd& values, const Eigen::MatrixXd& x) const {
  PointKernel pk(grid_, H_, x);
  return pk.nonlinear_at_points(values);
}

PointKernel::PointKernel(GridPtr grid, const BandwidthMatrix& H,
                         const Eigen::MatrixXd& points)
    : grid_(std::move(grid)) {
  if (!grid_) throw std::invalid_argument("PointKernel: null grid");
  if (points.cols() != grid_->dims())
    throw std::logic_error("PointKernel: dimension mismatch");
  const Eigen::Index n = points.rows();
  const Eigen::Index G = grid_->total_points();
  const Eigen::MatrixXd& nodes = grid_->nodes();
  kernel_.resize(n, G);
  Eigen::VectorXd diff(grid_->dims());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index g = 0; g < G; ++g) {
      diff = (points.row(i) - nodes.row(g)).transpose();
      kernel_(i, g) = kernel_at(diff, H);
    }
  }
  // Same row normalization as SmoothingOperator, so point and grid
  // evaluations of S and N agree and the density step integrates the
  // normalized kernel.
  const Eigen::VectorXd mass = kernel_ * grid_->quad_weights();
  kernel_.array().colwise() /= mass.array();
}

Eigen::VectorXd PointKernel::smooth_at_points(
    const Eigen::VectorXd& values) const {
  return kernel_ * grid_->quad_weights().cwiseProduct(values);
}

Eigen::VectorXd PointKernel::nonlinear_at_points(
    const Eigen::VectorXd& values) const {
  if (values.minCoeff() <= 0.0)
    throw std::logic_error("nonlinear smoother: non-positive density value");
  const Eigen::VectorXd smoothed_log =
      kernel_ * grid_->quad_weights().cwiseProduct(
                    values.array().log().matrix());
  return smoothed_log.array().exp();
}

Eigen::VectorXd PointKernel::spread_to_grid(
    const Eigen::VectorXd& point_weights) const {
  if (point_weights.size() != kernel_.rows())
    throw std::logic_error("spread_to_grid: weight size mismatch");
  return kernel_.transpose() * point_weights;
}

Eigen::VectorXd linear_smooth(const DensityField& f, const BandwidthMatrix& H) {
  SmoothingOperator op(f.grid_ptr(), H);
  return op.linear(f.values());
}

Eigen::VectorXd nonlinear_smooth(const DensityField& f,
                                 const BandwidthMatrix& H) {
  SmoothingOperator op(f.grid_ptr(), H);
  return op.nonlinear(f.values());
}

Eigen::VectorXd mixture_combine(const Eigen::VectorXd& lambda,
                                const std::vector<Eigen::VectorXd>& fields) {
  const auto m = static_cast<Eigen::Index>(fields.size());
  if (lambda.size() != m || m == 0)
    throw std::logic_error("mixture_combine: lambda/field count mismatch");
  if (lambda.minCoeff() <= 0.0 || std::abs(lambda.sum() - 1.0) > 1e-10)
    throw std::logic_error("mixture_combine: lambda not on the simplex");
  Eigen::VectorXd out = lambda[0] * fields[0];
  for (Eigen::Index j = 1; j < m; ++j) {
    if (fields[j].size() != out.size())
      throw std::logic_error("mixture_combine: field size mismatch");
    out += lambda[j] * fields[j];
  }
  return out;
}

}  // namespace npmix
