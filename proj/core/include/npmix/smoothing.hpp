#pragma once

#include <Eigen/Dense>

#include "npmix/grid.hpp"
#include "npmix/kernels.hpp"

namespace npmix {

/// Kernel smoothing over a fixed grid. Precomputes the node-to-node kernel
/// matrix once, so repeated applications are dense matrix-vector products.
/// The kernel truncated to the domain is renormalized per evaluation point,
/// so S averages against a probability measure and Nf <= Sf pointwise.
///
/// linear:    (Sf)(x)  = integral of K_H(x, u) f(u) du over the domain
/// nonlinear: (Nf)(x)  = exp{ (S log f)(x) }
/// with K_H(x, u) = K_H(x - u) / integral of K_H(x - u') du'.
class SmoothingOperator {
 public:
  SmoothingOperator(GridPtr grid, const BandwidthMatrix& H);

  const TensorGrid& grid() const { return *grid_; }

  /// Sf on every grid node.
  Eigen::VectorXd linear(const Eigen::VectorXd& values) const;
  /// Nf on every grid node; values must respect the density floor.
  Eigen::VectorXd nonlinear(const Eigen::VectorXd& values) const;

  /// Evaluates S at arbitrary points (rows of x), by direct quadrature.
  Eigen::VectorXd linear_at(const Eigen::VectorXd& values,
                            const Eigen::MatrixXd& x) const;
  Eigen::VectorXd nonlinear_at(const Eigen::VectorXd& values,
                               const Eigen::MatrixXd& x) const;

 private:
  GridPtr grid_;
  BandwidthMatrix H_;
  Eigen::MatrixXd kernel_matrix_;  // K(x_g, x_u), symmetric, G x G
};

/// Kernel evaluations between a fixed point set and the grid, cached for
/// the lifetime of a fit. Row i holds the domain-renormalized kernel
/// K_H(x_i, node_g) for all nodes g.
class PointKernel {
 public:
  PointKernel(GridPtr grid, const BandwidthMatrix& H,
              const Eigen::MatrixXd& points);

  /// (S v)(x_i) for every point, by quadrature against grid values v.
  Eigen::VectorXd smooth_at_points(const Eigen::VectorXd& values) const;
  /// exp{(S log v)(x_i)} for every point.
  Eigen::VectorXd nonlinear_at_points(const Eigen::VectorXd& values) const;
  /// Kernel sum onto the grid: out(g) = sum_i K_H(x_i, node_g) r_i.
  Eigen::VectorXd spread_to_grid(const Eigen::VectorXd& point_weights) const;

  const TensorGrid& grid() const { return *grid_; }
  Eigen::Index num_points() const { return kernel_.rows(); }

 private:
  GridPtr grid_;
  Eigen::MatrixXd kernel_;  // n x G
};

/// Convenience wrappers matching the operator definitions one call at a time.
Eigen::VectorXd linear_smooth(const DensityField& f, const BandwidthMatrix& H);
Eigen::VectorXd nonlinear_smooth(const DensityField& f,
                                 const BandwidthMatrix& H);

/// Pointwise convex combination sum_j lambda_j fields_j. Requires lambda on
/// the simplex (entries > 0, sum 1 within 1e-10).
Eigen::VectorXd mixture_combine(const Eigen::VectorXd& lambda,
                                const std::vector<Eigen::VectorXd>& fields);

}  // namespace npmix
