#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

namespace npmix {

/// Specification of a tensor-product grid over a compact box domain.
struct GridSpec {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::vector<int> points_per_dim;

  int dims() const { return static_cast<int>(points_per_dim.size()); }

  /// Throws std::invalid_argument if bounds are inverted, sizes disagree,
  /// or any dimension has fewer than 2 points.
  void validate() const;
};

/// Tensor-product grid with trapezoid quadrature weights. Immutable after
/// construction; safe to share across threads via shared_ptr.
class TensorGrid {
 public:
  explicit TensorGrid(GridSpec spec);

  const GridSpec& spec() const { return spec_; }
  int dims() const { return spec_.dims(); }
  Eigen::Index total_points() const { return total_points_; }

  /// Node coordinates along dimension k, strictly increasing.
  const Eigen::VectorXd& axis(int k) const { return axes_[k]; }
  /// Per-dimension trapezoid weights (same length as axis(k)).
  const Eigen::VectorXd& axis_weights(int k) const { return axis_weights_[k]; }
  /// Flattened tensor-product quadrature weights, row-major node order.
  const Eigen::VectorXd& quad_weights() const { return quad_weights_; }

  double volume() const { return volume_; }

  /// Coordinates of the node with the given flat (row-major) index.
  Eigen::VectorXd node(Eigen::Index flat) const;
  /// Per-dimension indices of a flat node index.
  std::vector<int> unravel(Eigen::Index flat) const;
  Eigen::Index ravel(const std::vector<int>& idx) const;

  /// All node coordinates as a (total_points x d) matrix, row-major order.
  const Eigen::MatrixXd& nodes() const { return nodes_; }

 private:
  GridSpec spec_;
  std::vector<Eigen::VectorXd> axes_;
  std::vector<Eigen::VectorXd> axis_weights_;
  Eigen::VectorXd quad_weights_;
  Eigen::MatrixXd nodes_;
  std::vector<Eigen::Index> strides_;
  Eigen::Index total_points_ = 0;
  double volume_ = 0.0;
};

using GridPtr = std::shared_ptr<const TensorGrid>;

/// Floor applied to density values after every normalization so that
/// log f stays finite on all of the domain.
inline constexpr double kDensityFloor = 1e-12;

/// Nonnegative function values on a TensorGrid. normalize() enforces the
/// density contract: values >= kDensityFloor and unit quadrature integral.
class DensityField {
 public:
  DensityField(GridPtr grid, Eigen::VectorXd values);

  const TensorGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& mutable_values() { return values_; }

  /// Floors at kDensityFloor and rescales to unit integral.
  /// Throws std::domain_error if the field has no mass.
  void normalize();

 private:
  GridPtr grid_;
  Eigen::VectorXd values_;
};

/// Margined bounding box of the sample. A zero-range dimension is expanded
/// by an absolute width of 1.0 on each side (with a warning on stderr).
GridPtr build_grid(const Eigen::MatrixXd& data, double margin,
                   const std::vector<int>& points_per_dim);

/// Tensor-product trapezoid approximation of the integral over the domain.
double integrate(const TensorGrid& grid, const Eigen::VectorXd& values);
double integrate(const DensityField& field);

/// Quadrature-integrates out every dimension except keep_dim; the result is
/// a function on axis(keep_dim).
Eigen::VectorXd marginalize(const DensityField& field, int keep_dim);
Eigen::VectorXd marginalize(const TensorGrid& grid,
                            const Eigen::VectorXd& values, int keep_dim);

/// Multilinear interpolation; exact at grid nodes. Points within 1e-9 of
/// the boundary are clamped; anything farther out raises std::domain_error.
double interpolate(const TensorGrid& grid, const Eigen::VectorXd& values,
                   const Eigen::VectorXd& x);
double interpolate(const DensityField& field, const Eigen::VectorXd& x);

/// 1-d linear interpolation on a grid axis (same clamping rule).
double interpolate1d(const Eigen::VectorXd& axis, const Eigen::VectorXd& values,
                     double x);

/// CSV dump: d coordinate columns then a value column, row-major, with header.
void dump_density_csv(const DensityField& field, const std::string& path);

}  // namespace npmix
