#include "npmix/grid.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace npmix {

void GridSpec::validate() const {
  const auto d = static_cast<Eigen::Index>(points_per_dim.size());
  if (d == 0) throw std::invalid_argument("GridSpec: zero dimensions");
  if (lower.size() != d || upper.size() != d)
    throw std::invalid_argument("GridSpec: bound/points size mismatch");
  for (Eigen::Index k = 0; k < d; ++k) {
    if (!(lower[k] < upper[k]))
      throw std::invalid_argument("GridSpec: lower must be < upper in dim " +
                                  std::to_string(k));
    if (points_per_dim[k] < 2)
      throw std::invalid_argument("GridSpec: need >= 2 points in dim " +
                                  std::to_string(k));
  }
}

TensorGrid::TensorGrid(GridSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const int d = spec_.dims();
  axes_.resize(d);
  axis_weights_.resize(d);
  total_points_ = 1;
  volume_ = 1.0;
  for (int k = 0; k < d; ++k) {
    const int nk = spec_.points_per_dim[k];
    axes_[k] = Eigen::VectorXd::LinSpaced(nk, spec_.lower[k], spec_.upper[k]);
    const double h = (spec_.upper[k] - spec_.lower[k]) / (nk - 1);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(nk, h);
    w[0] = w[nk - 1] = h / 2.0;
    axis_weights_[k] = w;
    total_points_ *= nk;
    volume_ *= spec_.upper[k] - spec_.lower[k];
  }
  strides_.assign(d, 1);
  for (int k = d - 2; k >= 0; --k)
    strides_[k] = strides_[k + 1] * spec_.points_per_dim[k + 1];

  quad_weights_.resize(total_points_);
  nodes_.resize(total_points_, d);
  std::vector<int> idx(d, 0);
  for (Eigen::Index flat = 0; flat < total_points_; ++flat) {
    double w = 1.0;
    for (int k = 0; k < d; ++k) {
      w *= axis_weights_[k][idx[k]];
      nodes_(flat, k) = axes_[k][idx[k]];
    }
    quad_weights_[flat] = w;
    for (int k = d - 1; k >= 0; --k) {
      if (++idx[k] < spec_.points_per_dim[k]) break;
      idx[k] = 0;
    }
  }
}

Eigen::VectorXd TensorGrid::node(Eigen::Index flat) const {
  return nodes_.row(flat).transpose();
}

std::vector<int> TensorGrid::unravel(Eigen::Index flat) const {
  const int d = dims();
  std::vector<int> idx(d);
  for (int k = 0; k < d; ++k) {
    idx[k] = static_cast<int>(flat / strides_[k]);
    flat %= strides_[k];
  }
  return idx;
}

Eigen::Index TensorGrid::ravel(const std::vector<int>& idx) const {
  Eigen::Index flat = 0;
  for (int k = 0; k < dims(); ++k) flat += idx[k] * strides_[k];
  return flat;
}

DensityField::DensityField(GridPtr grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw std::invalid_argument("DensityField: null grid");
  if (values_.size() != grid_->total_points())
    throw std::logic_error("DensityField: value/grid size mismatch");
}

void DensityField::normalize() {
  values_ = values_.cwiseMax(kDensityFloor);
  const double mass = integrate(*grid_, values_);
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw std::domain_error("DensityField: non-normalizable field");
  values_ /= mass;
  values_ = values_.cwiseMax(kDensityFloor);
}

GridPtr build_grid(const Eigen::MatrixXd& data, double margin,
                   const std::vector<int>& points_per_dim) {
  if (data.rows() < 2) throw std::invalid_argument("build_grid: need n >= 2");
  if (margin < 0.0) throw std::invalid_argument("build_grid: negative margin");
  if (!data.allFinite())
    throw std::invalid_argument("build_grid: non-finite data entries");
  const int d = static_cast<int>(data.cols());
  if (static_cast<int>(points_per_dim.size()) != d)
    throw std::invalid_argument("build_grid: points_per_dim size mismatch");

  GridSpec spec;
  spec.lower.resize(d);
  spec.upper.resize(d);
  spec.points_per_dim = points_per_dim;
  for (int k = 0; k < d; ++k) {
    const double lo = data.col(k).minCoeff();
    const double hi = data.col(k).maxCoeff();
    const double range = hi - lo;
    if (range == 0.0) {
      std::cerr << "build_grid: dimension " << k
                << " is constant; expanding by fallback width 1.0\n";
      spec.lower[k] = lo - 1.0;
      spec.upper[k] = hi + 1.0;
    } else {
      spec.lower[k] = lo - margin * range;
      spec.upper[k] = hi + margin * range;
    }
  }
  return std::make_shared<TensorGrid>(std::move(spec));
}

double integrate(const TensorGrid& grid, const Eigen::VectorXd& values) {
  if (values.size() != grid.total_points())
    throw std::logic_error("integrate: value/grid size mismatch");
  return grid.quad_weights().dot(values);
}

double integrate(const DensityField& field) {
  return integrate(field.grid(), field.values());
}

Eigen::VectorXd marginalize(const TensorGrid& grid,
                            const Eigen::VectorXd& values, int keep_dim) {
  if (keep_dim < 0 || keep_dim >= grid.dims())
    throw std::logic_error("marginalize: dimension out of range");
  if (values.size() != grid.total_points())
    throw std::logic_error("marginalize: value/grid size mismatch");
  const int d = grid.dims();
  const int nk = grid.spec().points_per_dim[keep_dim];
  Eigen::VectorXd out = Eigen::VectorXd::Zero(nk);
  for (Eigen::Index flat = 0; flat < grid.total_points(); ++flat) {
    const auto idx = grid.unravel(flat);
    // weight over all dims except keep_dim
    double w = grid.quad_weights()[flat] /
               grid.axis_weights(keep_dim)[idx[keep_dim]];
    (void)d;
    out[idx[keep_dim]] += w * values[flat];
  }
  return out;
}

Eigen::VectorXd marginalize(const DensityField& field, int keep_dim) {
  return marginalize(field.grid(), field.values(), keep_dim);
}

namespace {

// Locates x on an axis: cell index and fractional position. Clamps points
// within tol of the boundary, throws beyond it.
void locate(const Eigen::VectorXd& axis, double x, int& cell, double& frac) {
  const double lo = axis[0];
  const double hi = axis[axis.size() - 1];
  const double tol = 1e-9 * std::max(1.0, hi - lo);
  if (x < lo) {
    if (x < lo - tol)
      throw std::domain_error("interpolate: point outside domain");
    x = lo;
  } else if (x > hi) {
    if (x > hi + tol)
      throw std::domain_error("interpolate: point outside domain");
    x = hi;
  }
  const int n = static_cast<int>(axis.size());
  const double h = (hi - lo) / (n - 1);
  cell = std::min(n - 2, std::max(0, static_cast<int>((x - lo) / h)));
  frac = (x - axis[cell]) / (axis[cell + 1] - axis[cell]);
  frac = std::min(1.0, std::max(0.0, frac));
}

}  // namespace

double interpolate(const TensorGrid& grid, const Eigen::VectorXd& values,
                   const Eigen::VectorXd& x) {
  const int d = grid.dims();
  if (x.size() != d) throw std::logic_error("interpolate: dimension mismatch");
  if (values.size() != grid.total_points())
    throw std::logic_error("interpolate: value/grid size mismatch");
  std::vector<int> cell(d);
  std::vector<double> frac(d);
  for (int k = 0; k < d; ++k) locate(grid.axis(k), x[k], cell[k], frac[k]);

  // accumulate over the 2^d cell corners
  double result = 0.0;
  std::vector<int> idx(d);
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    for (int k = 0; k < d; ++k) {
      const bool high = corner & (1 << k);
      w *= high ? frac[k] : 1.0 - frac[k];
      idx[k] = cell[k] + (high ? 1 : 0);
    }
    if (w != 0.0) result += w * values[grid.ravel(idx)];
  }
  return result;
}

double interpolate(const DensityField& field, const Eigen::VectorXd& x) {
  return interpolate(field.grid(), field.values(), x);
}

double interpolate1d(const Eigen::VectorXd& axis, const Eigen::VectorXd& values,
                     double x) {
  if (axis.size() != values.size())
    throw std::logic_error("interpolate1d: size mismatch");
  int cell;
  double frac;
  locate(axis, x, cell, frac);
  return (1.0 - frac) * values[cell] + frac * values[cell + 1];
}

void dump_density_csv(const DensityField& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const auto& grid = field.grid();
  const int d = grid.dims();
  for (int k = 0; k < d; ++k) out << "x" << (k + 1) << ",";
  out << "value\n";
  out.precision(17);
  for (Eigen::Index flat = 0; flat < grid.total_points(); ++flat) {
    for (int k = 0; k < d; ++k) out << grid.nodes()(flat, k) << ",";
    out << field.values()[flat] << "\n";
  }
}

}  // namespace npmix
