#include "npmix/copula.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace npmix {

double rho_min(CopulaFamily family) {
  return family == CopulaFamily::FGM ? -1.0 : -1.0 + kGaussianRhoMargin;
}

double rho_max(CopulaFamily family) {
  return family == CopulaFamily::FGM ? 1.0 : 1.0 - kGaussianRhoMargin;
}

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("norm_quantile: p outside (0,1)");
  // Acklam's approximation, |error| < 1.15e-9 after one Halley step.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // one Halley refinement using the exact CDF
  const double e = norm_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double fgm_density(double u, double v, double rho) {
  if (rho < -1.0 || rho > 1.0)
    throw std::domain_error("fgm_density: rho outside [-1,1]");
  return 1.0 + rho * (1.0 - 2.0 * u) * (1.0 - 2.0 * v);
}

double gaussian_copula_density(double u, double v, double rho) {
  if (!(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0))
    throw std::domain_error("gaussian_copula_density: u,v outside (0,1)");
  if (!(rho >= -1.0 + kGaussianRhoMargin && rho <= 1.0 - kGaussianRhoMargin))
    throw std::domain_error("gaussian_copula_density: rho outside range");
  const double z1 = norm_quantile(u);
  const double z2 = norm_quantile(v);
  const double r2 = 1.0 - rho * rho;
  const double expo =
      -(rho * rho * (z1 * z1 + z2 * z2) - 2.0 * rho * z1 * z2) / (2.0 * r2);
  return std::exp(expo) / std::sqrt(r2);
}

double copula_density(CopulaFamily family, double u, double v, double rho) {
  return family == CopulaFamily::FGM ? fgm_density(u, v, rho)
                                     : gaussian_copula_density(u, v, rho);
}

MarginalTransform::MarginalTransform(const DensityField& field) {
  const auto& grid = field.grid();
  const int d = grid.dims();
  axes_.resize(d);
  marginal_.resize(d);
  cdf_.resize(d);
  for (int k = 0; k < d; ++k) {
    axes_[k] = grid.axis(k);
    marginal_[k] = marginalize(field, k);
    const int n = static_cast<int>(axes_[k].size());
    Eigen::VectorXd F(n);
    F[0] = 0.0;
    for (int i = 1; i < n; ++i) {
      const double h = axes_[k][i] - axes_[k][i - 1];
      F[i] = F[i - 1] + 0.5 * h * (marginal_[k][i] + marginal_[k][i - 1]);
    }
    // tie-breaking slope keeps the table strictly increasing, then rescale
    // so F spans [0,1] exactly
    for (int i = 0; i < n; ++i) F[i] += 1e-12 * (axes_[k][i] - axes_[k][0]);
    if (!(F[n - 1] > 0.0))
      throw std::domain_error("MarginalTransform: zero-mass marginal");
    F /= F[n - 1];
    cdf_[k] = F;
  }
}

double MarginalTransform::cdf(int k, double x) const {
  return std::clamp(interpolate1d(axes_[k], cdf_[k], x), 0.0, 1.0);
}

double MarginalTransform::quantile(int k, double p) const {
  const Eigen::VectorXd& F = cdf_[k];
  const Eigen::VectorXd& ax = axes_[k];
  if (p <= F[0]) return ax[0];
  const int n = static_cast<int>(F.size());
  if (p >= F[n - 1]) return ax[n - 1];
  // F strictly increasing: binary search for the bracketing cell
  int lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (F[mid] <= p ? lo : hi) = mid;
  }
  const double t = (p - F[lo]) / (F[hi] - F[lo]);
  return ax[lo] + t * (ax[hi] - ax[lo]);
}

double MarginalTransform::density(int k, double x) const {
  return interpolate1d(axes_[k], marginal_[k], x);
}

CopulaPoint empirical_copula_density(const DensityField& field,
                                     const MarginalTransform& marginals,
                                     const Eigen::VectorXd& x) {
  const int d = field.grid().dims();
  CopulaPoint pt;
  pt.u.resize(d);
  double denom = 1.0;
  for (int k = 0; k < d; ++k) {
    pt.u[k] = marginals.cdf(k, x[k]);
    double fk = marginals.density(k, x[k]);
    if (fk < 10.0 * kDensityFloor) {
      fk = std::max(fk, kDensityFloor);
      pt.flagged = true;
    }
    denom *= fk;
    if (pt.u[k] < 1e-3 || pt.u[k] > 1.0 - 1e-3) pt.flagged = true;
  }
  pt.density_ratio = interpolate(field, x) / denom;
  return pt;
}

namespace {

double sum_of_squares(CopulaFamily family, double rho,
                      const std::vector<CopulaPoint>& pts,
                      const Eigen::VectorXd& w) {
  double s = 0.0, wsum = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    const double wi = w.size() ? w[static_cast<Eigen::Index>(i)] : 1.0;
    const double r =
        copula_density(family, pts[i].u[0], pts[i].u[1], rho) -
        pts[i].density_ratio;
    s += wi * r * r;
    wsum += wi;
  }
  return s / wsum;
}

}  // namespace

RhoFit fit_rho(CopulaFamily family, const std::vector<CopulaPoint>& points,
               const Eigen::VectorXd& weights) {
  std::vector<CopulaPoint> pts;
  Eigen::VectorXd w;
  std::vector<double> wkeep;
  for (size_t i = 0; i < points.size(); ++i) {
    if (points[i].flagged) continue;
    pts.push_back(points[i]);
    if (weights.size())
      wkeep.push_back(weights[static_cast<Eigen::Index>(i)]);
  }
  if (pts.size() < 5)
    throw std::runtime_error("fit_rho: fewer than 5 usable points");
  if (!wkeep.empty())
    w = Eigen::Map<Eigen::VectorXd>(wkeep.data(),
                                    static_cast<Eigen::Index>(wkeep.size()));

  // degenerate design: every point sits on the center lines of the square
  if (family == CopulaFamily::FGM) {
    double zmax = 0.0;
    for (const auto& p : pts)
      zmax = std::max(zmax,
                      std::abs((1.0 - 2.0 * p.u[0]) * (1.0 - 2.0 * p.u[1])));
    if (zmax < 1e-12) return {0.0, true};
  }

  const double lo = rho_min(family), hi = rho_max(family);
  double best = lo, best_val = sum_of_squares(family, lo, pts, w);
  for (int i = 1; i <= 100; ++i) {
    const double rho = std::min(hi, lo + (hi - lo) * i / 100.0);
    const double val = sum_of_squares(family, rho, pts, w);
    if (val < best_val) {
      best_val = val;
      best = rho;
    }
  }

  // golden-section refinement around the coarse minimizer
  const double step = (hi - lo) / 100.0;
  double a = std::max(lo, best - step), b = std::min(hi, best + step);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  double f1 = sum_of_squares(family, c1, pts, w);
  double f2 = sum_of_squares(family, c2, pts, w);
  while (b - a > 1e-6) {
    if (f1 < f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - gr * (b - a);
      f1 = sum_of_squares(family, c1, pts, w);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + gr * (b - a);
      f2 = sum_of_squares(family, c2, pts, w);
    }
  }
  return {(a + b) / 2.0, false};
}

RhoFit fit_rho_fgm_closed_form(const std::vector<CopulaPoint>& points,
                               const Eigen::VectorXd& weights) {
  double num = 0.0, den = 0.0;
  size_t used = 0;
  for (size_t i = 0; i < points.size(); ++i) {
    if (points[i].flagged) continue;
    const double wi =
        weights.size() ? weights[static_cast<Eigen::Index>(i)] : 1.0;
    const double z =
        (1.0 - 2.0 * points[i].u[0]) * (1.0 - 2.0 * points[i].u[1]);
    num += wi * z * (points[i].density_ratio - 1.0);
    den += wi * z * z;
    ++used;
  }
  if (used < 5)
    throw std::runtime_error("fit_rho_fgm_closed_form: fewer than 5 points");
  if (den < 1e-12) return {0.0, true};
  return {std::clamp(num / den, -1.0, 1.0), false};
}

}  // namespace npmix
