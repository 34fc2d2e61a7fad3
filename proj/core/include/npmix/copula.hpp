#pragma once

#include <Eigen/Dense>
#include <vector>

#include "npmix/grid.hpp"

namespace npmix {

enum class CopulaFamily { FGM, GaussianBivariate };

/// Half-width keeping the Gaussian-copula correlation away from +-1.
inline constexpr double kGaussianRhoMargin = 1e-3;

double rho_min(CopulaFamily family);
double rho_max(CopulaFamily family);

/// Standard normal quantile, Acklam's rational approximation
/// (absolute error below 1.2e-9). p must lie in (0,1).
double norm_quantile(double p);
double norm_cdf(double x);

/// FGM density c(u,v;rho) = 1 + rho (1-2u)(1-2v), rho in [-1,1].
double fgm_density(double u, double v, double rho);

/// Bivariate Gaussian copula density at (u,v), rho within the open range.
double gaussian_copula_density(double u, double v, double rho);

/// Dispatch on the family tag (bivariate only).
double copula_density(CopulaFamily family, double u, double v, double rho);

/// Monotone per-dimension CDF tables of a joint grid density, with inverse
/// lookup. Built by cumulative trapezoid integration of each marginal,
/// rescaled to end exactly at 1.
class MarginalTransform {
 public:
  explicit MarginalTransform(const DensityField& field);

  int dims() const { return static_cast<int>(cdf_.size()); }
  /// Marginal density values on axis k.
  const Eigen::VectorXd& marginal(int k) const { return marginal_[k]; }
  /// CDF F_k(x); 0 at the lower bound, 1 at the upper bound.
  double cdf(int k, double x) const;
  /// Quantile F_k^{-1}(p), p in [0,1].
  double quantile(int k, double p) const;
  /// Marginal density f_k(x) by linear interpolation.
  double density(int k, double x) const;

 private:
  std::vector<Eigen::VectorXd> axes_;
  std::vector<Eigen::VectorXd> marginal_;
  std::vector<Eigen::VectorXd> cdf_;
};

/// Ratio f(x) / prod_k f_k(x_k) at a data point, plus its copula coordinates
/// u_k = F_k(x_k). flagged marks points too close to the tails for a stable
/// ratio; they are excluded from the parameter fit.
struct CopulaPoint {
  Eigen::VectorXd u;
  double density_ratio = 0.0;
  bool flagged = false;
};

CopulaPoint empirical_copula_density(const DensityField& field,
                                     const MarginalTransform& marginals,
                                     const Eigen::VectorXd& x);

struct RhoFit {
  double rho = 0.0;
  bool degenerate = false;
};

/// Least-squares fit of rho: minimizes the weighted mean of
/// [c(u_i;rho) - chat_i]^2 over the family's range. Coarse 101-point grid
/// followed by golden-section refinement to |drho| < 1e-6. Requires at
/// least 5 points; an empty weight vector means equal weights.
RhoFit fit_rho(CopulaFamily family, const std::vector<CopulaPoint>& points,
               const Eigen::VectorXd& weights = Eigen::VectorXd());

/// Exact linear least-squares solution for the FGM family (test oracle and
/// cross-check for the search path). Clipped to [-1,1].
RhoFit fit_rho_fgm_closed_form(const std::vector<CopulaPoint>& points,
                               const Eigen::VectorXd& weights =
                                   Eigen::VectorXd());

}  // namespace npmix
