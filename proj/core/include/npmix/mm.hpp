#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "npmix/copula.hpp"
#include "npmix/grid.hpp"
#include "npmix/kernels.hpp"
#include "npmix/smoothing.hpp"

namespace npmix {

/// Full estimate at one iteration: mixing proportions, component densities,
/// copula parameters.
struct MixtureState {
  Eigen::VectorXd lambda;
  std::vector<DensityField> f;
  Eigen::VectorXd rho;
  int t = 0;

  int num_components() const { return static_cast<int>(f.size()); }

  /// Checks the simplex, unit-integral, and floor invariants.
  void validate() const;
};

struct FitConfig {
  int max_iter = 200;
  double rel_tol = 1e-5;
  CopulaFamily copula_family = CopulaFamily::FGM;
  /// Weight the rho least squares by posterior responsibilities.
  bool weighted_rho_fit = true;
};

struct TraceRow {
  int iter = 0;
  double objective = 0.0;
  double penalty = 0.0;  // 1 - sum_j lambda_j * integral of Nf_j
  Eigen::VectorXd lambda;
  Eigen::VectorXd rho;
  double max_density_delta = 0.0;
};

struct FitTrace {
  std::vector<TraceRow> rows;

  /// CSV columns: iter, objective, penalty, lambda_1..m, rho_1..m,
  /// max_density_delta.
  void write_csv(const std::string& path) const;
};

struct FitResult {
  MixtureState state;
  FitTrace trace;
  bool converged = false;
};

struct ObjectiveValue {
  double value = 0.0;
  double penalty = 0.0;
};

/// Posterior responsibilities w_ij = lambda_j Nf_j(x_i) / sum_k ..., with the
/// nonlinear smoother evaluated at the data points by direct quadrature.
Eigen::MatrixXd posterior_weights(const MixtureState& state,
                                  const Eigen::MatrixXd& data,
                                  const BandwidthMatrix& H);

/// Empirical-measure lambda step: column means of the weight matrix.
Eigen::VectorXd update_lambda(const Eigen::MatrixXd& weights);

/// Density step for component j. lambda_next must be the freshly updated
/// proportions; the smoothing ratio in the kernel sum uses them.
DensityField update_density(int j, const MixtureState& state,
                            const Eigen::MatrixXd& data,
                            const BandwidthMatrix& H,
                            const Eigen::VectorXd& lambda_next);

/// Empirical smoothed negative log-likelihood
///   -(1/n) sum_i log (M_lambda N f)(x_i)
/// plus the nonnegativity diagnostic from the KL decomposition.
ObjectiveValue objective(const MixtureState& state, const Eigen::MatrixXd& data,
                         const BandwidthMatrix& H);

/// Hard assignment by posterior argmax; ties go to the lowest index.
std::vector<int> classify(const MixtureState& state,
                          const Eigen::MatrixXd& data,
                          const BandwidthMatrix& H);

/// The MM loop: weights, lambda step, density step, copula-parameter fit,
/// objective, until the relative objective change drops below rel_tol or
/// max_iter is hit. The bandwidth stays fixed throughout.
FitResult fit(const Eigen::MatrixXd& data, const MixtureState& init,
              const BandwidthMatrix& H, const FitConfig& config);

/// Rho estimate for a single component density against the data points
/// (marginal CDF transform, density ratio, least squares).
RhoFit fit_component_rho(const DensityField& field, const Eigen::MatrixXd& data,
                         CopulaFamily family,
                         const Eigen::VectorXd& weights = Eigen::VectorXd());

}  // namespace npmix
