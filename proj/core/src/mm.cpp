#include "npmix/mm.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace npmix {

void MixtureState::validate() const {
  const int m = num_components();
  if (m == 0) throw std::logic_error("MixtureState: no components");
  if (lambda.size() != m || rho.size() != m)
    throw std::logic_error("MixtureState: lambda/rho size mismatch");
  if (lambda.minCoeff() <= 0.0 || std::abs(lambda.sum() - 1.0) > 1e-10)
    throw std::logic_error("MixtureState: lambda not on the simplex");
  for (const auto& field : f) {
    if (field.values().minCoeff() < kDensityFloor)
      throw std::logic_error("MixtureState: density below floor");
    if (std::abs(integrate(field) - 1.0) > 1e-8)
      throw std::logic_error("MixtureState: density not normalized");
  }
}

void FitTrace::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const int m = rows.empty() ? 0 : static_cast<int>(rows.front().lambda.size());
  out << "iter,objective,penalty";
  for (int j = 1; j <= m; ++j) out << ",lambda_" << j;
  for (int j = 1; j <= m; ++j) out << ",rho_" << j;
  out << ",max_density_delta\n";
  out.precision(17);
  for (const auto& r : rows) {
    out << r.iter << "," << r.objective << "," << r.penalty;
    for (int j = 0; j < m; ++j) out << "," << r.lambda[j];
    for (int j = 0; j < m; ++j) out << "," << r.rho[j];
    out << "," << r.max_density_delta << "\n";
  }
}

namespace {

// Nf_j at the data points for all components, as an n x m matrix.
Eigen::MatrixXd nonlinear_at_data(const MixtureState& state,
                                  const PointKernel& pk) {
  const int m = state.num_components();
  Eigen::MatrixXd Nfd(pk.num_points(), m);
  for (int j = 0; j < m; ++j)
    Nfd.col(j) = pk.nonlinear_at_points(state.f[j].values());
  return Nfd;
}

Eigen::MatrixXd weights_from_nfd(const Eigen::VectorXd& lambda,
                                 const Eigen::MatrixXd& Nfd) {
  Eigen::MatrixXd W = Nfd * lambda.asDiagonal();
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    const double denom = W.row(i).sum();
    if (denom < 1e-300)
      throw std::logic_error("posterior_weights: vanishing mixture density");
    W.row(i) /= denom;
  }
  return W;
}

// Copula-parameter step used inside the fit loop. The updated density is a
// kernel sum over the data, so evaluating it back at a data point picks up
// that point's own kernel bump; at small bandwidths the inflated ratio is
// correlated with the copula design variable and drives the least squares
// to the parameter boundary. Three safeguards:
//   - subtract the point's own contribution from the joint and marginal
//     values (leave-one-out),
//   - flag points whose density is mostly their own bump — isolated points
//     carry no dependence information,
//   - clamp FGM ratios to the family's attainable range [0, 2],
// and weight the least squares by the marginal density product (the ratio's
// variance grows as the marginals shrink), optionally times the posterior
// responsibility so points of other components do not contaminate the fit.
RhoFit loo_component_rho(const DensityField& field, const Eigen::MatrixXd& data,
                         const Eigen::VectorXd& bump_coef, CopulaFamily family,
                         const BandwidthMatrix& H,
                         const Eigen::VectorXd& posterior) {
  const int d = static_cast<int>(data.cols());
  const double k_joint =
      std::pow(2.0 * std::numbers::pi, -0.5 * d) / std::sqrt(H.det());
  Eigen::VectorXd k_marg(d);
  for (int k = 0; k < d; ++k)
    k_marg[k] = 1.0 / std::sqrt(2.0 * std::numbers::pi * H.matrix()(k, k));

  MarginalTransform marginals(field);
  std::vector<CopulaPoint> pts;
  pts.reserve(data.rows());
  Eigen::VectorXd w(data.rows());
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const Eigen::VectorXd x = data.row(i).transpose();
    CopulaPoint cp = empirical_copula_density(field, marginals, x);
    const double joint = interpolate(field, x);
    const double self = k_joint * bump_coef[i];
    if (self > 0.5 * joint) cp.flagged = true;
    double denom = 1.0;
    for (int k = 0; k < d; ++k)
      denom *= std::max(marginals.density(k, x[k]) - k_marg[k] * bump_coef[i],
                        kDensityFloor);
    cp.density_ratio = std::max(joint - self, kDensityFloor) / denom;
    if (family == CopulaFamily::FGM)
      cp.density_ratio = std::min(cp.density_ratio, 2.0);
    w[i] = denom;
    if (posterior.size() > 0) w[i] *= posterior[i];
    pts.push_back(std::move(cp));
  }
  return fit_rho(family, pts, w);
}

}  // namespace

Eigen::MatrixXd posterior_weights(const MixtureState& state,
                                  const Eigen::MatrixXd& data,
                                  const BandwidthMatrix& H) {
  state.validate();
  PointKernel pk(state.f[0].grid_ptr(), H, data);
  return weights_from_nfd(state.lambda, nonlinear_at_data(state, pk));
}

Eigen::VectorXd update_lambda(const Eigen::MatrixXd& weights) {
  if (weights.rows() == 0) throw std::invalid_argument("update_lambda: empty");
  return weights.colwise().mean().transpose();
}

DensityField update_density(int j, const MixtureState& state,
                            const Eigen::MatrixXd& data,
                            const BandwidthMatrix& H,
                            const Eigen::VectorXd& lambda_next) {
  PointKernel pk(state.f[j].grid_ptr(), H, data);
  const Eigen::MatrixXd Nfd = nonlinear_at_data(state, pk);
  const Eigen::VectorXd mix = Nfd * lambda_next;
  const Eigen::VectorXd ratio = Nfd.col(j).cwiseQuotient(mix);
  DensityField out(state.f[j].grid_ptr(), pk.spread_to_grid(ratio));
  out.normalize();
  return out;
}

ObjectiveValue objective(const MixtureState& state, const Eigen::MatrixXd& data,
                         const BandwidthMatrix& H) {
  state.validate();
  PointKernel pk(state.f[0].grid_ptr(), H, data);
  const Eigen::MatrixXd Nfd = nonlinear_at_data(state, pk);
  const Eigen::VectorXd mix = Nfd * state.lambda;
  ObjectiveValue out;
  out.value = -mix.array().log().mean();
  SmoothingOperator op(state.f[0].grid_ptr(), H);
  double mass = 0.0;
  for (int j = 0; j < state.num_components(); ++j)
    mass += state.lambda[j] *
            integrate(state.f[j].grid(), op.nonlinear(state.f[j].values()));
  out.penalty = 1.0 - mass;
  return out;
}

std::vector<int> classify(const MixtureState& state,
                          const Eigen::MatrixXd& data,
                          const BandwidthMatrix& H) {
  const Eigen::MatrixXd W = posterior_weights(state, data, H);
  std::vector<int> labels(W.rows());
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    int best = 0;
    for (int j = 1; j < W.cols(); ++j)
      if (W(i, j) > W(i, best)) best = j;
    labels[i] = best;
  }
  return labels;
}

RhoFit fit_component_rho(const DensityField& field, const Eigen::MatrixXd& data,
                         CopulaFamily family, const Eigen::VectorXd& weights) {
  MarginalTransform marginals(field);
  std::vector<CopulaPoint> pts;
  pts.reserve(data.rows());
  for (Eigen::Index i = 0; i < data.rows(); ++i)
    pts.push_back(
        empirical_copula_density(field, marginals, data.row(i).transpose()));
  return fit_rho(family, pts, weights);
}

FitResult fit(const Eigen::MatrixXd& data, const MixtureState& init,
              const BandwidthMatrix& H, const FitConfig& config) {
  init.validate();
  if (config.max_iter < 0 || !(config.rel_tol > 0.0))
    throw std::invalid_argument("fit: bad config");
  if (data.cols() != init.f[0].grid().dims())
    throw std::invalid_argument("fit: data dimension mismatch");

  FitResult result{init, {}, false};
  if (config.max_iter == 0) return result;

  const GridPtr grid = init.f[0].grid_ptr();
  const int m = init.num_components();
  SmoothingOperator grid_op(grid, H);
  PointKernel pk(grid, H, data);

  MixtureState state = init;
  double prev_obj = 0.0;
  double pending_delta = 0.0;  // density change from the previous step
  for (int t = 0; t <= config.max_iter; ++t) {
    const Eigen::MatrixXd Nfd = nonlinear_at_data(state, pk);
    const Eigen::VectorXd mix = Nfd * state.lambda;
    if (mix.minCoeff() < 1e-300)
      throw std::logic_error("fit: vanishing mixture density at a data point");
    const double obj = -mix.array().log().mean();
    if (!std::isfinite(obj))
      throw std::runtime_error("fit: non-finite objective at iteration " +
                               std::to_string(t));

    double mass = 0.0;
    std::vector<Eigen::VectorXd> Nfg(m);
    for (int j = 0; j < m; ++j) {
      Nfg[j] = grid_op.nonlinear(state.f[j].values());
      mass += state.lambda[j] * integrate(*grid, Nfg[j]);
    }

    TraceRow row;
    row.iter = t;
    row.objective = obj;
    row.penalty = 1.0 - mass;
    row.lambda = state.lambda;
    row.rho = state.rho;
    row.max_density_delta = pending_delta;
    result.trace.rows.push_back(row);

    if (t > 0 && std::abs(obj - prev_obj) < config.rel_tol *
                                                (1.0 + std::abs(prev_obj))) {
      result.converged = true;
      break;
    }
    prev_obj = obj;
    if (t == config.max_iter) break;

    // lambda step: average the responsibilities under the current state
    const Eigen::MatrixXd W = weights_from_nfd(state.lambda, Nfd);
    const Eigen::VectorXd lambda_next = update_lambda(W);

    // density step: kernel sum of the smoothing ratio, normalized over
    // the domain (the ratio uses the updated proportions)
    const Eigen::VectorXd mix_next = Nfd * lambda_next;
    MixtureState next;
    next.lambda = lambda_next;
    next.rho = state.rho;
    next.t = t + 1;
    double max_delta = 0.0;
    std::vector<Eigen::VectorXd> bump_coefs(m);
    for (int j = 0; j < m; ++j) {
      const Eigen::VectorXd ratio = Nfd.col(j).cwiseQuotient(mix_next);
      const Eigen::VectorXd raw = pk.spread_to_grid(ratio);
      // per-point kernel coefficient after normalization, for the
      // leave-one-out correction in the copula step below
      bump_coefs[j] = ratio / integrate(*grid, raw);
      DensityField fj(grid, raw);
      fj.normalize();
      max_delta = std::max(
          max_delta, (fj.values() - state.f[j].values()).cwiseAbs().maxCoeff());
      next.f.push_back(std::move(fj));
    }

    // copula parameters follow the new densities; they feed reporting only
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXd w;
      if (config.weighted_rho_fit) w = W.col(j);
      try {
        next.rho[j] = loo_component_rho(next.f[j], data, bump_coefs[j],
                                        config.copula_family, H, w)
                          .rho;
      } catch (const std::runtime_error&) {
        // too few stable points this iteration; carry the previous value
      }
    }

    state = std::move(next);
    pending_delta = max_delta;
  }

  result.state = std::move(state);
  return result;
}

}  // namespace npmix
