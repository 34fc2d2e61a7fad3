#include "npmix/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "npmix/init.hpp"
#include "npmix/metrics.hpp"
#include "npmix/rng.hpp"

namespace npmix {

double Marginal::quantile(double p) const {
  if (family == MarginalFamily::Normal) return mu + sigma * norm_quantile(p);
  const double b = sigma / std::sqrt(2.0);
  return p < 0.5 ? mu + b * std::log(2.0 * p)
                 : mu - b * std::log(2.0 * (1.0 - p));
}

void ComponentSpec::validate() const {
  if (!(weight > 0.0)) throw std::invalid_argument("ComponentSpec: weight <= 0");
  if (marginals.empty())
    throw std::invalid_argument("ComponentSpec: no marginals");
  for (const auto& mg : marginals)
    if (!(mg.sigma > 0.0))
      throw std::invalid_argument("ComponentSpec: sigma <= 0");
  if (rho < rho_min(copula) || rho > rho_max(copula))
    throw std::invalid_argument("ComponentSpec: rho outside family range");
}

std::vector<ComponentSpec> table1_components() {
  using MF = MarginalFamily;
  std::vector<ComponentSpec> specs(3);
  specs[0] = {1.0 / 3.0,
              {{MF::Normal, -3.0, 2.0}, {MF::Laplace, 0.0, 0.7}},
              CopulaFamily::FGM,
              -0.5};
  specs[1] = {1.0 / 3.0,
              {{MF::Normal, 0.0, 0.7}, {MF::Laplace, 3.0, 1.4}},
              CopulaFamily::FGM,
              0.5};
  specs[2] = {1.0 / 3.0,
              {{MF::Normal, 3.0, 1.4}, {MF::Laplace, 0.0, 2.8}},
              CopulaFamily::FGM,
              0.0};
  return specs;
}

std::pair<double, double> sample_fgm_pair(double rho, std::mt19937_64& rng) {
  if (rho < -1.0 || rho > 1.0)
    throw std::domain_error("sample_fgm_pair: rho outside [-1,1]");
  const double u = uniform01(rng);
  const double w = uniform01(rng);
  const double a = rho * (1.0 - 2.0 * u);
  if (std::abs(a) < 1e-12) return {u, w};
  // solve a v^2 - (1+a) v + w = 0 for the root in [0,1]
  const double disc = (1.0 + a) * (1.0 + a) - 4.0 * a * w;
  const double v = (1.0 + a - std::sqrt(std::max(disc, 0.0))) / (2.0 * a);
  return {u, std::clamp(v, 1e-15, 1.0 - 1e-15)};
}

std::pair<double, double> sample_gaussian_copula_pair(double rho,
                                                      std::mt19937_64& rng) {
  const double z1 = norm_quantile(uniform01(rng));
  const double z2 = norm_quantile(uniform01(rng));
  const double y = rho * z1 + std::sqrt(1.0 - rho * rho) * z2;
  const double eps = 1e-15;
  return {std::clamp(norm_cdf(z1), eps, 1.0 - eps),
          std::clamp(norm_cdf(y), eps, 1.0 - eps)};
}

Dataset sample_mixture(const std::vector<ComponentSpec>& specs, int n,
                       uint64_t seed) {
  if (specs.empty()) throw std::invalid_argument("sample_mixture: no specs");
  double wsum = 0.0;
  for (const auto& s : specs) {
    s.validate();
    wsum += s.weight;
  }
  if (std::abs(wsum - 1.0) > 1e-10)
    throw std::invalid_argument("sample_mixture: weights must sum to 1");
  const int d = static_cast<int>(specs[0].marginals.size());
  for (const auto& s : specs)
    if (static_cast<int>(s.marginals.size()) != d)
      throw std::invalid_argument("sample_mixture: dimension mismatch");
  if (d != 2)
    throw std::invalid_argument("sample_mixture: copula sampling is bivariate");

  std::mt19937_64 rng(seed);
  Dataset ds;
  ds.data.resize(n, d);
  ds.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    const double r = uniform01(rng);
    int j = 0;
    double acc = specs[0].weight;
    while (r > acc && j + 1 < static_cast<int>(specs.size()))
      acc += specs[++j].weight;
    const auto& spec = specs[j];
    const auto [u, v] =
        spec.copula == CopulaFamily::FGM
            ? sample_fgm_pair(spec.rho, rng)
            : sample_gaussian_copula_pair(spec.rho, rng);
    ds.data(i, 0) = spec.marginals[0].quantile(u);
    ds.data(i, 1) = spec.marginals[1].quantile(v);
    ds.labels[i] = j;
  }
  return ds;
}

std::vector<int> match_components(const MixtureState& state,
                                  const std::vector<ComponentSpec>& specs) {
  const int m = state.num_components();
  if (static_cast<int>(specs.size()) != m)
    throw std::invalid_argument("match_components: component count mismatch");
  const int d = state.f[0].grid().dims();

  Eigen::MatrixXd fit_means(m, d);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < d; ++k) {
      const Eigen::VectorXd marg = marginalize(state.f[j], k);
      const auto& ax = state.f[j].grid().axis(k);
      const auto& w = state.f[j].grid().axis_weights(k);
      fit_means(j, k) = (ax.array() * w.array() * marg.array()).sum() /
                        (w.array() * marg.array()).sum();
    }

  std::vector<int> perm(m), best_perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < d; ++k) {
        const double diff = fit_means(j, k) - specs[perm[j]].marginals[k].mu;
        cost += diff * diff;
      }
    if (cost < best) {
      best = cost;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best_perm;
}

namespace {

StudyRow run_one(const std::vector<ComponentSpec>& specs,
                 const StudyConfig& config, int n, int rep, uint64_t seed) {
  StudyRow row;
  row.n = n;
  row.replication = rep;
  const int m = static_cast<int>(specs.size());
  try {
    const Dataset ds = sample_mixture(specs, n, seed);
    const GridPtr grid =
        build_grid(ds.data, config.margin, config.points_per_dim);
    const BandwidthMatrix H = config.bandwidth
                                  ? BandwidthMatrix(*config.bandwidth)
                                  : normal_reference_bandwidth(ds.data);
    const std::vector<int> labels0 =
        kmeans(ds.data, m, config.init_seed + rep);
    const MixtureState init =
        init_state_from_labels(ds.data, labels0, grid, H);
    const FitResult res = fit(ds.data, init, H, config.fit);

    const std::vector<int> perm = match_components(res.state, specs);
    row.rho_hat.resize(m);
    row.lambda_hat.resize(m);
    for (int j = 0; j < m; ++j) {
      row.rho_hat[perm[j]] = res.state.rho[j];
      row.lambda_hat[perm[j]] = res.state.lambda[j];
    }
    row.misclassified =
        misclassification(classify(res.state, ds.data, H), ds.labels, m).count;
    row.objective_final = res.trace.rows.back().objective;
    row.ok = true;
  } catch (const std::exception&) {
    row.ok = false;
  }
  return row;
}

}  // namespace

StudyReport run_study(const std::vector<ComponentSpec>& specs,
                      const StudyConfig& config) {
  if (config.replications < 2)
    throw std::invalid_argument("run_study: need >= 2 replications");
  const int m = static_cast<int>(specs.size());

  struct Task {
    int n, rep;
    uint64_t seed;
  };
  std::vector<Task> tasks;
  for (int n : config.n_values)
    for (int rep = 0; rep < config.replications; ++rep)
      tasks.push_back({n, rep, config.base_seed +
                                   static_cast<uint64_t>(rep) +
                                   1000003ull * static_cast<uint64_t>(n)});

  StudyReport report;
  report.rows.resize(tasks.size());
  const int workers = std::max(1, config.workers);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      report.rows[i] =
          run_one(specs, config, tasks[i].n, tasks[i].rep, tasks[i].seed);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  Eigen::VectorXd rho_true(m);
  for (int j = 0; j < m; ++j) rho_true[j] = specs[j].rho;
  for (int n : config.n_values) {
    std::vector<Eigen::VectorXd> estimates;
    for (const auto& row : report.rows)
      if (row.ok && row.n == n) estimates.push_back(row.rho_hat);
    StudyAggregate agg;
    agg.n = n;
    agg.successes = static_cast<int>(estimates.size());
    if (estimates.size() >= 2) {
      const BiasVariance bv = bias_variance(estimates, rho_true);
      agg.squared_bias = bv.squared_bias;
      agg.variance = bv.variance;
    }
    report.aggregates.push_back(agg);
  }
  return report;
}

void StudyReport::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  int mm = 0;
  for (const auto& r : rows)
    if (r.ok) {
      mm = static_cast<int>(r.rho_hat.size());
      break;
    }
  out << "n,replication,status";
  for (int j = 1; j <= mm; ++j) out << ",rho_hat_" << j;
  for (int j = 1; j <= mm; ++j) out << ",lambda_hat_" << j;
  out << ",misclassified,objective_final\n";
  out.precision(17);
  for (const auto& r : rows) {
    out << r.n << "," << r.replication << "," << (r.ok ? "ok" : "failed");
    for (int j = 0; j < mm; ++j)
      out << "," << (r.ok ? std::to_string(r.rho_hat[j]) : "");
    for (int j = 0; j < mm; ++j)
      out << "," << (r.ok ? std::to_string(r.lambda_hat[j]) : "");
    out << "," << (r.ok ? std::to_string(r.misclassified) : "") << ","
        << (r.ok ? std::to_string(r.objective_final) : "") << "\n";
  }
  out << "# aggregate: n,successes,squared_bias,variance\n";
  for (const auto& a : aggregates)
    out << "aggregate," << a.n << "," << a.successes << "," << a.squared_bias
        << "," << a.variance << "\n";
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const int d = static_cast<int>(ds.data.cols());
  for (int k = 1; k <= d; ++k) out << "x" << k << ",";
  out << "label\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < ds.data.rows(); ++i) {
    for (int k = 0; k < d; ++k) out << ds.data(i, k) << ",";
    out << ds.labels[i] << "\n";
  }
}

}  // namespace npmix
