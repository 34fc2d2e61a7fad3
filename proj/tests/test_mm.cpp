#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>

#include "helpers.hpp"
#include "npmix/csv.hpp"
#include "npmix/grid.hpp"
#include "npmix/init.hpp"
#include "npmix/kernels.hpp"
#include "npmix/mm.hpp"
#include "npmix/simulate.hpp"
#include "npmix/smoothing.hpp"

using namespace npmix;

namespace {

BandwidthMatrix table_bandwidth() {
  Eigen::MatrixXd Hm(2, 2);
  Hm << 0.05, 0.0, 0.0, 0.1;
  return BandwidthMatrix(Hm);
}

struct SmallProblem {
  Eigen::MatrixXd data;
  GridPtr grid;
  MixtureState init;
};

SmallProblem small_problem(uint64_t seed, int n = 120) {
  SmallProblem p{};
  Dataset ds = sample_mixture(table1_components(), n, seed);
  p.data = ds.data;
  p.grid = build_grid(p.data, 0.15, {40, 40});
  p.init = init_state_from_labels(p.data, kmeans(p.data, 3, 1), p.grid,
                                  table_bandwidth());
  return p;
}

}  // namespace

TEST_SUITE("mm") {

TEST_CASE("update_lambda is the column mean of the weights") {
  Eigen::MatrixXd W(3, 2);
  W << 0.2, 0.8, 0.5, 0.5, 0.8, 0.2;
  const Eigen::VectorXd lambda = update_lambda(W);
  CHECK(lambda[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(lambda[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(update_lambda(Eigen::MatrixXd(0, 2)),
                  std::invalid_argument);
}

TEST_CASE("posterior weights are the proportions for identical components") {
  SmallProblem p = small_problem(4, 60);
  Eigen::VectorXd kde =
      PointKernel(p.grid, table_bandwidth(), p.data)
          .spread_to_grid(Eigen::VectorXd::Ones(p.data.rows()));
  DensityField f(p.grid, kde);
  f.normalize();
  MixtureState s;
  s.lambda.resize(2);
  s.lambda << 0.3, 0.7;
  s.f = {f, f};
  s.rho = Eigen::VectorXd::Zero(2);
  s.validate();
  const Eigen::MatrixXd W = posterior_weights(s, p.data, table_bandwidth());
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    CHECK(W.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(W(i, 0) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(W(i, 1) == doctest::Approx(0.7).epsilon(1e-12));
  }
  // ties resolve to the lowest index under equal proportions
  s.lambda << 0.5, 0.5;
  const std::vector<int> labels = classify(s, p.data, table_bandwidth());
  for (int l : labels) CHECK(l == 0);
}

TEST_CASE("state validation enforces the simplex and density contract") {
  SmallProblem p = small_problem(4, 60);
  MixtureState s = p.init;
  s.validate();
  s.lambda[0] += 0.1;
  CHECK_THROWS_AS(s.validate(), std::logic_error);
  s = p.init;
  s.rho = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(s.validate(), std::logic_error);
  s = p.init;
  s.f[0].mutable_values() *= 2.0;
  CHECK_THROWS_AS(s.validate(), std::logic_error);
  MixtureState empty;
  CHECK_THROWS_AS(empty.validate(), std::logic_error);
}

TEST_CASE("single-component density step is the kernel density estimate") {
  SmallProblem p = small_problem(9, 80);
  Eigen::VectorXd kde =
      PointKernel(p.grid, table_bandwidth(), p.data)
          .spread_to_grid(Eigen::VectorXd::Ones(p.data.rows()));
  DensityField expected(p.grid, kde);
  expected.normalize();

  MixtureState s;
  s.lambda = Eigen::VectorXd::Ones(1);
  DensityField start(p.grid,
                     Eigen::VectorXd::Ones(p.grid->total_points()));
  start.normalize();
  s.f = {start};
  s.rho = Eigen::VectorXd::Zero(1);
  const DensityField next =
      update_density(0, s, p.data, table_bandwidth(), s.lambda);
  CHECK((next.values() - expected.values()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("objective matches a direct computation for one component") {
  SmallProblem p = small_problem(2, 80);
  Eigen::VectorXd kde =
      PointKernel(p.grid, table_bandwidth(), p.data)
          .spread_to_grid(Eigen::VectorXd::Ones(p.data.rows()));
  DensityField f(p.grid, kde);
  f.normalize();
  MixtureState s;
  s.lambda = Eigen::VectorXd::Ones(1);
  s.f = {f};
  s.rho = Eigen::VectorXd::Zero(1);

  const PointKernel pk(p.grid, table_bandwidth(), p.data);
  const Eigen::VectorXd nf = pk.nonlinear_at_points(f.values());
  const double manual = -nf.array().log().mean();
  const SmoothingOperator op(p.grid, table_bandwidth());
  const double mass = integrate(*p.grid, op.nonlinear(f.values()));

  const ObjectiveValue obj = objective(s, p.data, table_bandwidth());
  CHECK(obj.value == doctest::Approx(manual).epsilon(1e-10));
  CHECK(obj.penalty == doctest::Approx(1.0 - mass).epsilon(1e-10));
  CHECK(obj.penalty >= -1e-9);
}

TEST_CASE("fit validates its inputs") {
  SmallProblem p = small_problem(4, 60);
  FitConfig bad;
  bad.max_iter = -1;
  CHECK_THROWS_AS(fit(p.data, p.init, table_bandwidth(), bad),
                  std::invalid_argument);
  bad = FitConfig{};
  bad.rel_tol = 0.0;
  CHECK_THROWS_AS(fit(p.data, p.init, table_bandwidth(), bad),
                  std::invalid_argument);
  Eigen::MatrixXd wrong(10, 3);
  wrong.setZero();
  CHECK_THROWS_AS(fit(wrong, p.init, table_bandwidth(), FitConfig{}),
                  std::invalid_argument);
}

TEST_CASE("fit with max_iter zero returns the initial state untouched") {
  SmallProblem p = small_problem(4, 60);
  FitConfig cfg;
  cfg.max_iter = 0;
  const FitResult res = fit(p.data, p.init, table_bandwidth(), cfg);
  CHECK_FALSE(res.converged);
  CHECK(res.trace.rows.empty());
  CHECK((res.state.lambda - p.init.lambda).cwiseAbs().maxCoeff() == 0.0);
  for (int j = 0; j < 3; ++j)
    CHECK((res.state.f[j].values() - p.init.f[j].values())
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("fit is monotone, keeps the penalty nonnegative, and converges") {
  for (uint64_t seed : {3u, 12u, 21u}) {
    SmallProblem p = small_problem(seed);
    const FitResult res = fit(p.data, p.init, table_bandwidth(), FitConfig{});
    CHECK(res.converged);
    REQUIRE(res.trace.rows.size() >= 2);
    for (size_t t = 1; t < res.trace.rows.size(); ++t) {
      const double prev = res.trace.rows[t - 1].objective;
      const double cur = res.trace.rows[t].objective;
      CHECK(cur <= prev + 1e-8 * (1.0 + std::abs(prev)));
    }
    for (const TraceRow& row : res.trace.rows) {
      CHECK(row.penalty >= -1e-6);
      CHECK(row.lambda.sum() == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(row.rho.cwiseAbs().maxCoeff() <= 1.0);
    }
    res.state.validate();
    // trace row 0 evaluates the initial state, so t lags the row count by one
    CHECK(res.state.t == static_cast<int>(res.trace.rows.size()) - 1);
  }
}

TEST_CASE("fit is bit-for-bit deterministic") {
  SmallProblem p = small_problem(5);
  const FitResult a = fit(p.data, p.init, table_bandwidth(), FitConfig{});
  const FitResult b = fit(p.data, p.init, table_bandwidth(), FitConfig{});
  REQUIRE(a.trace.rows.size() == b.trace.rows.size());
  for (size_t t = 0; t < a.trace.rows.size(); ++t) {
    CHECK(a.trace.rows[t].objective == b.trace.rows[t].objective);
    CHECK((a.trace.rows[t].rho - b.trace.rows[t].rho).cwiseAbs().maxCoeff() ==
          0.0);
  }
  CHECK((a.state.f[0].values() - b.state.f[0].values()).cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("trace CSV round-trips through the CSV reader") {
  SmallProblem p = small_problem(4, 60);
  FitConfig cfg;
  cfg.max_iter = 5;
  cfg.rel_tol = 1e-14;
  const FitResult res = fit(p.data, p.init, table_bandwidth(), cfg);
  const std::string path =
      (std::filesystem::temp_directory_path() / "npmix_trace_test.csv")
          .string();
  res.trace.write_csv(path);
  const CsvTable table = read_csv(path);
  std::remove(path.c_str());
  CHECK(table.columns.size() == 3 + 2 * 3 + 1);
  CHECK(table.column_index("objective") == 1);
  CHECK(table.data.rows() == static_cast<Eigen::Index>(res.trace.rows.size()));
  for (Eigen::Index t = 0; t < table.data.rows(); ++t)
    CHECK(table.data(t, 1) ==
          doctest::Approx(res.trace.rows[t].objective).epsilon(1e-12));
}

TEST_CASE("fit_component_rho returns a usable estimate") {
  SmallProblem p = small_problem(8, 150);
  Eigen::VectorXd kde =
      PointKernel(p.grid, table_bandwidth(), p.data)
          .spread_to_grid(Eigen::VectorXd::Ones(p.data.rows()));
  DensityField f(p.grid, kde);
  f.normalize();
  const RhoFit fit = fit_component_rho(f, p.data, CopulaFamily::FGM);
  CHECK(std::isfinite(fit.rho));
  CHECK(fit.rho >= -1.0);
  CHECK(fit.rho <= 1.0);
}

}  // TEST_SUITE
