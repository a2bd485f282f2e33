#include <cmath>

#include "doctest.h"
#include "ldod/builtins.hpp"
#include "ldod/io.hpp"
#include "ldod/nls.hpp"
#include "support/benchmarks.hpp"

using namespace ldod;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.begin(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

TEST_CASE("nm_minimize: interior quadratic minimum") {
  auto f = [](std::span<const double> x) { return (x[0] - 2.0) * (x[0] - 2.0); };
  NmResult r = nm_minimize(f, vec({0.0}), {{-10.0, 10.0}});
  CHECK(std::abs(r.x[0] - 2.0) < 1e-6);
  CHECK(r.converged);
}

TEST_CASE("nm_minimize: clamped optimum at the bound") {
  auto f = [](std::span<const double> x) { return (x[0] - 20.0) * (x[0] - 20.0); };
  NmResult r = nm_minimize(f, vec({-3.0}), {{-10.0, 10.0}});
  CHECK(std::abs(r.x[0] - 10.0) < 1e-6);
}

TEST_CASE("nm_minimize: banana valley") {
  auto f = [](std::span<const double> x) {
    const double a = x[0] - 1.0, b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  };
  NmOptions opts;
  opts.max_evals = 5000;
  NmResult r = nm_minimize(f, vec({-1.0, 1.0}), {{-5.0, 5.0}, {-5.0, 5.0}}, opts);
  CHECK(r.f < 1e-8);
}

TEST_CASE("nm_minimize: feasibility, descent, determinism") {
  auto f = [](std::span<const double> x) {
    return std::sin(3 * x[0]) + x[1] * x[1] + 0.3 * x[0];
  };
  const std::vector<std::pair<double, double>> bounds{{-2.0, 2.0}, {-1.0, 1.0}};
  const Eigen::VectorXd x0 = vec({1.5, 0.7});
  NmResult a = nm_minimize(f, x0, bounds, {}, {vec({-1.0, 0.1})});
  NmResult b = nm_minimize(f, x0, bounds, {}, {vec({-1.0, 0.1})});
  for (int k = 0; k < 2; ++k) {
    CHECK(a.x[k] >= bounds[static_cast<std::size_t>(k)].first);
    CHECK(a.x[k] <= bounds[static_cast<std::size_t>(k)].second);
    CHECK(a.x[k] == b.x[k]);  // bit identical
  }
  CHECK(a.f == b.f);
  CHECK(a.f <= f(std::vector<double>{1.5, 0.7}));
}

TEST_CASE("nm_minimize: x0 evaluation errors propagate, extra starts don't") {
  auto f = [](std::span<const double> x) -> double {
    if (x[0] < 0.0) throw EvalError("negative");
    return x[0] * x[0];
  };
  CHECK_THROWS_AS(nm_minimize(f, vec({-1.0}), {{-2.0, 2.0}}), EvalError);
  NmResult r = nm_minimize(f, vec({1.0}), {{-2.0, 2.0}}, {}, {vec({-1.5})});
  CHECK(r.f >= 0.0);
}

TEST_CASE("nm options validation") {
  NmOptions bad;
  bad.expansion = 0.5;
  CHECK_THROWS_AS(nm_minimize([](std::span<const double>) { return 0.0; },
                              vec({0.0}), {{0.0, 1.0}}, bad),
                  std::invalid_argument);
}

TEST_CASE("nls_fit: exact interpolation of linear data") {
  Model line(
      2, 1,
      [](std::span<const double> pt, std::span<const double> th) {
        return th[0] + th[1] * pt[0];
      },
      [](std::span<const double> pt, std::span<const double>, std::span<double> g) {
        g[0] = 1.0;
        g[1] = pt[0];
      },
      {}, {});
  std::vector<DataPoint> data{{vec({0.0}), 1.0}, {vec({1.0}), 3.0}};
  FitResult fit = nls_fit(line, data, vec({0.0, 0.0}));
  CHECK(std::abs(fit.theta_hat[0] - 1.0) < 1e-6);
  CHECK(std::abs(fit.theta_hat[1] - 2.0) < 1e-6);
  CHECK(fit.sse < 1e-10);
}

TEST_CASE("nls_fit rejects underdetermined data") {
  const Model m = hybrid_model();
  std::vector<DataPoint> five(5, DataPoint{vec({5.0, 6.25, 300.0}), 1.0});
  CHECK_THROWS_AS(nls_fit(m, five, Eigen::VectorXd::Zero(6)), std::invalid_argument);
}

TEST_CASE("nls_fit recovers the hybrid-model estimates from the CCD data") {
  const auto ds = io::read_data_csv(
      bench::data_dir() / "benchmarks" / "dextran_ccd_data.csv", 3);
  REQUIRE(ds.rows.size() == 17);  // one run has no valid response
  REQUIRE(ds.dropped == 1);

  Eigen::VectorXd init = Eigen::VectorXd::Zero(6);
  init[5] = -1.0;
  auto transform = [](double y) { return y / (100.0 - y); };
  const FitResult fit = nls_fit(hybrid_model(), ds.rows, init, transform);

  const Eigen::VectorXd want = dextran_prior().values;
  for (int j = 0; j < 6; ++j) CHECK(std::abs(fit.theta_hat[j] - want[j]) < 0.02);

  // the reported estimates are rounded; the fit must do at least as well
  double sse_at_published = 0.0;
  for (const auto& row : ds.rows) {
    double r = hybrid_model().mean({row.point.data(), 3}, {want.data(), 6}) -
               transform(row.response);
    sse_at_published += r * r;
  }
  CHECK(fit.sse <= sse_at_published + 1e-9);

  // sse consistency and first-order stationarity
  double sse = 0.0;
  for (const auto& row : ds.rows) {
    double r = hybrid_model().mean({row.point.data(), 3},
                                   {fit.theta_hat.data(), 6}) -
               transform(row.response);
    sse += r * r;
  }
  CHECK(fit.sse == doctest::Approx(sse).epsilon(1e-10));
  for (int j = 0; j < 6; ++j) {
    const double h = 1e-5 * (1.0 + std::abs(fit.theta_hat[j]));
    Eigen::VectorXd tp = fit.theta_hat, tm = fit.theta_hat;
    tp[j] += h;
    tm[j] -= h;
    double up = 0.0, dn = 0.0;
    for (const auto& row : ds.rows) {
      double rp = hybrid_model().mean({row.point.data(), 3}, {tp.data(), 6}) -
                  transform(row.response);
      double rm = hybrid_model().mean({row.point.data(), 3}, {tm.data(), 6}) -
                  transform(row.response);
      up += rp * rp;
      dn += rm * rm;
    }
    CHECK(std::abs((up - dn) / (2 * h)) < 1e-3 * (1.0 + fit.sse));
  }
}
