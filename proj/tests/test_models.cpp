#include <cmath>
#include <random>

#include "doctest.h"
#include "ldod/builtins.hpp"
#include "ldod/io.hpp"
#include "ldod/standard_designs.hpp"
#include "support/benchmarks.hpp"
#include "support/oracles.hpp"

using namespace ldod;

TEST_CASE("mechanistic mean: zero-exponent point") {
  const Model m = mechanistic_model();
  // T chosen so the temperature transform vanishes; C^0 = 1 regardless
  const double T0 = 1.0 / 0.0028344 - 273.0;
  const std::vector<double> pt{1.0, 2.0, T0};
  const std::vector<double> th{1.0, 1.0, 0.0, 0.0, 123.0, 456.0};
  CHECK(m.mean(pt, th) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("mechanistic mean at the estimate, centre point") {
  const Model m = mechanistic_model();
  const PriorTheta prior = reactor_prior();
  const std::vector<double> pt{3.0, 2.0, 80.0};
  std::span<const double> th{prior.values.data(), 6};
  // reference value fixed by two independent high-precision evaluations
  CHECK(std::abs(m.mean(pt, th) - 0.53723655037536849) <
        1e-12 * 0.53723655037536849);
}

TEST_CASE("mechanistic evaluation errors") {
  const Model m = mechanistic_model();
  const std::vector<double> th{5.9, 1.15, 0.53, -0.01, 15475.0, 7489.0};
  CHECK_THROWS_AS(m.mean(std::vector<double>{3.0, 2.0, -273.0}, th), EvalError);
  CHECK_THROWS_AS(m.mean(std::vector<double>{3.0, 0.0, 80.0}, th), EvalError);
}

TEST_CASE("hybrid mean: all-zero coefficients and the estimate") {
  const Model m = hybrid_model();
  const std::vector<double> zero{0, 0, 0, 0, 0, 0};
  CHECK(m.mean(std::vector<double>{5.0, 6.25, 300.0}, zero) ==
        doctest::Approx(1.0).epsilon(1e-14));

  const PriorTheta prior = dextran_prior();
  std::span<const double> th{prior.values.data(), 6};
  const double want = 2.6278116050609306;  // exp(0.4340)*5/(5-2.0633)
  CHECK(std::abs(m.mean(std::vector<double>{5.0, 6.25, 300.0}, th) - want) <
        1e-12 * want);
}

TEST_CASE("hybrid evaluation errors") {
  const Model m = hybrid_model();
  const std::vector<double> th{0, 0, 0, 0, 0, -5.0};
  CHECK_THROWS_AS(m.mean(std::vector<double>{5.0, 0.0, 300.0}, th), EvalError);
  CHECK_THROWS_AS(m.mean(std::vector<double>{5.0, 6.25, 300.0}, th), EvalError);
}

TEST_CASE("analytic gradients match differences for every builtin") {
  struct Case {
    Model model;
    PriorTheta prior;
    DesignRegion region;
  };
  std::vector<Case> cases;
  cases.push_back({mechanistic_model(), reactor_prior(), reactor_region()});
  cases.push_back({hybrid_model(), dextran_prior(), dextran_region()});
  cases.push_back({quadratic_reactor_model(),
                   PriorTheta(Eigen::VectorXd::Zero(10)), reactor_region()});
  cases.push_back({quadratic_dextran_model(),
                   PriorTheta(Eigen::VectorXd::Zero(10)), dextran_region()});
  auto [sat, eq] = appendix_models();
  cases.push_back({sat, PriorTheta{1.0, -1.0},
                   DesignRegion({{"S", 2.5, 7.5, {}}})});
  cases.push_back({eq, PriorTheta{0.4, 1.3, -0.1, -0.8, 0.4},
                   DesignRegion({{"E", 0.625, 62.5, {}}, {"P", 200.0, 400.0, {}}})});

  std::mt19937_64 rng(1234);
  auto uni = [&rng](double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  for (const auto& c : cases) {
    for (int iter = 0; iter < 100; ++iter) {
      std::vector<double> pt(static_cast<std::size_t>(c.model.v()));
      for (int k = 0; k < c.model.v(); ++k)
        pt[static_cast<std::size_t>(k)] = uni(c.region.factor(k).lo, c.region.factor(k).hi);
      std::vector<double> th(static_cast<std::size_t>(c.model.p()));
      for (int j = 0; j < c.model.p(); ++j)
        th[static_cast<std::size_t>(j)] = c.prior.values[j] * uni(0.8, 1.2) + uni(-0.01, 0.01);
      const Eigen::VectorXd a = c.model.gradient(pt, th);
      const Eigen::VectorXd fd = oracle::fd_gradient(c.model, pt, th);
      REQUIRE(oracle::max_rel_err(a, fd) < 1e-5);
    }
  }
}

TEST_CASE("finite-difference fallback agrees with the analytic gradient") {
  const Model fd = mechanistic_model_fd();
  const Model an = mechanistic_model();
  const PriorTheta prior = reactor_prior();
  const std::vector<double> pt{3.0, 2.0, 80.0};
  std::span<const double> th{prior.values.data(), 6};
  CHECK(oracle::max_rel_err(fd.gradient(pt, th), an.gradient(pt, th)) < 1e-5);
}

TEST_CASE("second-order polynomial: size and codings") {
  CHECK(quadratic_reactor_model().p() == 10);

  CHECK(apply_scaling(LogScaling{3.0, 2.0}, 3.0) == doctest::Approx(0.0));
  CHECK(apply_scaling(LogScaling{3.0, 2.0}, 6.0) == doctest::Approx(1.0));
  CHECK(apply_scaling(AffineScaling{80.0, 10.0}, 80.0) == doctest::Approx(0.0));
  CHECK(apply_scaling(AffineScaling{5.0, 2.5}, 5.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(apply_scaling(LogScaling{3.0, 2.0}, 0.0), EvalError);
  CHECK_THROWS_AS(apply_scaling(LogScaling{3.0, 2.0}, -1.0), EvalError);
}

TEST_CASE("appendix models") {
  auto [sat, eq] = appendix_models();
  CHECK(sat.mean(std::vector<double>{2.5}, std::vector<double>{1.0, 0.0}) ==
        doctest::Approx(1.0));
  const std::vector<double> zeros{0, 0, 0, 0, 0};
  CHECK(eq.mean(std::vector<double>{6.25, 300.0}, zeros) == doctest::Approx(1.0));
  const Eigen::VectorXd g =
      sat.gradient(std::vector<double>{5.0}, std::vector<double>{1.0, -1.0});
  CHECK(g[0] == doctest::Approx(5.0 / 4.0).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(-5.0 / 16.0).epsilon(1e-12));
  CHECK_THROWS_AS(
      sat.mean(std::vector<double>{5.0}, std::vector<double>{1.0, -5.0}),
      EvalError);
}

TEST_CASE("standard designs: shapes and key rows") {
  const Design face1 = standard_design(StandardDesignKind::face_centred_ccd, 1);
  REQUIRE(face1.runs() == 24);
  CHECK(face1.rows()(0, 0) == 1.5);
  CHECK(face1.rows()(0, 1) == 1.0);
  CHECK(face1.rows()(0, 2) == 70.0);
  CHECK(face1.rows()(1, 0) == 1.5);
  CHECK(face1.rows()(1, 2) == 90.0);

  const Design sph = standard_design(StandardDesignKind::spherical_ccd, 1);
  REQUIRE(sph.runs() == 24);
  bool found = false;
  for (int i = 0; i < sph.runs(); ++i)
    found = found || (sph.rows()(i, 0) == 1.8376 && sph.rows()(i, 1) == 1.2251 &&
                      sph.rows()(i, 2) == 72.9289);
  CHECK(found);

  const Design bbd = standard_design(StandardDesignKind::box_behnken, 1);
  REQUIRE(bbd.runs() == 24);

  const Design face2 = standard_design(StandardDesignKind::face_centred_ccd, 2);
  REQUIRE(face2.runs() == 18);
  CHECK(face2.rows()(0, 0) == 5.0);
  CHECK(face2.rows()(0, 1) == 6.25);
  CHECK(face2.rows()(0, 2) == 300.0);

  CHECK_THROWS_AS(standard_design(StandardDesignKind::box_behnken, 2),
                  ValidationError);
}

TEST_CASE("standard designs lie inside their regions and round-trip") {
  namespace fs = std::filesystem;
  const fs::path tmp = fs::temp_directory_path() / "ldod_design_roundtrip.csv";
  for (auto [kind, example] :
       {std::pair{StandardDesignKind::face_centred_ccd, 1},
        std::pair{StandardDesignKind::spherical_ccd, 1},
        std::pair{StandardDesignKind::box_behnken, 1},
        std::pair{StandardDesignKind::face_centred_ccd, 2}}) {
    const Design d = standard_design(kind, example);
    for (int i = 0; i < d.runs(); ++i) REQUIRE(d.region().contains(d.run(i)));
    io::write_design_csv(tmp, d);
    const Design back = io::read_design_csv(tmp, d.region());
    REQUIRE(back.rows() == d.rows());
  }
  fs::remove(tmp);
}

TEST_CASE("design validation rejects out-of-region and shape mismatches") {
  DesignMatrix m(1, 3);
  m << 1.0, 2.0, 80.0;  // R below its bound
  CHECK_THROWS_AS(Design(m, reactor_region()), ValidationError);
  DesignMatrix wide(1, 2);
  wide << 3.0, 2.0;
  CHECK_THROWS_AS(Design(wide, reactor_region()), ValidationError);
  CHECK_THROWS_AS(DesignRegion({{"a", 1.0, 1.0, {}}}), ValidationError);
  CHECK_THROWS_AS(DesignRegion({{"a", 0.0, 1.0, 2.0}}), ValidationError);
}
