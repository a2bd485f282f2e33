#include <cmath>
#include <set>

#include "doctest.h"
#include "ldod/builtins.hpp"
#include "ldod/search.hpp"
#include "support/benchmarks.hpp"

using namespace ldod;

namespace {

CandidateSet reactor_grid() {
  return CandidateSet::grid({{1.5, 3, 6}, {1, 2, 4}, {70, 80, 90}},
                            reactor_region());
}

CandidateSet dextran_grid() {
  return CandidateSet::grid({{2.5, 5, 7.5}, {0.625, 6.25, 62.5}, {200, 300, 400}},
                            dextran_region());
}

bool same_design(const Design& a, const Design& b) {
  return a.rows().rows() == b.rows().rows() && a.rows() == b.rows();
}

void check_monotone(const SearchResult& r, double critical) {
  const double margin = std::log(critical) - 1e-12;
  for (const auto& t : r.traces) {
    if (t.failed) continue;
    for (std::size_t i = 1; i < t.phi_trajectory.size(); ++i)
      REQUIRE(t.phi_trajectory[i] - t.phi_trajectory[i - 1] >= margin);
  }
}

}  // namespace

TEST_CASE("random_initial_design: nonsingular, deterministic, in region") {
  const Model model = mechanistic_model();
  const PriorTheta prior = reactor_prior();
  const CandidateSet grid = reactor_grid();

  Rng rng1(12), rng2(12);
  Design d1 = random_initial_design(grid, 24, model, prior, rng1);
  Design d2 = random_initial_design(grid, 24, model, prior, rng2);
  CHECK(same_design(d1, d2));
  CHECK(log_det(model_matrix(model, d1, prior)) > kSingularPhi);

  Rng rng3(7);
  Design c = random_initial_design(reactor_region(), 24, model, prior, rng3);
  for (int i = 0; i < c.runs(); ++i) REQUIRE(c.region().contains(c.run(i)));
}

TEST_CASE("random_initial_design: impossible rank raises") {
  DesignMatrix one(1, 3);
  one << 3.0, 2.0, 80.0;
  CandidateSet single = CandidateSet::points(one, reactor_region());
  Rng rng(3);
  CHECK_THROWS_AS(
      random_initial_design(single, 3, mechanistic_model(), reactor_prior(), rng),
      SearchError);
}

TEST_CASE("discrete point exchange finds the known grid optimum") {
  SearchConfig cfg;
  cfg.tries = 30;
  cfg.seed = 2024;
  cfg.threads = 4;
  SearchResult r = discrete_pea(mechanistic_model(), reactor_prior(),
                                reactor_grid(), 24, cfg);
  CHECK(r.phi >= -49.80);  // known optimum near -49.73
  CHECK(r.best.runs() == 24);
  check_monotone(r, cfg.critical_value);
  for (const auto& t : r.traces) REQUIRE(t.iterations <= cfg.max_iterations);

  // the printed benchmark equals what the search finds
  CHECK(std::abs(bench::phi_reactor(bench::reactor_design("reactor_discrete_ldod.csv")) -
                 (-49.7321)) < 0.1);
  CHECK(std::abs(r.phi - (-49.7321)) < 0.1);
}

TEST_CASE("discrete coordinate exchange matches point exchange when v = 1") {
  auto mean = [](std::span<const double> pt, std::span<const double> th) {
    return th[0] + th[1] * pt[0] + th[2] * pt[0] * pt[0];
  };
  auto grad = [](std::span<const double> pt, std::span<const double>,
                 std::span<double> g) {
    g[0] = 1.0;
    g[1] = pt[0];
    g[2] = pt[0] * pt[0];
  };
  Model quad(3, 1, mean, grad, {}, {});
  DesignRegion region({{"x", -1.0, 1.0, {}}});
  std::vector<std::vector<double>> levels{{-1.0, -0.5, 0.0, 0.5, 1.0}};
  PriorTheta prior{0.0, 0.0, 0.0};

  SearchConfig cfg;
  cfg.tries = 8;
  cfg.seed = 5;
  SearchResult pea = discrete_pea(quad, prior, CandidateSet::grid(levels, region),
                                  6, cfg);
  SearchResult cea = discrete_cea(quad, prior, CandidateSet::per_factor(levels, region),
                                  6, cfg);
  CHECK(pea.phi == doctest::Approx(cea.phi).epsilon(1e-12));
  CHECK(same_design(pea.best, cea.best));
}

TEST_CASE("discrete coordinate exchange on the dextran problem") {
  SearchConfig cfg;
  cfg.tries = 30;
  cfg.seed = 31;
  cfg.threads = 4;
  SearchResult r = discrete_cea(
      hybrid_model(), dextran_prior(),
      CandidateSet::per_factor({{2.5, 5, 7.5}, {0.625, 6.25, 62.5}, {200, 300, 400}},
                               dextran_region()),
      18, cfg);
  CHECK(r.phi >= 38.5);  // best values reported are 38.65-38.73
  check_monotone(r, cfg.critical_value);
}

TEST_CASE("continuous point exchange improves on the discrete optimum") {
  SearchConfig cfg;
  cfg.tries = 6;
  cfg.seed = 99;
  cfg.threads = 3;
  SearchResult r = continuous_pea(mechanistic_model(), reactor_prior(),
                                  reactor_region(), 24, cfg);
  CHECK(r.phi > -49.75);
  check_monotone(r, cfg.critical_value);
  for (int i = 0; i < r.best.runs(); ++i)
    REQUIRE(r.best.region().contains(r.best.run(i)));
}

TEST_CASE("continuous searches are deterministic, even threaded") {
  SearchConfig cfg;
  cfg.tries = 4;
  cfg.seed = 7;
  cfg.threads = 1;
  SearchResult a = continuous_pea(hybrid_model(), dextran_prior(),
                                  dextran_region(), 18, cfg);
  cfg.threads = 4;
  SearchResult b = continuous_pea(hybrid_model(), dextran_prior(),
                                  dextran_region(), 18, cfg);
  CHECK(a.phi == b.phi);
  CHECK(same_design(a.best, b.best));
  REQUIRE(a.traces.size() == b.traces.size());
  for (std::size_t t = 0; t < a.traces.size(); ++t) {
    CHECK(a.traces[t].final_phi == b.traces[t].final_phi);
    CHECK(a.traces[t].iterations == b.traces[t].iterations);
  }
}

TEST_CASE("continuous coordinate exchange evaluates published solutions") {
  CHECK(std::abs(bench::phi_reactor(bench::reactor_design("reactor_continuous_cea.csv")) -
                 (-49.5573)) < 0.01);
  CHECK(std::abs(bench::phi_reactor(bench::reactor_design("reactor_continuous_pea.csv")) -
                 (-49.5528)) < 0.01);
  CHECK(std::abs(bench::phi_dextran(bench::dextran_design("dextran_continuous_cea.csv")) -
                 41.2246) < 0.05);
}

TEST_CASE("continuous coordinate exchange runs and stays monotone") {
  SearchConfig cfg;
  cfg.tries = 4;
  cfg.seed = 11;
  cfg.threads = 4;
  SearchResult r = continuous_cea(mechanistic_model(), reactor_prior(),
                                  reactor_region(), 24, cfg);
  CHECK(r.phi > -49.9);
  check_monotone(r, cfg.critical_value);
}

TEST_CASE("cluster_quasi_replicates") {
  const DesignRegion region = reactor_region();

  SUBCASE("near coordinates group together") {
    DesignMatrix m(2, 3);
    m << 3.4081, 1, 70, 3.4102, 1, 70;
    auto clusters = cluster_quasi_replicates(
        Design(m, region), ClosestDistances({0.01, 0.1, 1.0}, region));
    REQUIRE(clusters.size() == 1);
    CHECK(clusters[0].members == std::vector<int>{0, 1});
  }

  SUBCASE("a gap of twice the distance separates") {
    DesignMatrix m(2, 3);
    m << 3.40, 1, 70, 3.42, 1, 70;
    auto clusters = cluster_quasi_replicates(
        Design(m, region), ClosestDistances({0.01, 0.1, 1.0}, region));
    CHECK(clusters.size() == 2);
  }

  SUBCASE("chains close transitively") {
    DesignMatrix m(3, 3);
    m << 3.40, 1, 70, 3.41, 1, 70, 3.42, 1, 70;
    auto clusters = cluster_quasi_replicates(
        Design(m, region), ClosestDistances({0.01, 0.1, 1.0}, region));
    REQUIRE(clusters.size() == 1);
    CHECK(clusters[0].members.size() == 3);
  }
}

TEST_CASE("snapping an already-replicated on-grid design is a fixed point") {
  const Design t7 = bench::reactor_design("reactor_multiphase.csv");
  const ClosestDistances closest({0.1, 0.1, 1.0}, t7.region());
  SearchConfig cfg;
  MultiphaseReport rep;
  SearchResult r = snap_to_replicates(mechanistic_model(), reactor_prior(), t7,
                                      closest, cfg, &rep);
  CHECK(r.phi == doctest::Approx(bench::phi_reactor(t7)).epsilon(1e-12));
  // row-sorted multisets agree
  auto sup_before = t7.distinct_runs();
  auto sup_after = r.best.distinct_runs();
  REQUIRE(sup_before.size() == sup_after.size());
  for (std::size_t i = 0; i < sup_before.size(); ++i) {
    CHECK(sup_before[i].first == sup_after[i].first);
    CHECK(sup_before[i].second == sup_after[i].second);
  }
}

TEST_CASE("snap_to_replicates refines the published interim design") {
  const Design t6a = bench::reactor_design("reactor_interim_pea.csv");
  const ClosestDistances closest({0.1, 0.1, 1.0}, t6a.region());
  SearchConfig cfg;
  MultiphaseReport rep;
  SearchResult r = snap_to_replicates(mechanistic_model(), reactor_prior(), t6a,
                                      closest, cfg, &rep);
  CHECK(r.phi >= rep.snapped_phi);             // reallocation ascends
  CHECK(std::abs(r.phi - (-49.5116)) < 0.1);   // matches the published refinement
  CHECK(rep.distinct_points == 8);
  std::set<double> catalyst;
  for (const auto& [pt, reps] : rep.support) catalyst.insert(pt[1]);
  CHECK(catalyst.size() == 2);
  // on-grid invariant
  for (const auto& [pt, reps] : rep.support) {
    for (int k = 0; k < 3; ++k) {
      const double c = closest[k];
      const double m = pt[k] / c;
      CHECK(std::abs(m - std::round(m)) < 1e-9);
    }
  }
}

TEST_CASE("multiphase on the reactor problem reproduces the refined design") {
  SearchConfig phase1;
  phase1.tries = 12;
  phase1.critical_value = 1.1;
  phase1.seed = 20;
  phase1.threads = 4;
  SearchConfig phase2;
  phase2.critical_value = 1.0001;
  phase2.threads = 4;
  MultiphaseReport rep;
  SearchResult r =
      multiphase(mechanistic_model(), reactor_prior(), reactor_grid(),
                 reactor_region(), 24, ClosestDistances({0.1, 0.1, 1.0}, reactor_region()),
                 phase1, phase2, Phase2Mode::pea, &rep);
  CHECK(rep.phase1_distinct >= 1);
  CHECK(r.phi >= rep.phase2_best - 1e-9);
  CHECK(r.phi >= -49.55);
  CHECK(r.best.runs() == 24);
  CHECK(rep.distinct_points <= 11);
}
