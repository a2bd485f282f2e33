#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ldod/builtins.hpp"
#include "ldod/io.hpp"
#include "ldod/rng.hpp"
#include "support/benchmarks.hpp"

using namespace ldod;
namespace fs = std::filesystem;

namespace {

struct RunOutput {
  int exit_code;
  std::string out;
};

// Run the CLI binary and capture stdout (stderr goes to the test log).
RunOutput run_cli(const std::string& args) {
  const std::string cmd = std::string(LDOD_CLI_PATH) + " " + args;
  std::array<char, 4096> buf{};
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buf.data(), static_cast<int>(buf.size()), pipe)) out += buf.data();
  int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

fs::path specs() { return bench::data_dir() / "specs"; }
fs::path benchmarks() { return bench::data_dir() / "benchmarks"; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("design CSV round-trips bit-exactly") {
  Rng rng(123);
  DesignMatrix m(7, 3);
  const DesignRegion region = reactor_region();
  for (int i = 0; i < 7; ++i)
    for (int k = 0; k < 3; ++k)
      m(i, k) = rng.uniform(region.factor(k).lo, region.factor(k).hi);
  Design d(m, region);

  const fs::path tmp = fs::temp_directory_path() / "ldod_roundtrip.csv";
  io::write_design_csv(tmp, d);
  const std::string first = slurp(tmp);
  Design back = io::read_design_csv(tmp, region);
  REQUIRE(back.rows() == d.rows());
  io::write_design_csv(tmp, back);
  CHECK(slurp(tmp) == first);
  fs::remove(tmp);
}

TEST_CASE("design CSV validation errors") {
  const fs::path tmp = fs::temp_directory_path() / "ldod_bad.csv";
  {
    std::ofstream out(tmp);
    out << "R,C,T\n1.5,1,not_a_number\n";
  }
  CHECK_THROWS_AS(io::read_design_csv(tmp, reactor_region()), io::IoError);
  {
    std::ofstream out(tmp);
    out << "R,C,WRONG\n1.5,1,70\n";
  }
  CHECK_THROWS_AS(io::read_design_csv(tmp, reactor_region()), io::IoError);
  fs::remove(tmp);
}

TEST_CASE("data CSV drops rows with empty responses") {
  const auto ds = io::read_data_csv(benchmarks() / "dextran_ccd_data.csv", 3);
  CHECK(ds.rows.size() == 17);
  CHECK(ds.dropped == 1);
  CHECK(ds.factor_names == std::vector<std::string>{"S", "E", "P"});
}

TEST_CASE("model/prior/region JSON parsing") {
  CHECK(io::model_from_json({{"builtin", "mechanistic"}}).p() == 6);
  CHECK(io::model_from_json({{"builtin", "quadratic-dextran"}}).p() == 10);
  CHECK_THROWS_AS(io::model_from_json({{"builtin", "nope"}}), io::IoError);

  nlohmann::json je{{"expr", "a*x + b"},
                    {"params", {"a", "b"}},
                    {"factors", {"x"}}};
  CHECK(io::model_from_json(je).p() == 2);
  nlohmann::json bad_expr{{"expr", "a*"}, {"params", {"a"}}, {"factors", {}}};
  CHECK_THROWS_AS(io::model_from_json(bad_expr), io::IoError);

  const PriorTheta p1 = io::prior_from_json({1.0, 2.0, 3.0});
  CHECK(p1.size() == 3);
  const PriorTheta p2 = io::prior_from_json({{"values", {1.0, 2.0}}});
  CHECK(p2.size() == 2);

  const DesignRegion r = io::region_from_json(
      {{"factors",
        {{{"name", "A"}, {"lo", 0.0}, {"hi", 1.0}},
         {{"name", "B"}, {"lo", -1.0}, {"hi", 1.0}, {"closest", 0.1}}}}});
  CHECK(r.dim() == 2);
  CHECK(r.factor(1).closest_distance == 0.1);
}

TEST_CASE("cli: eval reports the benchmark criterion value") {
  RunOutput r = run_cli("eval " + (benchmarks() / "reactor_bbd.csv").string() +
                        " --model " + (specs() / "reactor_model.json").string() +
                        " --prior " + (specs() / "reactor_prior.json").string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("phi = -51.5") != std::string::npos);
}

TEST_CASE("cli: eval --json is machine readable") {
  RunOutput r = run_cli("eval " + (benchmarks() / "dextran_ccd_face.csv").string() +
                        " --model " + (specs() / "dextran_model.json").string() +
                        " --prior " + (specs() / "dextran_prior.json").string() +
                        " --json");
  CHECK(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j["phi"].get<double>() - 31.7538) < 0.05);
  CHECK(j["n"].get<int>() == 18);
}

TEST_CASE("cli: unknown algorithm names the valid ones, exit 2") {
  RunOutput r = run_cli("search --model " + (specs() / "reactor_model.json").string() +
                        " --prior " + (specs() / "reactor_prior.json").string() +
                        " --algorithm simulated-annealing --n 24 2>&1");
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("continuous-pea") != std::string::npos);
}

TEST_CASE("cli: seeded search twice gives identical CSV bytes") {
  const fs::path out1 = fs::temp_directory_path() / "ldod_search1.csv";
  const fs::path out2 = fs::temp_directory_path() / "ldod_search2.csv";
  const std::string base =
      "search --model " + (specs() / "reactor_model.json").string() + " --prior " +
      (specs() / "reactor_prior.json").string() +
      " --algorithm discrete-pea --levels 1.5,3,6 --levels 1,2,4 --levels 70,80,90"
      " --n 24 --tries 1 --seed 42 --out ";
  RunOutput r1 = run_cli(base + out1.string());
  RunOutput r2 = run_cli(base + out2.string());
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);
  CHECK(slurp(out1) == slurp(out2));
  CHECK(!slurp(out1).empty());
  fs::remove(out1);
  fs::remove(out2);
}

TEST_CASE("cli: fit with too few rows exits 2") {
  const fs::path tmp = fs::temp_directory_path() / "ldod_小.csv";
  {
    std::ofstream out(tmp);
    out << "S,E,P,y\n";
    for (int i = 0; i < 5; ++i) out << "5,6.25,300," << 70 + i << "\n";
  }
  RunOutput r = run_cli("fit " + tmp.string() + " --model " +
                        (specs() / "dextran_model.json").string() + " 2>&1");
  CHECK(r.exit_code == 2);
  fs::remove(tmp);
}

TEST_CASE("cli: singular design exits 3 and prints -inf") {
  const fs::path tmp = fs::temp_directory_path() / "ldod_singular.csv";
  {
    std::ofstream out(tmp);
    out << "R,C,T\n";
    for (int i = 0; i < 6; ++i) out << "3,2,80\n";  // one distinct point
  }
  RunOutput r = run_cli("eval " + tmp.string() + " --model " +
                        (specs() / "reactor_model.json").string() + " --prior " +
                        (specs() / "reactor_prior.json").string());
  CHECK(r.exit_code == 3);
  CHECK(r.out.find("-inf") != std::string::npos);
  fs::remove(tmp);
}

TEST_CASE("cli: standard-design emits the bundled benchmark") {
  RunOutput r = run_cli("standard-design --kind spherical-ccd --example 1");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("R,C,T") == 0);
  CHECK(r.out.find("1.8376,1.2251,72.9289") != std::string::npos);
  RunOutput bad = run_cli("standard-design --kind box-behnken --example 2 2>&1");
  CHECK(bad.exit_code == 2);
}

TEST_CASE("cli: efficiency of a design against itself is 100%") {
  RunOutput r = run_cli("efficiency " + (benchmarks() / "reactor_bbd.csv").string() +
                        " " + (benchmarks() / "reactor_bbd.csv").string() +
                        " --model " + (specs() / "reactor_model.json").string() +
                        " --prior " + (specs() / "reactor_prior.json").string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("efficiency = 100.00%") != std::string::npos);
}
