// Command-line interface: evaluate designs, run searches, refine with the
// multiphase algorithm, fit priors, compare efficiencies, and emit the
// bundled benchmark standard designs.
//
// Exit codes: 0 success, 2 validation/parse error, 3 singular design,
// 4 fit did not converge.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "ldod/builtins.hpp"
#include "ldod/criterion.hpp"
#include "ldod/expr.hpp"
#include "ldod/io.hpp"
#include "ldod/nls.hpp"
#include "ldod/search.hpp"
#include "ldod/standard_designs.hpp"

using nlohmann::json;
using namespace ldod;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitSingular = 3;
constexpr int kExitNoConvergence = 4;

struct CliError : std::runtime_error {
  CliError(int code, const std::string& msg) : std::runtime_error(msg), code(code) {}
  int code;
};

std::string fmt_phi(double phi) {
  if (phi == kSingularPhi) return "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", phi);
  return buf;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError(kExitValidation, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw CliError(kExitValidation, path + ": " + e.what());
  }
}

struct ModelBundle {
  Model model;
  PriorTheta prior;
  DesignRegion region;
};

// Common --model/--prior/--region loading; the region defaults to the
// matching case-study region when the model spec names a builtin.
ModelBundle load_bundle(const std::string& model_path, const std::string& prior_path,
                        const std::string& region_path) {
  if (model_path.empty()) throw CliError(kExitValidation, "--model is required");
  try {
    json jm = read_json_file(model_path);
    Model model = io::model_from_json(jm);
    std::optional<DesignRegion> region;
    if (!region_path.empty()) {
      region = io::region_from_json(read_json_file(region_path));
    } else if (jm.contains("builtin")) {
      const std::string b = jm["builtin"].get<std::string>();
      if (b == "mechanistic" || b == "reactor" || b == "quadratic-reactor")
        region = reactor_region();
      else if (b == "hybrid" || b == "dextran" || b == "quadratic-dextran")
        region = dextran_region();
    }
    if (!region)
      throw CliError(kExitValidation,
                     "--region is required for this model specification");
    if (region->dim() != model.v())
      throw CliError(kExitValidation, "region dimension does not match the model");
    PriorTheta prior = prior_path.empty()
                           ? PriorTheta(Eigen::VectorXd::Zero(model.p()))
                           : io::prior_from_json(read_json_file(prior_path));
    if (prior.size() != model.p())
      throw CliError(kExitValidation, "prior length does not match the model");
    return {std::move(model), std::move(prior), std::move(*region)};
  } catch (const io::IoError& e) {
    throw CliError(kExitValidation, e.what());
  } catch (const expr::ParseError& e) {
    throw CliError(kExitValidation, e.what());
  }
}

void print_design_summary(const Design& d, double phi, bool as_json,
                          std::ostream& os) {
  const auto support = d.distinct_runs();
  if (as_json) {
    json counts = json::array();
    for (const auto& [pt, c] : support) {
      json row = json::array();
      for (Eigen::Index k = 0; k < pt.size(); ++k) row.push_back(pt[k]);
      counts.push_back({{"point", row}, {"replicates", c}});
    }
    json out{{"phi", phi == kSingularPhi ? json() : json(phi)},
             {"det", phi == kSingularPhi ? 0.0 : std::exp(phi)},
             {"n", d.runs()},
             {"distinct_points", support.size()},
             {"support", counts},
             {"design", io::design_to_json(d)}};
    os << out.dump(2) << "\n";
    return;
  }
  os << "phi = " << fmt_phi(phi) << "\n";
  os << "|FtF| = " << (phi == kSingularPhi ? 0.0 : std::exp(phi)) << "\n";
  os << "n = " << d.runs() << ", distinct points = " << support.size() << "\n";
  for (const auto& [pt, c] : support) {
    os << "  (";
    for (Eigen::Index k = 0; k < pt.size(); ++k) os << (k ? ", " : "") << pt[k];
    os << ") x " << c << "\n";
  }
}

json config_echo(const SearchConfig& cfg, const std::string& algorithm) {
  json starts = json::array();
  for (const auto& s : cfg.extra_starts) {
    json row = json::array();
    for (Eigen::Index k = 0; k < s.size(); ++k) row.push_back(s[k]);
    starts.push_back(row);
  }
  return {{"algorithm", algorithm},
          {"tries", cfg.tries},
          {"critical", cfg.critical_value},
          {"seed", cfg.seed},
          {"max_iterations", cfg.max_iterations},
          {"threads", cfg.threads},
          {"extra_starts", starts}};
}

struct EvalArgs {
  std::string design_csv, model, prior, region;
  bool as_json = false;
};

struct SearchArgs {
  std::string spec;  // optional runspec JSON supplying defaults
  std::string model, prior, region, out, trace_out;
  std::string algorithm;
  int n = 0;
  int tries = 0;
  int threads = 0;
  double critical = 0.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool as_json = false;
  std::vector<std::vector<double>> levels;
};

struct MultiphaseArgs : SearchArgs {
  std::vector<double> closest;
  int phase1_tries = 0;
  double phase1_critical = 0.0;
  std::string phase2_mode;
};

struct FitArgs {
  std::string data_csv, model, region, out_prior;
  std::string transform = "none";
  std::vector<double> init;
  bool as_json = false;
};

struct EffArgs {
  std::string design_a, design_b, model, prior, region;
  bool as_json = false;
};

struct StdArgs {
  std::string kind = "face-centred-ccd";
  int example = 1;
  std::string out;
};

std::vector<std::vector<double>> require_levels(const SearchArgs& a, int v) {
  if (static_cast<int>(a.levels.size()) != v)
    throw CliError(kExitValidation,
                   "candidate levels are required for all " + std::to_string(v) +
                       " factors (--levels or runspec \"levels\")");
  return a.levels;
}

// Runspec JSON files supply defaults for anything not given as a flag.
// Inline model/prior/region objects are allowed next to file paths.
void apply_runspec(SearchArgs& a, MultiphaseArgs* mp) {
  if (a.spec.empty()) return;
  json j = read_json_file(a.spec);
  const auto base = std::filesystem::path(a.spec).parent_path();
  auto materialise = [&](const char* key, std::string& slot) {
    if (!slot.empty() || !j.contains(key)) return;
    if (j[key].is_string()) {
      std::filesystem::path p = j[key].get<std::string>();
      slot = (p.is_absolute() ? p : base / p).string();
      return;
    }
    const auto tmp = std::filesystem::temp_directory_path() /
                     ("ldod_runspec_" + std::string(key) + ".json");
    std::ofstream out(tmp);
    out << j[key].dump();
    slot = tmp.string();
  };
  materialise("model", a.model);
  materialise("prior", a.prior);
  materialise("region", a.region);
  if (a.algorithm.empty() && j.contains("algorithm"))
    a.algorithm = j["algorithm"].get<std::string>();
  if (a.out.empty() && j.contains("out"))
    a.out = (base / j["out"].get<std::string>()).string();
  if (a.n == 0 && j.contains("n")) a.n = j["n"].get<int>();
  if (a.tries == 0 && j.contains("tries")) a.tries = j["tries"].get<int>();
  if (a.critical == 0.0 && j.contains("critical"))
    a.critical = j["critical"].get<double>();
  if (!a.seed_set && j.contains("seed")) {
    a.seed = j["seed"].get<std::uint64_t>();
    a.seed_set = true;
  }
  if (a.threads == 0 && j.contains("threads")) a.threads = j["threads"].get<int>();
  if (a.levels.empty() && j.contains("levels"))
    a.levels = j["levels"].get<std::vector<std::vector<double>>>();
  if (mp) {
    if (mp->closest.empty() && j.contains("closest"))
      mp->closest = j["closest"].get<std::vector<double>>();
    if (mp->phase1_tries == 0 && j.contains("phase1_tries"))
      mp->phase1_tries = j["phase1_tries"].get<int>();
    if (mp->phase1_critical == 0.0 && j.contains("phase1_critical"))
      mp->phase1_critical = j["phase1_critical"].get<double>();
    if (mp->phase2_mode.empty() && j.contains("phase2_mode"))
      mp->phase2_mode = j["phase2_mode"].get<std::string>();
  }
}

std::vector<Eigen::VectorXd> extra_starts_from_spec(const std::string& spec_path) {
  std::vector<Eigen::VectorXd> out;
  if (spec_path.empty()) return out;
  json j = read_json_file(spec_path);
  if (!j.contains("extra_starts")) return out;
  for (const auto& row : j["extra_starts"]) {
    Eigen::VectorXd s(row.size());
    for (std::size_t k = 0; k < row.size(); ++k)
      s[static_cast<Eigen::Index>(k)] = row[k].get<double>();
    out.push_back(std::move(s));
  }
  return out;
}

int cmd_eval(const EvalArgs& args) {
  ModelBundle b = load_bundle(args.model, args.prior, args.region);
  Design d = io::read_design_csv(args.design_csv, b.region);
  double phi = kSingularPhi;
  try {
    phi = log_det(model_matrix(b.model, d, b.prior));
  } catch (const EvalError& e) {
    throw CliError(kExitValidation, std::string("evaluation failed: ") + e.what());
  }
  print_design_summary(d, phi, args.as_json, std::cout);
  return phi == kSingularPhi ? kExitSingular : 0;
}

int cmd_search(SearchArgs args) {
  apply_runspec(args, nullptr);
  if (args.algorithm.empty()) args.algorithm = "discrete-pea";
  ModelBundle b = load_bundle(args.model, args.prior, args.region);
  if (args.n < 1) throw CliError(kExitValidation, "--n must be at least 1");
  if (args.n < b.model.p())
    std::cerr << "warning: n = " << args.n << " runs cannot identify p = "
              << b.model.p() << " parameters\n";

  SearchConfig cfg;
  cfg.tries = args.tries > 0 ? args.tries : 1;
  cfg.critical_value = args.critical > 0.0 ? args.critical : 1.0001;
  cfg.seed = args.seed;
  cfg.threads = args.threads > 0 ? args.threads : 1;
  cfg.extra_starts = extra_starts_from_spec(args.spec);

  const auto t0 = std::chrono::steady_clock::now();
  std::optional<SearchResult> result;
  try {
    if (args.algorithm == "discrete-pea") {
      CandidateSet omega =
          CandidateSet::grid(require_levels(args, b.region.dim()), b.region);
      result = discrete_pea(b.model, b.prior, omega, args.n, cfg);
    } else if (args.algorithm == "discrete-cea") {
      CandidateSet omega =
          CandidateSet::per_factor(require_levels(args, b.region.dim()), b.region);
      result = discrete_cea(b.model, b.prior, omega, args.n, cfg);
    } else if (args.algorithm == "continuous-pea") {
      result = continuous_pea(b.model, b.prior, b.region, args.n, cfg);
    } else if (args.algorithm == "continuous-cea") {
      result = continuous_cea(b.model, b.prior, b.region, args.n, cfg);
    } else {
      throw CliError(kExitValidation,
                     "unknown algorithm '" + args.algorithm +
                         "' (valid: discrete-pea, discrete-cea, continuous-pea, "
                         "continuous-cea)");
    }
  } catch (const ValidationError& e) {
    throw CliError(kExitValidation, e.what());
  } catch (const SearchError& e) {
    throw CliError(kExitSingular, e.what());
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (args.as_json) {
    std::cout << io::search_result_to_json(*result,
                                           config_echo(cfg, args.algorithm), wall)
                     .dump(2)
              << "\n";
  } else {
    std::cout << "best phi = " << fmt_phi(result->phi) << "\n";
    std::cout << "mean iterations = " << result->mean_iterations() << "\n";
    std::cout << "best three phi =";
    for (double p : result->best_phis(3)) std::cout << " " << fmt_phi(p);
    std::cout << "\n";
    print_design_summary(result->best, result->phi, false, std::cout);
  }
  if (!args.out.empty()) io::write_design_csv(args.out, result->best);
  if (!args.trace_out.empty()) {
    std::ofstream tf(args.trace_out);
    tf << io::search_result_to_json(*result, config_echo(cfg, args.algorithm), wall)
              .dump(2)
       << "\n";
  }
  return 0;
}

int cmd_multiphase(MultiphaseArgs args) {
  apply_runspec(args, &args);
  ModelBundle b = load_bundle(args.model, args.prior, args.region);
  if (args.n < 1) throw CliError(kExitValidation, "--n must be at least 1");
  if (args.closest.empty()) {
    std::vector<double> from_region;
    for (int k = 0; k < b.region.dim(); ++k)
      if (b.region.factor(k).closest_distance)
        from_region.push_back(*b.region.factor(k).closest_distance);
    if (static_cast<int>(from_region.size()) == b.region.dim())
      args.closest = std::move(from_region);
  }
  if (static_cast<int>(args.closest.size()) != b.region.dim())
    throw CliError(kExitValidation,
                   "closest distances are required for every factor "
                   "(--closest or region \"closest\" fields)");

  SearchConfig phase1;
  phase1.tries = args.phase1_tries > 0 ? args.phase1_tries : 30;
  phase1.critical_value = args.phase1_critical > 0.0 ? args.phase1_critical : 1.1;
  phase1.seed = args.seed;
  phase1.threads = args.threads > 0 ? args.threads : 1;

  SearchConfig phase2;
  phase2.critical_value = args.critical > 0.0 ? args.critical : 1.0001;
  phase2.threads = phase1.threads;
  phase2.extra_starts = extra_starts_from_spec(args.spec);

  Phase2Mode mode = Phase2Mode::pea;
  if (args.phase2_mode == "cea")
    mode = Phase2Mode::cea;
  else if (!args.phase2_mode.empty() && args.phase2_mode != "pea")
    throw CliError(kExitValidation, "phase-2 mode must be pea or cea");

  const auto t0 = std::chrono::steady_clock::now();
  MultiphaseReport report;
  std::optional<SearchResult> result;
  try {
    CandidateSet omega =
        CandidateSet::grid(require_levels(args, b.region.dim()), b.region);
    ClosestDistances closest(args.closest, b.region);
    result = multiphase(b.model, b.prior, omega, b.region, args.n, closest,
                        phase1, phase2, mode, &report);
  } catch (const ValidationError& e) {
    throw CliError(kExitValidation, e.what());
  } catch (const SearchError& e) {
    throw CliError(kExitSingular, e.what());
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (args.as_json) {
    json counts = json::array();
    for (const auto& [pt, c] : report.support) {
      json row = json::array();
      for (Eigen::Index k = 0; k < pt.size(); ++k) row.push_back(pt[k]);
      counts.push_back({{"point", row}, {"replicates", c}});
    }
    std::cout << json{{"phase1_tries", report.phase1_tries},
                      {"phase1_distinct", report.phase1_distinct},
                      {"phase2_phis", report.phase2_phis},
                      {"phase2_best", report.phase2_best},
                      {"phase2_mean_iterations", report.phase2_mean_iterations},
                      {"snapped_phi", report.snapped_phi},
                      {"phi", report.final_phi},
                      {"distinct_points", report.distinct_points},
                      {"support", counts},
                      {"best", io::design_to_json(result->best)},
                      {"wall_seconds", wall}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "phase 1: " << report.phase1_distinct
              << " distinct designs from " << report.phase1_tries << " tries\n";
    std::cout << "phase 2: best phi = " << fmt_phi(report.phase2_best)
              << ", mean iterations = " << report.phase2_mean_iterations << "\n";
    std::cout << "snapped phi = " << fmt_phi(report.snapped_phi) << "\n";
    std::cout << "final phi = " << fmt_phi(report.final_phi) << " with "
              << report.distinct_points << " distinct points\n";
    print_design_summary(result->best, report.final_phi, false, std::cout);
  }
  if (!args.out.empty()) io::write_design_csv(args.out, result->best);
  return 0;
}

int cmd_fit(const FitArgs& args) {
  ModelBundle b = load_bundle(args.model, "", args.region);
  io::DataSet ds = io::read_data_csv(args.data_csv, b.model.v());
  if (static_cast<int>(ds.rows.size()) < b.model.p())
    throw CliError(kExitValidation,
                   "need at least p = " + std::to_string(b.model.p()) +
                       " rows with responses, found " +
                       std::to_string(ds.rows.size()));

  std::function<double(double)> transform;
  if (args.transform == "odds") {
    transform = [](double y) { return y / (100.0 - y); };
  } else if (args.transform != "none") {
    throw CliError(kExitValidation,
                   "unknown transform '" + args.transform + "' (none, odds)");
  }

  Eigen::VectorXd init = Eigen::VectorXd::Zero(b.model.p());
  if (!args.init.empty()) {
    if (static_cast<int>(args.init.size()) != b.model.p())
      throw CliError(kExitValidation, "--init length must equal p");
    for (int j = 0; j < b.model.p(); ++j) init[j] = args.init[static_cast<std::size_t>(j)];
  }

  FitResult fit;
  try {
    fit = nls_fit(b.model, ds.rows, init, transform);
  } catch (const EvalError& e) {
    throw CliError(kExitValidation,
                   std::string("fit could not evaluate the model: ") + e.what());
  }

  if (args.as_json) {
    json theta = json::array();
    for (Eigen::Index j = 0; j < fit.theta_hat.size(); ++j)
      theta.push_back(fit.theta_hat[j]);
    std::cout << json{{"theta_hat", theta},
                      {"sse", fit.sse},
                      {"evals", fit.evals},
                      {"converged", fit.converged},
                      {"rows_used", ds.rows.size()},
                      {"rows_dropped", ds.dropped}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "theta_hat =";
    for (Eigen::Index j = 0; j < fit.theta_hat.size(); ++j) {
      char buf[32];
      std::snprintf(buf, sizeof buf, " %.6g", fit.theta_hat[j]);
      std::cout << buf;
    }
    std::cout << "\nsse = " << fit.sse << "\nevaluations = " << fit.evals
              << "\nrows used = " << ds.rows.size() << " (dropped " << ds.dropped
              << " without a response)\n";
  }
  if (!args.out_prior.empty()) io::write_prior_json(args.out_prior, fit.theta_hat);
  return fit.converged ? 0 : kExitNoConvergence;
}

int cmd_efficiency(const EffArgs& args) {
  ModelBundle b = load_bundle(args.model, args.prior, args.region);
  Design da = io::read_design_csv(args.design_a, b.region);
  Design db_ = io::read_design_csv(args.design_b, b.region);
  const double phi_a = log_det(model_matrix(b.model, da, b.prior));
  const double phi_b = log_det(model_matrix(b.model, db_, b.prior));
  if (phi_a == kSingularPhi || phi_b == kSingularPhi) {
    std::cout << "phi_A = " << fmt_phi(phi_a) << "\nphi_B = " << fmt_phi(phi_b)
              << "\n";
    return kExitSingular;
  }
  const double eff = relative_efficiency(phi_a, phi_b, b.model.p());
  if (args.as_json) {
    std::cout << json{{"phi_a", phi_a},
                      {"phi_b", phi_b},
                      {"efficiency_percent", eff}}
                     .dump(2)
              << "\n";
  } else {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", eff);
    std::cout << "phi_A = " << fmt_phi(phi_a) << "\nphi_B = " << fmt_phi(phi_b)
              << "\nefficiency = " << buf << "%\n";
  }
  return 0;
}

int cmd_standard_design(const StdArgs& args) {
  Design d = standard_design(standard_design_kind_from_string(args.kind),
                             args.example);
  if (args.out.empty()) {
    std::cout << io::design_csv(d);
  } else {
    io::write_design_csv(args.out, d);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Locally D-optimal exact designs for nonlinear multifactor models"};
  app.require_subcommand(1);

  EvalArgs ev;
  auto* eval_cmd =
      app.add_subcommand("eval", "Evaluate the criterion of a design CSV");
  eval_cmd->add_option("design", ev.design_csv, "design CSV")->required();
  eval_cmd->add_option("--model", ev.model, "model spec JSON")->required();
  eval_cmd->add_option("--prior", ev.prior, "prior JSON");
  eval_cmd->add_option("--region", ev.region, "region JSON");
  eval_cmd->add_flag("--json", ev.as_json, "machine-readable output");

  SearchArgs se;
  auto* search_cmd =
      app.add_subcommand("search", "Construct a design by exchange search");
  search_cmd->add_option("spec", se.spec, "runspec JSON supplying defaults");
  search_cmd->add_option("--model", se.model, "model spec JSON");
  search_cmd->add_option("--prior", se.prior, "prior JSON");
  search_cmd->add_option("--region", se.region, "region JSON");
  search_cmd->add_option(
      "--algorithm", se.algorithm,
      "discrete-pea|discrete-cea|continuous-pea|continuous-cea");
  search_cmd->add_option("--n", se.n, "number of runs");
  search_cmd->add_option("--tries", se.tries, "independent tries");
  search_cmd->add_option("--critical", se.critical, "acceptance threshold");
  search_cmd->add_option("--seed", se.seed, "random seed")
      ->each([&se](const std::string&) { se.seed_set = true; });
  search_cmd->add_option("--threads", se.threads, "concurrent tries");
  search_cmd
      ->add_option("--levels", se.levels,
                   "candidate levels per factor, one comma list per factor")
      ->delimiter(',');
  search_cmd->add_option("--out", se.out, "write the best design CSV here");
  search_cmd->add_option("--trace", se.trace_out, "write the JSON trace here");
  search_cmd->add_flag("--json", se.as_json, "machine-readable output");

  MultiphaseArgs mp;
  auto* mp_cmd = app.add_subcommand("multiphase", "Three-phase refinement search");
  mp_cmd->add_option("spec", mp.spec, "runspec JSON supplying defaults");
  mp_cmd->add_option("--model", mp.model, "model spec JSON");
  mp_cmd->add_option("--prior", mp.prior, "prior JSON");
  mp_cmd->add_option("--region", mp.region, "region JSON");
  mp_cmd->add_option("--n", mp.n, "number of runs");
  mp_cmd->add_option("--tries", mp.phase1_tries, "phase-1 tries");
  mp_cmd->add_option("--phase1-critical", mp.phase1_critical, "phase-1 threshold");
  mp_cmd->add_option("--critical", mp.critical, "phase-2 threshold");
  mp_cmd->add_option("--phase2", mp.phase2_mode, "phase-2 algorithm: pea|cea");
  mp_cmd->add_option("--seed", mp.seed, "random seed")
      ->each([&mp](const std::string&) { mp.seed_set = true; });
  mp_cmd->add_option("--threads", mp.threads, "concurrent tries");
  mp_cmd
      ->add_option("--levels", mp.levels,
                   "candidate levels per factor, one comma list per factor")
      ->delimiter(',');
  mp_cmd->add_option("--closest", mp.closest, "closest distances per factor")
      ->delimiter(',');
  mp_cmd->add_option("--out", mp.out, "write the final design CSV here");
  mp_cmd->add_flag("--json", mp.as_json, "machine-readable output");

  FitArgs ft;
  auto* fit_cmd = app.add_subcommand("fit", "Least-squares fit of a model to data");
  fit_cmd->add_option("data", ft.data_csv, "data CSV (factors + response)")
      ->required();
  fit_cmd->add_option("--model", ft.model, "model spec JSON")->required();
  fit_cmd->add_option("--region", ft.region, "region JSON");
  fit_cmd->add_option("--transform", ft.transform, "response transform: none|odds");
  fit_cmd->add_option("--init", ft.init, "initial parameter values")->delimiter(',');
  fit_cmd->add_option("--out-prior", ft.out_prior, "write fitted prior JSON here");
  fit_cmd->add_flag("--json", ft.as_json, "machine-readable output");

  EffArgs ef;
  auto* eff_cmd =
      app.add_subcommand("efficiency", "Relative efficiency of two designs");
  eff_cmd->add_option("design_a", ef.design_a, "design A CSV")->required();
  eff_cmd->add_option("design_b", ef.design_b, "design B CSV")->required();
  eff_cmd->add_option("--model", ef.model, "model spec JSON")->required();
  eff_cmd->add_option("--prior", ef.prior, "prior JSON");
  eff_cmd->add_option("--region", ef.region, "region JSON");
  eff_cmd->add_flag("--json", ef.as_json, "machine-readable output");

  StdArgs sd;
  auto* sd_cmd =
      app.add_subcommand("standard-design", "Emit a benchmark standard design");
  sd_cmd->add_option("--kind", sd.kind,
                     "face-centred-ccd|spherical-ccd|box-behnken");
  sd_cmd->add_option("--example", sd.example, "case study: 1 or 2");
  sd_cmd->add_option("--out", sd.out, "write CSV here (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*eval_cmd) return cmd_eval(ev);
    if (*search_cmd) return cmd_search(se);
    if (*mp_cmd) return cmd_multiphase(mp);
    if (*fit_cmd) return cmd_fit(ft);
    if (*eff_cmd) return cmd_efficiency(ef);
    if (*sd_cmd) return cmd_standard_design(sd);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const io::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
