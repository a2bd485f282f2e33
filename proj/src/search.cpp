#include "ldod/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <thread>

namespace ldod {

namespace {

constexpr double kTieTol = 1e-12;
constexpr int kMaxStartDraws = 1000;

enum class Mode { discrete_pea, discrete_cea, continuous_pea, continuous_cea };

struct Problem {
  const Model& model;
  const PriorTheta& theta0;
  const DesignRegion& region;
  const CandidateSet* omega = nullptr;  // discrete modes
  int n = 0;
  Mode mode{};
  double critical = 1.0001;
  int max_iterations = 30;
  const std::vector<Eigen::VectorXd>* extra_starts = nullptr;
  NmOptions nm;

  std::span<const double> theta() const {
    return {theta0.values.data(), static_cast<std::size_t>(theta0.values.size())};
  }
};

struct TryOutcome {
  DesignMatrix X;
  TryTrace trace;
};

Eigen::VectorXd gradient_at(const Problem& prob, std::span<const double> pt) {
  return prob.model.gradient(pt, prob.theta());
}

// Gradients of all discrete candidates; they depend only on the prior, so
// they are shared by every try.
Eigen::MatrixXd candidate_gradients(const Problem& prob) {
  const DesignMatrix& pts = prob.omega->point_list();
  Eigen::MatrixXd G(pts.rows(), prob.model.p());
  for (Eigen::Index c = 0; c < pts.rows(); ++c) {
    std::span<const double> pt{pts.data() + c * pts.cols(),
                               static_cast<std::size_t>(pts.cols())};
    G.row(c) = gradient_at(prob, pt);
  }
  return G;
}

std::optional<Eigen::MatrixXd> build_model_rows(const Problem& prob,
                                                const DesignMatrix& X,
                                                std::string* err) {
  Eigen::MatrixXd F(X.rows(), prob.model.p());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    std::span<const double> pt{X.data() + i * X.cols(),
                               static_cast<std::size_t>(X.cols())};
    try {
      F.row(i) = gradient_at(prob, pt);
    } catch (const EvalError& e) {
      if (err) *err = "run " + std::to_string(i + 1) + ": " + e.what();
      return std::nullopt;
    }
  }
  return F;
}

double fresh_phi(const Problem& prob, const DesignMatrix& X) {
  std::string err;
  auto F = build_model_rows(prob, X, &err);
  if (!F) return kSingularPhi;
  return log_det_of_info(F->transpose() * (*F));
}

// Best candidate among precomputed gradients; ties go to the lowest index.
std::pair<Eigen::Index, double> best_discrete_exchange(
    const InfoMatrix& M, const Eigen::VectorXd& f_old, const Eigen::MatrixXd& G) {
  double dmax = -1.0;
  std::vector<double> ds(static_cast<std::size_t>(G.rows()));
  for (Eigen::Index c = 0; c < G.rows(); ++c) {
    double d = exchange_ratio(M, f_old, G.row(c).transpose());
    ds[static_cast<std::size_t>(c)] = d;
    if (d > dmax) dmax = d;
  }
  for (Eigen::Index c = 0; c < G.rows(); ++c)
    if (ds[static_cast<std::size_t>(c)] >= dmax - kTieTol) return {c, ds[static_cast<std::size_t>(c)]};
  return {0, 0.0};
}

class TryRunner {
 public:
  TryRunner(const Problem& prob, const Eigen::MatrixXd* cand_grads)
      : prob_(prob), G_(cand_grads) {}

  // Runs one try from the given start design. The trace records the
  // maintained phi trajectory; final_phi is recomputed from scratch.
  TryOutcome run(DesignMatrix X, int try_index) const {
    TryOutcome out;
    out.trace.try_index = try_index;

    std::string err;
    auto Fopt = build_model_rows(prob_, X, &err);
    if (!Fopt) return fail(std::move(X), std::move(out), err);
    Eigen::MatrixXd F = std::move(*Fopt);
    auto M = InfoMatrix::build(Eigen::MatrixXd(F.transpose() * F));
    if (!M) return fail(std::move(X), std::move(out), "singular starting design");

    out.trace.phi_trajectory.push_back(M->log_det());
    const int n = prob_.n, v = prob_.region.dim();

    for (int pass = 0; pass < prob_.max_iterations; ++pass) {
      out.trace.iterations = pass + 1;
      bool improved = false;
      for (int i = 0; i < n; ++i) {
        switch (prob_.mode) {
          case Mode::discrete_pea: {
            auto [c, d] = best_discrete_exchange(*M, F.row(i).transpose(), *G_);
            if (d > prob_.critical) {
              if (!commit(X, F, M, out.trace, i,
                          prob_.omega->point_list().row(c).transpose(), G_->row(c).transpose(), d))
                return fail(std::move(X), std::move(out), "exchange made the information matrix singular");
              improved = true;
            }
            break;
          }
          case Mode::discrete_cea: {
            for (int k = 0; k < v; ++k) {
              const auto& levels = prob_.omega->factor_levels()[static_cast<std::size_t>(k)];
              Eigen::VectorXd f_old = F.row(i).transpose();
              double dmax = -1.0;
              std::vector<double> ds;
              std::vector<Eigen::VectorXd> grads;
              ds.reserve(levels.size());
              grads.reserve(levels.size());
              Eigen::VectorXd pt = X.row(i).transpose();
              for (double level : levels) {
                pt[k] = level;
                double d = 0.0;
                Eigen::VectorXd g;
                try {
                  g = gradient_at(prob_, {pt.data(), static_cast<std::size_t>(v)});
                  d = exchange_ratio(*M, f_old, g);
                } catch (const EvalError&) {
                  d = 0.0;
                }
                ds.push_back(d);
                grads.push_back(std::move(g));
                if (d > dmax) dmax = d;
              }
              if (dmax > prob_.critical) {
                std::size_t j = 0;
                while (ds[j] < dmax - kTieTol) ++j;
                pt = X.row(i).transpose();
                pt[static_cast<Eigen::Index>(k)] = levels[j];
                if (!commit(X, F, M, out.trace, i, pt, grads[j], ds[j]))
                  return fail(std::move(X), std::move(out), "exchange made the information matrix singular");
                improved = true;
              }
            }
            break;
          }
          case Mode::continuous_pea: {
            Eigen::VectorXd f_old = F.row(i).transpose();
            auto objective = [&](std::span<const double> pt) {
              return -candidate_ratio(*M, f_old, pt);
            };
            auto [cand, d] = maximise_over_region(objective, X.row(i).transpose());
            if (d > prob_.critical) {
              Eigen::VectorXd g = gradient_at(prob_, {cand.data(), static_cast<std::size_t>(v)});
              if (!commit(X, F, M, out.trace, i, cand, g, d))
                return fail(std::move(X), std::move(out), "exchange made the information matrix singular");
              improved = true;
            }
            break;
          }
          case Mode::continuous_cea: {
            for (int k = 0; k < v; ++k) {
              Eigen::VectorXd f_old = F.row(i).transpose();
              Eigen::VectorXd base = X.row(i).transpose();
              auto objective = [&](std::span<const double> t) {
                Eigen::VectorXd pt = base;
                pt[k] = t[0];
                return -candidate_ratio(*M, f_old, {pt.data(), static_cast<std::size_t>(pt.size())});
              };
              auto [coord, d] = maximise_coordinate(objective, k, base[k]);
              if (d > prob_.critical) {
                Eigen::VectorXd cand = base;
                cand[k] = coord;
                Eigen::VectorXd g = gradient_at(prob_, {cand.data(), static_cast<std::size_t>(v)});
                if (!commit(X, F, M, out.trace, i, cand, g, d))
                  return fail(std::move(X), std::move(out), "exchange made the information matrix singular");
                improved = true;
              }
            }
            break;
          }
        }
      }
      if (!improved) break;
    }

    out.trace.final_phi = fresh_phi(prob_, X);
    if (out.trace.final_phi == kSingularPhi)
      return fail(std::move(X), std::move(out), "singular design at convergence");
    out.X = std::move(X);
    return out;
  }

 private:
  static TryOutcome fail(DesignMatrix X, TryOutcome out, std::string why) {
    out.trace.failed = true;
    out.trace.failure = std::move(why);
    out.trace.final_phi = kSingularPhi;
    out.X = std::move(X);
    return out;
  }

  double candidate_ratio(const InfoMatrix& M, const Eigen::VectorXd& f_old,
                         std::span<const double> pt) const {
    Eigen::VectorXd g = gradient_at(prob_, pt);  // EvalError handled by the optimiser
    return exchange_ratio(M, f_old, g);
  }

  std::pair<Eigen::VectorXd, double> maximise_over_region(
      const Objective& objective, const Eigen::VectorXd& x0) const {
    std::vector<std::pair<double, double>> bounds;
    for (int k = 0; k < prob_.region.dim(); ++k)
      bounds.emplace_back(prob_.region.factor(k).lo, prob_.region.factor(k).hi);
    static const std::vector<Eigen::VectorXd> kNoStarts;
    const auto& extras = prob_.extra_starts ? *prob_.extra_starts : kNoStarts;
    NmResult r = nm_minimize(objective, x0, bounds, prob_.nm, extras);
    return {r.x, -r.f};
  }

  std::pair<double, double> maximise_coordinate(const Objective& objective,
                                                int k, double x0) const {
    std::vector<std::pair<double, double>> bounds{
        {prob_.region.factor(k).lo, prob_.region.factor(k).hi}};
    std::vector<Eigen::VectorXd> starts;
    if (prob_.extra_starts) {
      for (const auto& s : *prob_.extra_starts) {
        double c = s[k];
        bool dup = (c == x0);
        for (const auto& prev : starts) dup = dup || prev[0] == c;
        if (!dup) starts.push_back(Eigen::VectorXd::Constant(1, c));
      }
    }
    NmResult r = nm_minimize(objective, Eigen::VectorXd::Constant(1, x0), bounds,
                             prob_.nm, starts);
    return {r.x[0], -r.f};
  }

  // Commit an accepted exchange of run i to the new point.
  bool commit(DesignMatrix& X, Eigen::MatrixXd& F, std::optional<InfoMatrix>& M,
              TryTrace& trace, int i, const Eigen::VectorXd& point,
              const Eigen::VectorXd& grad, double /*d*/) const {
    auto updated = apply_exchange(*M, F.row(i).transpose(), grad);
    if (!updated) return false;
    M = std::move(updated);
    X.row(i) = point.transpose();
    F.row(i) = grad.transpose();
    trace.phi_trajectory.push_back(M->log_det());
    return true;
  }

  const Problem& prob_;
  const Eigen::MatrixXd* G_;  // candidate gradients, discrete point mode
};

DesignMatrix draw_start(const Problem& prob, Rng& rng, std::string* err) {
  const int n = prob.n, v = prob.region.dim();
  for (int attempt = 0; attempt < kMaxStartDraws; ++attempt) {
    DesignMatrix X(n, v);
    if (prob.mode == Mode::discrete_pea || prob.mode == Mode::discrete_cea) {
      if (prob.omega->is_points()) {
        const DesignMatrix& pts = prob.omega->point_list();
        for (int i = 0; i < n; ++i)
          X.row(i) = pts.row(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(pts.rows()))));
      } else {
        for (int i = 0; i < n; ++i)
          for (int k = 0; k < v; ++k) {
            const auto& lv = prob.omega->factor_levels()[static_cast<std::size_t>(k)];
            X(i, k) = lv[rng.index(lv.size())];
          }
      }
    } else {
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < v; ++k)
          X(i, k) = rng.uniform(prob.region.factor(k).lo, prob.region.factor(k).hi);
    }
    auto F = build_model_rows(prob, X, nullptr);
    if (!F) continue;
    if (InfoMatrix::build(Eigen::MatrixXd(F->transpose() * (*F)))) return X;
  }
  if (err)
    *err = "could not draw a nonsingular starting design in " +
           std::to_string(kMaxStartDraws) + " attempts";
  return DesignMatrix();
}

std::vector<TryOutcome> run_tries(const Problem& prob, const SearchConfig& config) {
  std::optional<Eigen::MatrixXd> G;
  if (prob.mode == Mode::discrete_pea) G = candidate_gradients(prob);
  TryRunner runner(prob, G ? &*G : nullptr);

  std::vector<TryOutcome> outcomes(static_cast<std::size_t>(config.tries));
  auto run_one = [&](int t) {
    Rng rng(config.seed + static_cast<std::uint64_t>(t));
    std::string err;
    DesignMatrix X0 = draw_start(prob, rng, &err);
    if (X0.rows() == 0) {
      outcomes[static_cast<std::size_t>(t)].trace.try_index = t;
      outcomes[static_cast<std::size_t>(t)].trace.failed = true;
      outcomes[static_cast<std::size_t>(t)].trace.failure = err;
      return;
    }
    outcomes[static_cast<std::size_t>(t)] = runner.run(std::move(X0), t);
  };

  const int workers = std::min(std::max(config.threads, 1), config.tries);
  if (workers <= 1) {
    for (int t = 0; t < config.tries; ++t) run_one(t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int t = next.fetch_add(1); t < config.tries; t = next.fetch_add(1))
          run_one(t);
      });
    for (auto& th : pool) th.join();
  }
  return outcomes;
}

SearchResult reduce(const Problem& prob, std::vector<TryOutcome> outcomes) {
  int best = -1;
  for (std::size_t t = 0; t < outcomes.size(); ++t) {
    if (outcomes[t].trace.failed) continue;
    if (best < 0 || outcomes[t].trace.final_phi > outcomes[static_cast<std::size_t>(best)].trace.final_phi)
      best = static_cast<int>(t);
  }
  if (best < 0) throw SearchError("all tries failed");
  SearchResult result{Design(outcomes[static_cast<std::size_t>(best)].X, prob.region),
                      outcomes[static_cast<std::size_t>(best)].trace.final_phi,
                      {}};
  result.traces.reserve(outcomes.size());
  for (auto& o : outcomes) result.traces.push_back(std::move(o.trace));
  return result;
}

Problem make_problem(const Model& model, const PriorTheta& theta0,
                     const DesignRegion& region, const CandidateSet* omega, int n,
                     Mode mode, const SearchConfig& config) {
  if (theta0.size() != model.p())
    throw ValidationError("prior length does not match the model");
  if (region.dim() != model.v())
    throw ValidationError("region dimension does not match the model");
  if (n < 1) throw ValidationError("need n >= 1 runs");
  config.validate();
  Problem prob{model, theta0, region, omega, n, mode,
               config.critical_value, config.max_iterations,
               &config.extra_starts, config.nm};
  for (const auto& s : config.extra_starts) {
    if (s.size() != region.dim())
      throw ValidationError("extra start dimension mismatch");
    if (!region.contains({s.data(), static_cast<std::size_t>(s.size())}))
      throw ValidationError("extra start lies outside the region");
  }
  return prob;
}

}  // namespace

void SearchConfig::validate() const {
  if (tries < 1) throw ValidationError("tries must be >= 1");
  if (!(critical_value > 1.0))
    throw ValidationError("critical value must be > 1");
  if (max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
  nm.validate();
}

double SearchResult::mean_iterations() const {
  double sum = 0.0;
  int count = 0;
  for (const auto& t : traces)
    if (!t.failed) {
      sum += t.iterations;
      ++count;
    }
  return count ? sum / count : 0.0;
}

std::vector<double> SearchResult::best_phis(int k) const {
  std::vector<double> phis;
  for (const auto& t : traces)
    if (!t.failed) phis.push_back(t.final_phi);
  std::sort(phis.rbegin(), phis.rend());
  if (static_cast<int>(phis.size()) > k) phis.resize(static_cast<std::size_t>(k));
  return phis;
}

Design random_initial_design(const CandidateSet& omega, int n, const Model& model,
                             const PriorTheta& theta0, Rng& rng) {
  SearchConfig cfg;
  Problem prob = make_problem(model, theta0, omega.region(), &omega, n,
                              omega.is_points() ? Mode::discrete_pea : Mode::discrete_cea,
                              cfg);
  std::string err;
  DesignMatrix X = draw_start(prob, rng, &err);
  if (X.rows() == 0) throw SearchError(err);
  return Design(std::move(X), omega.region());
}

Design random_initial_design(const DesignRegion& region, int n, const Model& model,
                             const PriorTheta& theta0, Rng& rng) {
  SearchConfig cfg;
  Problem prob = make_problem(model, theta0, region, nullptr, n,
                              Mode::continuous_pea, cfg);
  std::string err;
  DesignMatrix X = draw_start(prob, rng, &err);
  if (X.rows() == 0) throw SearchError(err);
  return Design(std::move(X), region);
}

SearchResult discrete_pea(const Model& model, const PriorTheta& theta0,
                          const CandidateSet& omega, int n,
                          const SearchConfig& config) {
  if (!omega.is_points())
    throw ValidationError("discrete_pea needs a point candidate set");
  Problem prob = make_problem(model, theta0, omega.region(), &omega, n,
                              Mode::discrete_pea, config);
  return reduce(prob, run_tries(prob, config));
}

SearchResult discrete_cea(const Model& model, const PriorTheta& theta0,
                          const CandidateSet& omega_k, int n,
                          const SearchConfig& config) {
  if (omega_k.is_points())
    throw ValidationError("discrete_cea needs per-factor candidate levels");
  Problem prob = make_problem(model, theta0, omega_k.region(), &omega_k, n,
                              Mode::discrete_cea, config);
  return reduce(prob, run_tries(prob, config));
}

SearchResult continuous_pea(const Model& model, const PriorTheta& theta0,
                            const DesignRegion& region, int n,
                            const SearchConfig& config) {
  Problem prob = make_problem(model, theta0, region, nullptr, n,
                              Mode::continuous_pea, config);
  return reduce(prob, run_tries(prob, config));
}

SearchResult continuous_cea(const Model& model, const PriorTheta& theta0,
                            const DesignRegion& region, int n,
                            const SearchConfig& config) {
  Problem prob = make_problem(model, theta0, region, nullptr, n,
                              Mode::continuous_cea, config);
  return reduce(prob, run_tries(prob, config));
}

std::vector<Cluster> cluster_quasi_replicates(const Design& design,
                                              const ClosestDistances& closest) {
  const int n = design.runs(), v = design.factors();
  if (closest.dim() != v)
    throw ValidationError("closest distances must cover every factor");
  std::vector<int> parent(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
  std::function<int(int)> find = [&](int a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      bool within = true;
      for (int k = 0; k < v && within; ++k)
        within = std::abs(design.rows()(i, k) - design.rows()(j, k)) <= closest[k];
      if (within) parent[static_cast<std::size_t>(find(i))] = find(j);
    }
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);

  std::vector<Cluster> clusters;
  clusters.reserve(groups.size());
  for (auto& [root, members] : groups) {
    std::sort(members.begin(), members.end());
    clusters.push_back({members, {}});
  }
  auto min_row = [&](const Cluster& c) {
    std::vector<double> best;
    for (int i : c.members) {
      auto r = design.run(i);
      std::vector<double> row(r.begin(), r.end());
      if (best.empty() || row < best) best = std::move(row);
    }
    return best;
  };
  std::sort(clusters.begin(), clusters.end(),
            [&](const Cluster& a, const Cluster& b) { return min_row(a) < min_row(b); });
  return clusters;
}

SearchResult multiphase(const Model& model, const PriorTheta& theta0,
                        const CandidateSet& omega, const DesignRegion& region,
                        int n, const ClosestDistances& closest,
                        const SearchConfig& phase1_config,
                        const SearchConfig& phase2_config, Phase2Mode phase2_mode,
                        MultiphaseReport* report) {
  if (closest.dim() != region.dim())
    throw ValidationError("closest distances must cover every factor");
  // phase 1: coarse discrete optimisation, keeping every distinct solution
  Problem p1 = make_problem(model, theta0, region, &omega, n,
                            Mode::discrete_pea, phase1_config);
  for (Eigen::Index c = 0; c < omega.point_list().rows(); ++c) {
    std::span<const double> pt{omega.point_list().data() + c * omega.point_list().cols(),
                               static_cast<std::size_t>(omega.point_list().cols())};
    if (!region.contains(pt, 1e-12))
      throw ValidationError("candidate set must lie inside the region");
  }
  std::vector<TryOutcome> tries1 = run_tries(p1, phase1_config);

  std::set<std::vector<double>> seen;
  std::vector<DesignMatrix> interim;
  for (auto& o : tries1) {
    if (o.trace.failed) continue;
    std::vector<std::vector<double>> rows;
    for (Eigen::Index i = 0; i < o.X.rows(); ++i) {
      std::vector<double> row(static_cast<std::size_t>(o.X.cols()));
      for (Eigen::Index k = 0; k < o.X.cols(); ++k) row[static_cast<std::size_t>(k)] = o.X(i, k);
      rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end());
    std::vector<double> key;
    for (auto& r : rows) key.insert(key.end(), r.begin(), r.end());
    if (seen.insert(std::move(key)).second) interim.push_back(o.X);
  }
  if (interim.empty()) throw SearchError("phase 1 produced no usable design");

  if (report) {
    report->phase1_tries = phase1_config.tries;
    report->phase1_distinct = static_cast<int>(interim.size());
  }

  // phase 2: one continuous run from each distinct interim design
  Problem p2 = make_problem(model, theta0, region, nullptr, n,
                            phase2_mode == Phase2Mode::pea ? Mode::continuous_pea
                                                           : Mode::continuous_cea,
                            phase2_config);
  TryRunner runner2(p2, nullptr);
  std::vector<TryOutcome> tries2(interim.size());
  {
    const int workers = std::min(std::max(phase2_config.threads, 1),
                                 static_cast<int>(interim.size()));
    std::atomic<int> next{0};
    auto work = [&] {
      for (int t = next.fetch_add(1); t < static_cast<int>(interim.size());
           t = next.fetch_add(1))
        tries2[static_cast<std::size_t>(t)] = runner2.run(interim[static_cast<std::size_t>(t)], t);
    };
    if (workers <= 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back(work);
      for (auto& th : pool) th.join();
    }
  }

  int best2 = -1;
  for (std::size_t t = 0; t < tries2.size(); ++t) {
    if (tries2[t].trace.failed) continue;
    if (best2 < 0 ||
        tries2[t].trace.final_phi > tries2[static_cast<std::size_t>(best2)].trace.final_phi)
      best2 = static_cast<int>(t);
  }
  if (best2 < 0) throw SearchError("phase 2 failed on every interim design");

  if (report) {
    for (const auto& o : tries2)
      if (!o.trace.failed) report->phase2_phis.push_back(o.trace.final_phi);
    std::sort(report->phase2_phis.rbegin(), report->phase2_phis.rend());
    report->phase2_best = tries2[static_cast<std::size_t>(best2)].trace.final_phi;
    double si = 0.0;
    int sc = 0;
    for (const auto& o : tries2)
      if (!o.trace.failed) {
        si += o.trace.iterations;
        ++sc;
      }
    report->phase2_mean_iterations = sc ? si / sc : 0.0;
  }

  // phase 3
  SearchResult result =
      snap_to_replicates(model, theta0,
                         Design(tries2[static_cast<std::size_t>(best2)].X, region),
                         closest, phase2_config, report);
  for (auto& o : tries1) result.traces.push_back(std::move(o.trace));
  if (report) {
    // phase-2 numbers were filled above; restate the phase-1 ones that
    // snap_to_replicates cannot know
    report->phase1_tries = phase1_config.tries;
    report->phase1_distinct = static_cast<int>(interim.size());
  }
  return result;
}

SearchResult snap_to_replicates(const Model& model, const PriorTheta& theta0,
                                const Design& design,
                                const ClosestDistances& closest,
                                const SearchConfig& realloc_config,
                                MultiphaseReport* report) {
  const DesignRegion& region = design.region();
  const int n = design.runs();
  const int v = region.dim();

  // sort rows so clusters and output order are canonical
  DesignMatrix X = design.rows();
  {
    std::vector<std::vector<double>> rows;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      std::vector<double> row(static_cast<std::size_t>(X.cols()));
      for (Eigen::Index k = 0; k < X.cols(); ++k) row[static_cast<std::size_t>(k)] = X(i, k);
      rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      for (Eigen::Index k = 0; k < X.cols(); ++k) X(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
  }

  std::vector<Cluster> clusters =
      cluster_quasi_replicates(Design(X, region), closest);

  Problem p3 = make_problem(model, theta0, region, nullptr, n,
                            Mode::continuous_pea, realloc_config);
  for (int k = 0; k < v; ++k) {
    for (auto& cluster : clusters) {
      const double c = closest[k];
      double xmin = X(cluster.members.front(), k), xmax = xmin;
      for (int i : cluster.members) {
        xmin = std::min(xmin, X(i, k));
        xmax = std::max(xmax, X(i, k));
      }
      const long mlo = static_cast<long>(std::floor(xmin / c + 1e-9));
      const long mhi = static_cast<long>(std::ceil(xmax / c - 1e-9));
      std::vector<double> candidates;
      for (long m = mlo; m <= mhi; ++m) {
        double x = static_cast<double>(m) * c;
        if (x >= region.factor(k).lo - 1e-12 && x <= region.factor(k).hi + 1e-12)
          candidates.push_back(region.clamp(k, x));
      }
      if (candidates.empty()) {
        // no grid point in the window survives the region: take the
        // nearest in-region multiple of the closest distance
        double mid = 0.5 * (xmin + xmax);
        long m = std::lround(mid / c);
        double x = region.clamp(k, static_cast<double>(m) * c);
        candidates.push_back(x);
      }
      double best_phi = kSingularPhi, best_x = candidates.front();
      for (double x : candidates) {
        for (int i : cluster.members) X(i, k) = x;
        double ph = fresh_phi(p3, X);
        if (ph > best_phi + kTieTol) {
          best_phi = ph;
          best_x = x;
        }
      }
      for (int i : cluster.members) X(i, k) = best_x;
      if (best_phi == kSingularPhi)
        throw SearchError("snapping left the design singular");
    }
  }
  for (auto& cluster : clusters) {
    cluster.level = X.row(cluster.members.front()).transpose();
  }

  double snapped_phi = fresh_phi(p3, X);
  if (report) report->snapped_phi = snapped_phi;

  // reallocation over the distinct snapped points, starting from the
  // snapped design
  Design snapped(X, region);
  auto support = snapped.distinct_runs();
  DesignMatrix distinct(static_cast<Eigen::Index>(support.size()), v);
  for (std::size_t i = 0; i < support.size(); ++i)
    distinct.row(static_cast<Eigen::Index>(i)) = support[i].first.transpose();
  CandidateSet omega_star = CandidateSet::points(distinct, region);

  SearchConfig realloc_cfg = realloc_config;
  realloc_cfg.tries = 1;
  Problem p4 = make_problem(model, theta0, region, &omega_star, n,
                            Mode::discrete_pea, realloc_cfg);
  Eigen::MatrixXd G = candidate_gradients(p4);
  TryRunner runner4(p4, &G);
  TryOutcome final_try = runner4.run(X, 0);

  DesignMatrix Xf = final_try.trace.failed || final_try.trace.final_phi < snapped_phi
                        ? X
                        : final_try.X;
  double final_phi = fresh_phi(p4, Xf);

  SearchResult result{Design(Xf, region), final_phi, {}};
  result.traces.push_back(std::move(final_try.trace));
  if (report) {
    report->final_phi = final_phi;
    auto sup = result.best.distinct_runs();
    report->distinct_points = static_cast<int>(sup.size());
    report->support = std::move(sup);
  }
  return result;
}

}  // namespace ldod
