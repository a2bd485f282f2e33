#ifndef LDOD_SEARCH_HPP
#define LDOD_SEARCH_HPP

#include <cstdint>
#include <optional>

#include "ldod/criterion.hpp"
#include "ldod/nelder_mead.hpp"
#include "ldod/region.hpp"
#include "ldod/rng.hpp"

namespace ldod {

struct SearchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SearchConfig {
  int tries = 1;
  double critical_value = 1.0001;
  std::uint64_t seed = 0;
  int max_iterations = 30;
  std::vector<Eigen::VectorXd> extra_starts;  // continuous modes only
  int threads = 1;
  NmOptions nm;  // inner optimiser settings, continuous modes only

  void validate() const;
};

struct TryTrace {
  int try_index = 0;
  int iterations = 0;  // full passes over the design, including the last
  std::vector<double> phi_trajectory;  // initial phi, then after each exchange
  double final_phi = kSingularPhi;     // recomputed from scratch at the end
  bool failed = false;
  std::string failure;
};

struct SearchResult {
  Design best;
  double phi = kSingularPhi;
  std::vector<TryTrace> traces;

  double mean_iterations() const;            // over successful tries
  std::vector<double> best_phis(int k) const;  // top final phi values, descending
};

/// n i.i.d. draws (with replacement) from the candidate set or the
/// region, redrawn whole until the information matrix is nonsingular.
/// Throws SearchError after 1000 rejected draws.
Design random_initial_design(const CandidateSet& omega, int n, const Model& model,
                             const PriorTheta& theta0, Rng& rng);
Design random_initial_design(const DesignRegion& region, int n, const Model& model,
                             const PriorTheta& theta0, Rng& rng);

/// Point exchange over a discrete candidate set: each pass visits every
/// run and replaces it by the best candidate whenever the improvement
/// ratio beats the critical value.
SearchResult discrete_pea(const Model& model, const PriorTheta& theta0,
                          const CandidateSet& omega, int n,
                          const SearchConfig& config);

/// Coordinate exchange over per-factor candidate levels.
SearchResult discrete_cea(const Model& model, const PriorTheta& theta0,
                          const CandidateSet& omega_k, int n,
                          const SearchConfig& config);

/// Point exchange where the replacement is found by Nelder-Mead over the
/// whole region, started from the current run plus config.extra_starts.
SearchResult continuous_pea(const Model& model, const PriorTheta& theta0,
                            const DesignRegion& region, int n,
                            const SearchConfig& config);

/// Coordinate exchange with a one-dimensional Nelder-Mead per coordinate.
SearchResult continuous_cea(const Model& model, const PriorTheta& theta0,
                            const DesignRegion& region, int n,
                            const SearchConfig& config);

/// Quasi-replicate cluster: run indices plus (after snapping) the shared
/// level. cluster_quasi_replicates leaves `level` empty.
struct Cluster {
  std::vector<int> members;
  Eigen::VectorXd level;
};

/// Single-linkage grouping of runs whose factors all agree within the
/// closest distances, transitively closed. Clusters are ordered by their
/// lexicographically smallest member; members by run index.
std::vector<Cluster> cluster_quasi_replicates(const Design& design,
                                              const ClosestDistances& closest);

enum class Phase2Mode { pea, cea };

struct MultiphaseReport {
  int phase1_tries = 0;
  int phase1_distinct = 0;
  std::vector<double> phase2_phis;  // per distinct start, descending
  double phase2_best = kSingularPhi;
  double phase2_mean_iterations = 0.0;
  double snapped_phi = kSingularPhi;
  double final_phi = kSingularPhi;
  int distinct_points = 0;
  std::vector<std::pair<Eigen::VectorXd, int>> support;  // level, replicates
};

/// Final refinement phase alone: cluster quasi-replicates, snap each
/// cluster's levels to the closest-distance grid (choosing the
/// phi-maximising grid level factor by factor), then reallocate
/// replicates by a discrete exchange over the distinct snapped points.
/// Never returns a design worse than the snapped one.
SearchResult snap_to_replicates(const Model& model, const PriorTheta& theta0,
                                const Design& design,
                                const ClosestDistances& closest,
                                const SearchConfig& realloc_config,
                                MultiphaseReport* report = nullptr);

/// Three-phase refinement: coarse discrete optimisation, continuous
/// optimisation from every distinct interim design, then quasi-replicate
/// clustering, level snapping to the closest-distance grid, and replicate
/// reallocation over the distinct snapped points.
SearchResult multiphase(const Model& model, const PriorTheta& theta0,
                        const CandidateSet& omega, const DesignRegion& region,
                        int n, const ClosestDistances& closest,
                        const SearchConfig& phase1_config,
                        const SearchConfig& phase2_config, Phase2Mode phase2_mode,
                        MultiphaseReport* report = nullptr);

}  // namespace ldod

#endif
