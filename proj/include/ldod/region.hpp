#ifndef LDOD_REGION_HPP
#define LDOD_REGION_HPP

#include <Eigen/Core>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ldod {

/// Design matrices are stored row-major so a run is a contiguous span.
using DesignMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Factor {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  std::optional<double> closest_distance;  // feasible-level resolution
};

/// The cuboid experimental region: per-factor bounds, optionally with a
/// closest-distance resolution used by the multiphase refinement.
class DesignRegion {
 public:
  explicit DesignRegion(std::vector<Factor> factors);

  int dim() const { return static_cast<int>(factors_.size()); }
  const Factor& factor(int k) const { return factors_.at(k); }
  const std::vector<Factor>& factors() const { return factors_; }
  double width(int k) const { return factors_[k].hi - factors_[k].lo; }

  bool contains(std::span<const double> point, double tol = 0.0) const;
  double clamp(int k, double x) const;

  std::vector<std::string> factor_names() const;

 private:
  std::vector<Factor> factors_;
};

/// An exact n-run design: one row per run, in natural factor units.
class Design {
 public:
  Design(DesignMatrix rows, DesignRegion region);

  int runs() const { return static_cast<int>(rows_.rows()); }
  int factors() const { return static_cast<int>(rows_.cols()); }
  const DesignMatrix& rows() const { return rows_; }
  const DesignRegion& region() const { return region_; }

  std::span<const double> run(int i) const {
    return {rows_.data() + static_cast<std::ptrdiff_t>(i) * rows_.cols(),
            static_cast<std::size_t>(rows_.cols())};
  }

  /// Distinct rows (exact comparison) with replicate counts, in
  /// lexicographic row order.
  std::vector<std::pair<Eigen::VectorXd, int>> distinct_runs() const;

 private:
  DesignMatrix rows_;
  DesignRegion region_;
};

/// Discrete candidates: either full points or per-factor coordinate sets.
/// Candidates are validated against (and remember) their region.
class CandidateSet {
 public:
  static CandidateSet points(DesignMatrix pts, const DesignRegion& region);
  static CandidateSet per_factor(std::vector<std::vector<double>> levels,
                                 const DesignRegion& region);
  /// Cartesian product of per-factor levels as a point set.
  static CandidateSet grid(const std::vector<std::vector<double>>& levels,
                           const DesignRegion& region);

  bool is_points() const { return is_points_; }
  const DesignMatrix& point_list() const;
  const std::vector<std::vector<double>>& factor_levels() const;
  const DesignRegion& region() const { return *region_; }
  int count() const;  // N for points, total coordinates for per-factor

 private:
  CandidateSet() = default;
  bool is_points_ = true;
  DesignMatrix points_;
  std::vector<std::vector<double>> levels_;
  std::optional<DesignRegion> region_;
};

/// Per-factor minimum spacing between distinguishable levels.
class ClosestDistances {
 public:
  ClosestDistances(std::vector<double> values, const DesignRegion& region);
  double operator[](int k) const { return values_.at(k); }
  int dim() const { return static_cast<int>(values_.size()); }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

}  // namespace ldod

#endif
