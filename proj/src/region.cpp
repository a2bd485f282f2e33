#include "ldod/region.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace ldod {

DesignRegion::DesignRegion(std::vector<Factor> factors)
    : factors_(std::move(factors)) {
  if (factors_.empty()) throw ValidationError("region needs at least one factor");
  for (const auto& f : factors_) {
    if (!(f.lo < f.hi))
      throw ValidationError("factor " + f.name + ": lo must be < hi");
    if (f.closest_distance) {
      double c = *f.closest_distance;
      if (!(c > 0.0) || !(c < f.hi - f.lo))
        throw ValidationError("factor " + f.name +
                              ": closest distance must be in (0, hi-lo)");
    }
  }
}

bool DesignRegion::contains(std::span<const double> point, double tol) const {
  if (point.size() != factors_.size()) return false;
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    if (point[k] < factors_[k].lo - tol || point[k] > factors_[k].hi + tol)
      return false;
  }
  return true;
}

double DesignRegion::clamp(int k, double x) const {
  return std::min(std::max(x, factors_[k].lo), factors_[k].hi);
}

std::vector<std::string> DesignRegion::factor_names() const {
  std::vector<std::string> names;
  names.reserve(factors_.size());
  for (const auto& f : factors_) names.push_back(f.name);
  return names;
}

Design::Design(DesignMatrix rows, DesignRegion region)
    : rows_(std::move(rows)), region_(std::move(region)) {
  if (rows_.rows() < 1) throw ValidationError("design needs at least one run");
  if (rows_.cols() != region_.dim())
    throw ValidationError("design has " + std::to_string(rows_.cols()) +
                          " columns but region has " +
                          std::to_string(region_.dim()) + " factors");
  for (int i = 0; i < rows_.rows(); ++i) {
    for (int k = 0; k < rows_.cols(); ++k) {
      double x = rows_(i, k);
      const Factor& f = region_.factor(k);
      if (!std::isfinite(x) || x < f.lo || x > f.hi)
        throw ValidationError("run " + std::to_string(i + 1) + ", factor " +
                              f.name + ": level " + std::to_string(x) +
                              " outside [" + std::to_string(f.lo) + ", " +
                              std::to_string(f.hi) + "]");
    }
  }
}

std::vector<std::pair<Eigen::VectorXd, int>> Design::distinct_runs() const {
  std::map<std::vector<double>, int> counts;
  for (int i = 0; i < runs(); ++i) {
    auto r = run(i);
    counts[std::vector<double>(r.begin(), r.end())]++;
  }
  std::vector<std::pair<Eigen::VectorXd, int>> out;
  out.reserve(counts.size());
  for (const auto& [row, c] : counts) {
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(
        row.data(), static_cast<Eigen::Index>(row.size()));
    out.emplace_back(v, c);
  }
  return out;
}

CandidateSet CandidateSet::points(DesignMatrix pts, const DesignRegion& region) {
  if (pts.rows() == 0) throw ValidationError("candidate set is empty");
  if (pts.cols() != region.dim())
    throw ValidationError("candidate points have wrong dimension");
  // deduplicate, keeping first occurrence order
  std::set<std::vector<double>> seen;
  std::vector<std::vector<double>> unique;
  for (int i = 0; i < pts.rows(); ++i) {
    std::vector<double> row(pts.cols());
    for (int k = 0; k < pts.cols(); ++k) row[k] = pts(i, k);
    if (!region.contains(row))
      throw ValidationError("candidate point " + std::to_string(i + 1) +
                            " lies outside the region");
    if (seen.insert(row).second) unique.push_back(std::move(row));
  }
  CandidateSet cs;
  cs.is_points_ = true;
  cs.points_.resize(static_cast<Eigen::Index>(unique.size()), pts.cols());
  for (std::size_t i = 0; i < unique.size(); ++i)
    for (int k = 0; k < pts.cols(); ++k) cs.points_(static_cast<Eigen::Index>(i), k) = unique[i][k];
  cs.region_ = region;
  return cs;
}

CandidateSet CandidateSet::per_factor(std::vector<std::vector<double>> levels,
                                      const DesignRegion& region) {
  if (static_cast<int>(levels.size()) != region.dim())
    throw ValidationError("per-factor levels must cover every factor");
  for (int k = 0; k < region.dim(); ++k) {
    auto& lv = levels[k];
    if (lv.empty())
      throw ValidationError("factor " + region.factor(k).name +
                            " has no candidate levels");
    std::sort(lv.begin(), lv.end());
    lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
    for (double x : lv)
      if (x < region.factor(k).lo || x > region.factor(k).hi)
        throw ValidationError("candidate level " + std::to_string(x) +
                              " outside factor " + region.factor(k).name);
  }
  CandidateSet cs;
  cs.is_points_ = false;
  cs.levels_ = std::move(levels);
  cs.region_ = region;
  return cs;
}

CandidateSet CandidateSet::grid(const std::vector<std::vector<double>>& levels,
                                const DesignRegion& region) {
  if (static_cast<int>(levels.size()) != region.dim())
    throw ValidationError("grid levels must cover every factor");
  Eigen::Index total = 1;
  for (const auto& lv : levels) {
    if (lv.empty()) throw ValidationError("grid has an empty factor level list");
    total *= static_cast<Eigen::Index>(lv.size());
  }
  DesignMatrix pts(total, region.dim());
  for (Eigen::Index i = 0; i < total; ++i) {
    Eigen::Index rem = i;
    for (int k = region.dim() - 1; k >= 0; --k) {
      const auto& lv = levels[static_cast<std::size_t>(k)];
      pts(i, k) = lv[static_cast<std::size_t>(rem % static_cast<Eigen::Index>(lv.size()))];
      rem /= static_cast<Eigen::Index>(lv.size());
    }
  }
  return points(std::move(pts), region);
}

const DesignMatrix& CandidateSet::point_list() const {
  if (!is_points_) throw ValidationError("candidate set holds per-factor levels, not points");
  return points_;
}

const std::vector<std::vector<double>>& CandidateSet::factor_levels() const {
  if (is_points_) throw ValidationError("candidate set holds points, not per-factor levels");
  return levels_;
}

int CandidateSet::count() const {
  if (is_points_) return static_cast<int>(points_.rows());
  int total = 0;
  for (const auto& lv : levels_) total += static_cast<int>(lv.size());
  return total;
}

ClosestDistances::ClosestDistances(std::vector<double> values,
                                   const DesignRegion& region)
    : values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != region.dim())
    throw ValidationError("closest distances must cover every factor");
  for (int k = 0; k < region.dim(); ++k) {
    if (!(values_[k] > 0.0) || !(values_[k] < region.width(k)))
      throw ValidationError("closest distance for factor " +
                            region.factor(k).name +
                            " must be in (0, factor width)");
  }
}

}  // namespace ldod
