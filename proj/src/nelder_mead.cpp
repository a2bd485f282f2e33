#include "ldod/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ldod/model.hpp"

namespace ldod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Vertex {
  Eigen::VectorXd x;
  double f;
};

class Descent {
 public:
  Descent(const Objective& obj, const std::vector<std::pair<double, double>>& bounds,
          const NmOptions& opts)
      : obj_(obj), bounds_(bounds), opts_(opts), d_(static_cast<int>(bounds.size())) {}

  void clamp(Eigen::VectorXd& x) const {
    for (int k = 0; k < d_; ++k)
      x[k] = std::min(std::max(x[k], bounds_[static_cast<std::size_t>(k)].first),
                      bounds_[static_cast<std::size_t>(k)].second);
  }

  double value(const Eigen::VectorXd& x, bool propagate) {
    ++evals_;
    try {
      double f = obj_({x.data(), static_cast<std::size_t>(x.size())});
      return std::isnan(f) ? kInf : f;
    } catch (const EvalError&) {
      if (propagate) throw;
      return kInf;
    }
  }

  NmResult run(const Eigen::VectorXd& x0, bool propagate_x0_error) {
    evals_ = 0;
    Eigen::VectorXd start = x0;
    clamp(start);

    std::vector<Vertex> simplex;
    simplex.reserve(static_cast<std::size_t>(d_) + 1);
    simplex.push_back({start, value(start, propagate_x0_error)});
    for (int k = 0; k < d_; ++k) {
      Eigen::VectorXd v = start;
      const auto [lo, hi] = bounds_[static_cast<std::size_t>(k)];
      double step = opts_.initial_step * (hi - lo);
      v[k] += step;
      if (v[k] > hi) v[k] = start[k] - step;  // reflect inward at the face
      clamp(v);
      simplex.push_back({v, value(v, false)});
    }

    auto by_f = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
    std::stable_sort(simplex.begin(), simplex.end(), by_f);

    bool converged = false;
    while (evals_ < opts_.max_evals) {
      // termination: normalised simplex extent and f spread
      double xspread = 0.0;
      for (int k = 0; k < d_; ++k) {
        double w = bounds_[static_cast<std::size_t>(k)].second -
                   bounds_[static_cast<std::size_t>(k)].first;
        double mn = kInf, mx = -kInf;
        for (const auto& vt : simplex) {
          mn = std::min(mn, vt.x[k]);
          mx = std::max(mx, vt.x[k]);
        }
        xspread = std::max(xspread, (mx - mn) / w);
      }
      double fspread = simplex.back().f - simplex.front().f;
      if (xspread < opts_.x_tol || (std::isfinite(fspread) && fspread < opts_.f_tol)) {
        converged = true;
        break;
      }

      Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d_);
      for (std::size_t i = 0; i + 1 < simplex.size(); ++i) centroid += simplex[i].x;
      centroid /= static_cast<double>(d_);

      Vertex& worst = simplex.back();
      const double f_best = simplex.front().f;
      const double f_second = simplex[simplex.size() - 2].f;

      Eigen::VectorXd xr = centroid + opts_.reflection * (centroid - worst.x);
      clamp(xr);
      double fr = value(xr, false);

      if (fr < f_best) {
        Eigen::VectorXd xe = centroid + opts_.expansion * (xr - centroid);
        clamp(xe);
        double fe = value(xe, false);
        if (fe < fr) {
          worst = {xe, fe};
        } else {
          worst = {xr, fr};
        }
      } else if (fr < f_second) {
        worst = {xr, fr};
      } else {
        bool shrink = false;
        if (fr < worst.f) {  // outside contraction
          Eigen::VectorXd xc = centroid + opts_.contraction * (xr - centroid);
          clamp(xc);
          double fc = value(xc, false);
          if (fc <= fr) {
            worst = {xc, fc};
          } else {
            shrink = true;
          }
        } else {  // inside contraction
          Eigen::VectorXd xc = centroid - opts_.contraction * (centroid - worst.x);
          clamp(xc);
          double fc = value(xc, false);
          if (fc < worst.f) {
            worst = {xc, fc};
          } else {
            shrink = true;
          }
        }
        if (shrink) {
          for (std::size_t i = 1; i < simplex.size(); ++i) {
            simplex[i].x = simplex[0].x + opts_.shrink * (simplex[i].x - simplex[0].x);
            clamp(simplex[i].x);
            simplex[i].f = value(simplex[i].x, false);
          }
        }
      }
      std::stable_sort(simplex.begin(), simplex.end(), by_f);
    }

    NmResult r;
    r.x = simplex.front().x;
    r.f = simplex.front().f;
    r.evals = evals_;
    r.converged = converged;
    return r;
  }

 private:
  const Objective& obj_;
  const std::vector<std::pair<double, double>>& bounds_;
  const NmOptions& opts_;
  int d_;
  int evals_ = 0;
};

}  // namespace

void NmOptions::validate() const {
  if (!(reflection > 0.0)) throw std::invalid_argument("reflection must be > 0");
  if (!(expansion > 1.0)) throw std::invalid_argument("expansion must be > 1");
  if (!(contraction > 0.0 && contraction < 1.0))
    throw std::invalid_argument("contraction must be in (0,1)");
  if (!(shrink > 0.0 && shrink < 1.0))
    throw std::invalid_argument("shrink must be in (0,1)");
  if (!(x_tol > 0.0) || !(f_tol > 0.0))
    throw std::invalid_argument("tolerances must be > 0");
  if (!(initial_step > 0.0)) throw std::invalid_argument("initial_step must be > 0");
  if (max_evals < 1) throw std::invalid_argument("max_evals must be >= 1");
}

NmResult nm_minimize(const Objective& objective, const Eigen::VectorXd& x0,
                     const std::vector<std::pair<double, double>>& bounds,
                     const NmOptions& opts,
                     const std::vector<Eigen::VectorXd>& extra_starts) {
  opts.validate();
  const int d = static_cast<int>(bounds.size());
  if (d < 1) throw std::invalid_argument("nm_minimize: empty bounds");
  if (x0.size() != d) throw std::invalid_argument("nm_minimize: x0 dimension mismatch");
  for (const auto& [lo, hi] : bounds)
    if (!(lo < hi)) throw std::invalid_argument("nm_minimize: need lo < hi");

  Descent descent(objective, bounds, opts);
  NmResult best = descent.run(x0, true);
  for (const auto& s : extra_starts) {
    if (s.size() != d) throw std::invalid_argument("nm_minimize: extra start dimension mismatch");
    NmResult r;
    try {
      r = descent.run(s, false);
    } catch (const EvalError&) {
      continue;
    }
    best.evals += r.evals;
    if (r.f < best.f) {
      best.x = r.x;
      best.f = r.f;
      best.converged = r.converged;
    }
  }
  return best;
}

}  // namespace ldod
