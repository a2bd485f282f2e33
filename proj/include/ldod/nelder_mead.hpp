#ifndef LDOD_NELDER_MEAD_HPP
#define LDOD_NELDER_MEAD_HPP

#include <Eigen/Core>
#include <functional>
#include <span>
#include <vector>

namespace ldod {

struct NmOptions {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double initial_step = 0.05;  // fraction of each coordinate's box width
  double x_tol = 1e-8;         // simplex size, as a fraction of box width
  double f_tol = 1e-10;        // spread of f over the simplex
  int max_evals = 2000;        // per descent

  void validate() const;
};

struct NmResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int evals = 0;
  bool converged = false;  // terminated on x_tol/f_tol rather than max_evals
};

using Objective = std::function<double(std::span<const double>)>;

/// Bounded Nelder-Mead descent. Every candidate is clamped to the box
/// before evaluation, so no infeasible point is ever evaluated or
/// returned. Runs one descent from x0 and one from each extra start and
/// returns the best. Failed evaluations (EvalError) count as +infinity,
/// except at x0 itself where the error propagates. Fully deterministic.
NmResult nm_minimize(const Objective& objective, const Eigen::VectorXd& x0,
                     const std::vector<std::pair<double, double>>& bounds,
                     const NmOptions& opts = {},
                     const std::vector<Eigen::VectorXd>& extra_starts = {});

}  // namespace ldod

#endif
