#ifndef LDOD_NLS_HPP
#define LDOD_NLS_HPP

#include <optional>

#include "ldod/model.hpp"
#include "ldod/nelder_mead.hpp"

namespace ldod {

struct DataPoint {
  Eigen::VectorXd point;
  double response = 0.0;
};

struct FitResult {
  Eigen::VectorXd theta_hat;
  double sse = 0.0;
  int evals = 0;
  bool converged = false;
};

/// Least-squares fit of a model by multi-start Nelder-Mead: one descent
/// from theta_init plus eight seeded random restarts in a +-50% box
/// around it (half-width 0.5*max(|theta_j|, 1)), then a polishing descent
/// from the winner. The optional transform is applied to the responses
/// before residuals are formed. Deterministic.
FitResult nls_fit(const Model& model, const std::vector<DataPoint>& data,
                  const Eigen::VectorXd& theta_init,
                  const std::function<double(double)>& transform = {});

}  // namespace ldod

#endif
