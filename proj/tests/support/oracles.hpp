// Test-side oracles, kept independent of the library's implementation
// paths: a straightforward central-difference gradient and a brute-force
// determinant.
#ifndef LDOD_TESTS_ORACLES_HPP
#define LDOD_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "ldod/model.hpp"

namespace oracle {

inline Eigen::VectorXd fd_gradient(const ldod::Model& model,
                                   std::span<const double> point,
                                   std::span<const double> theta) {
  const int p = model.p();
  Eigen::VectorXd g(p);
  std::vector<double> t(theta.begin(), theta.end());
  for (int j = 0; j < p; ++j) {
    const double h = 1e-6 * (1.0 + std::abs(t[j]));
    const double tj = t[j];
    t[j] = tj + h;
    const double up = model.mean(point, t);
    t[j] = tj - h;
    const double dn = model.mean(point, t);
    t[j] = tj;
    g[j] = (up - dn) / (2.0 * h);
  }
  return g;
}

inline double max_rel_err(const Eigen::VectorXd& got, const Eigen::VectorXd& want) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < got.size(); ++j) {
    double denom = 1.0 + std::abs(want[j]);
    worst = std::max(worst, std::abs(got[j] - want[j]) / denom);
  }
  return worst;
}

// |M| straight from LU; used to check the rank-two update formula.
inline double brute_det(const Eigen::MatrixXd& m) { return m.determinant(); }

}  // namespace oracle

#endif
