#ifndef LDOD_CRITERION_HPP
#define LDOD_CRITERION_HPP

#include <Eigen/Core>
#include <limits>
#include <optional>

#include "ldod/model.hpp"
#include "ldod/region.hpp"

namespace ldod {

/// phi of a singular information matrix.
inline constexpr double kSingularPhi = -std::numeric_limits<double>::infinity();

/// n x p matrix whose ith row is the model gradient at run i, evaluated
/// at the prior.
struct ModelMatrix {
  Eigen::MatrixXd F;
};

ModelMatrix model_matrix(const Model& model, const Design& design,
                         const PriorTheta& theta0);

/// phi = log|F^T F| via a scaled symmetric factorisation. Returns
/// kSingularPhi when the information matrix is (numerically) singular;
/// singularity is a value, never an exception.
double log_det(const ModelMatrix& F);
double log_det_of_info(const Eigen::MatrixXd& M);

/// Fisher information matrix F^T F with cached inverse and log
/// determinant. Exists only in a nonsingular state; exchanges produce new
/// values, so instances can be shared freely across threads.
class InfoMatrix {
 public:
  static std::optional<InfoMatrix> build(const ModelMatrix& F);
  static std::optional<InfoMatrix> build(Eigen::MatrixXd M);

  const Eigen::MatrixXd& matrix() const { return M_; }
  const Eigen::MatrixXd& inverse() const { return Minv_; }
  double log_det() const { return logdet_; }
  int p() const { return static_cast<int>(M_.rows()); }

  friend double exchange_ratio(const InfoMatrix&, const Eigen::VectorXd&,
                               const Eigen::VectorXd&);
  friend std::optional<InfoMatrix> apply_exchange(const InfoMatrix&,
                                                  const Eigen::VectorXd&,
                                                  const Eigen::VectorXd&);

 private:
  InfoMatrix() = default;
  Eigen::MatrixXd M_;
  Eigen::MatrixXd Minv_;
  double logdet_ = kSingularPhi;
  int updates_since_refresh_ = 0;
};

/// Determinant ratio |M - f_old f_old^T + f_new f_new^T| / |M| from the
/// rank-two update identity d = (1 + v_nn)(1 - v_oo) + v_no^2 with
/// v_ab = f_a^T M^-1 f_b. Never forms the updated matrix. Numerical
/// garbage (negative d) is clamped to 0.
double exchange_ratio(const InfoMatrix& M, const Eigen::VectorXd& f_old,
                      const Eigen::VectorXd& f_new);

/// Commit an accepted exchange: M is updated exactly, the inverse by two
/// rank-one updates, and log|M| by log d. Every 50 updates (or on any
/// sign of numerical trouble) the inverse and log determinant are
/// refreshed from scratch. Returns nullopt when the update is singular.
std::optional<InfoMatrix> apply_exchange(const InfoMatrix& M,
                                         const Eigen::VectorXd& f_old,
                                         const Eigen::VectorXd& f_new);

/// exp(phiA/p) / exp(phiB/p) * 100%.
double relative_efficiency(double phi_a, double phi_b, int p);

}  // namespace ldod

#endif
