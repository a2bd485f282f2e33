#ifndef LDOD_MODEL_HPP
#define LDOD_MODEL_HPP

#include <Eigen/Core>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ldod {

/// Raised when a mean or gradient evaluation hits a domain violation
/// (undefined transform, zero denominator, log of a non-positive value...).
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A parametric mean function f(x, theta) with its parameter gradient.
/// Evaluation is pure; instances are immutable and safe to share across
/// threads.
class Model {
 public:
  using MeanFn =
      std::function<double(std::span<const double>, std::span<const double>)>;
  using GradFn = std::function<void(std::span<const double>,
                                    std::span<const double>, std::span<double>)>;

  Model(int p, int v, MeanFn mean, GradFn gradient,
        std::vector<std::string> param_names,
        std::vector<std::string> factor_names);

  int p() const { return p_; }
  int v() const { return v_; }
  const std::vector<std::string>& param_names() const { return param_names_; }
  const std::vector<std::string>& factor_names() const { return factor_names_; }

  double mean(std::span<const double> point, std::span<const double> theta) const;
  Eigen::VectorXd gradient(std::span<const double> point,
                           std::span<const double> theta) const;
  void gradient_into(std::span<const double> point, std::span<const double> theta,
                     std::span<double> out) const;

 private:
  int p_;
  int v_;
  MeanFn mean_;
  GradFn gradient_;
  std::vector<std::string> param_names_;
  std::vector<std::string> factor_names_;
};

/// Parameter values at which a nonlinear model is linearised.
struct PriorTheta {
  Eigen::VectorXd values;

  explicit PriorTheta(Eigen::VectorXd v);
  PriorTheta(std::initializer_list<double> v);
  int size() const { return static_cast<int>(values.size()); }
};

/// Central-difference parameter gradient with step 1e-6 * (1 + |theta_j|).
Eigen::VectorXd finite_difference_gradient(const Model& model,
                                           std::span<const double> point,
                                           std::span<const double> theta);

/// Same model with the analytic gradient replaced by central differences.
/// Used for cross-checking and for models without symbolic derivatives.
Model with_finite_difference_gradient(const Model& model);

}  // namespace ldod

#endif
