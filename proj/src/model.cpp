#include "ldod/model.hpp"

#include <cmath>

namespace ldod {

Model::Model(int p, int v, MeanFn mean, GradFn gradient,
             std::vector<std::string> param_names,
             std::vector<std::string> factor_names)
    : p_(p),
      v_(v),
      mean_(std::move(mean)),
      gradient_(std::move(gradient)),
      param_names_(std::move(param_names)),
      factor_names_(std::move(factor_names)) {
  if (p_ < 1 || v_ < 1) throw std::invalid_argument("model needs p >= 1, v >= 1");
  if (param_names_.empty()) {
    for (int j = 0; j < p_; ++j) param_names_.push_back("theta" + std::to_string(j));
  }
  if (factor_names_.empty()) {
    for (int k = 0; k < v_; ++k) factor_names_.push_back("x" + std::to_string(k + 1));
  }
  if (static_cast<int>(param_names_.size()) != p_ ||
      static_cast<int>(factor_names_.size()) != v_)
    throw std::invalid_argument("model name lists do not match p/v");
}

double Model::mean(std::span<const double> point,
                   std::span<const double> theta) const {
  if (static_cast<int>(point.size()) != v_ || static_cast<int>(theta.size()) != p_)
    throw std::invalid_argument("mean: point/theta size mismatch");
  return mean_(point, theta);
}

Eigen::VectorXd Model::gradient(std::span<const double> point,
                                std::span<const double> theta) const {
  Eigen::VectorXd g(p_);
  gradient_into(point, theta, {g.data(), static_cast<std::size_t>(p_)});
  return g;
}

void Model::gradient_into(std::span<const double> point,
                          std::span<const double> theta,
                          std::span<double> out) const {
  if (static_cast<int>(point.size()) != v_ ||
      static_cast<int>(theta.size()) != p_ ||
      static_cast<int>(out.size()) != p_)
    throw std::invalid_argument("gradient: size mismatch");
  gradient_(point, theta, out);
}

PriorTheta::PriorTheta(Eigen::VectorXd v) : values(std::move(v)) {
  if (values.size() < 1) throw std::invalid_argument("prior must be non-empty");
  for (Eigen::Index j = 0; j < values.size(); ++j)
    if (!std::isfinite(values[j]))
      throw std::invalid_argument("prior entry " + std::to_string(j) +
                                  " is not finite");
}

PriorTheta::PriorTheta(std::initializer_list<double> v)
    : PriorTheta(Eigen::Map<const Eigen::VectorXd>(
          v.begin(), static_cast<Eigen::Index>(v.size()))) {}

Eigen::VectorXd finite_difference_gradient(const Model& model,
                                           std::span<const double> point,
                                           std::span<const double> theta) {
  const int p = model.p();
  Eigen::VectorXd g(p);
  std::vector<double> t(theta.begin(), theta.end());
  for (int j = 0; j < p; ++j) {
    const double h = 1e-6 * (1.0 + std::abs(theta[j]));
    const double saved = t[j];
    t[j] = saved + h;
    const double fp = model.mean(point, t);
    t[j] = saved - h;
    const double fm = model.mean(point, t);
    t[j] = saved;
    g[j] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Model with_finite_difference_gradient(const Model& model) {
  Model base = model;
  return Model(
      model.p(), model.v(),
      [base](std::span<const double> pt, std::span<const double> th) {
        return base.mean(pt, th);
      },
      [base](std::span<const double> pt, std::span<const double> th,
             std::span<double> out) {
        Eigen::VectorXd g = finite_difference_gradient(base, pt, th);
        for (int j = 0; j < base.p(); ++j) out[j] = g[j];
      },
      model.param_names(), model.factor_names());
}

}  // namespace ldod
