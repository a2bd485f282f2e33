#include "ldod/criterion.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace ldod {

namespace {

constexpr int kRefreshInterval = 50;
constexpr double kPivotTol = 1e-12;      // on the correlation-scaled matrix
constexpr double kAbsDetFloor = 1e-300;  // |M| at or below this is singular

struct Factorisation {
  double logdet;
  Eigen::MatrixXd inverse;
};

// Symmetric factorisation of a PSD matrix via diagonal scaling to
// correlation form followed by LDLT. Scaling separates the (often huge)
// column magnitude spread of nonlinear-model information matrices from
// genuine rank deficiency.
std::optional<Factorisation> factorise(const Eigen::MatrixXd& M) {
  const Eigen::Index p = M.rows();
  Eigen::VectorXd d = M.diagonal();
  double logscale = 0.0;
  Eigen::VectorXd s(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!(d[i] > 0.0) || !std::isfinite(d[i])) return std::nullopt;
    s[i] = 1.0 / std::sqrt(d[i]);
    logscale += std::log(d[i]);
  }
  Eigen::MatrixXd C = s.asDiagonal() * M * s.asDiagonal();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(C);
  if (ldlt.info() != Eigen::Success) return std::nullopt;
  Eigen::VectorXd piv = ldlt.vectorD();
  double logdet_c = 0.0;
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!(piv[i] > kPivotTol) || !std::isfinite(piv[i])) return std::nullopt;
    logdet_c += std::log(piv[i]);
  }
  double logdet = logdet_c + logscale;
  if (logdet <= std::log(kAbsDetFloor)) return std::nullopt;
  Eigen::MatrixXd Cinv = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
  Factorisation f;
  f.logdet = logdet;
  f.inverse = s.asDiagonal() * Cinv * s.asDiagonal();
  return f;
}

}  // namespace

ModelMatrix model_matrix(const Model& model, const Design& design,
                         const PriorTheta& theta0) {
  if (design.factors() != model.v())
    throw ValidationError("design factor count does not match the model");
  if (theta0.size() != model.p())
    throw ValidationError("prior length does not match the model");
  const int n = design.runs(), p = model.p();
  ModelMatrix out;
  out.F.resize(n, p);
  std::span<const double> th(theta0.values.data(),
                             static_cast<std::size_t>(p));
  Eigen::VectorXd g(p);
  for (int i = 0; i < n; ++i) {
    try {
      model.gradient_into(design.run(i), th, {g.data(), static_cast<std::size_t>(p)});
    } catch (const EvalError& e) {
      throw EvalError("run " + std::to_string(i + 1) + ": " + e.what());
    }
    for (int j = 0; j < p; ++j) {
      if (!std::isfinite(g[j]))
        throw EvalError("run " + std::to_string(i + 1) +
                        ": non-finite gradient component " + std::to_string(j));
      out.F(i, j) = g[j];
    }
  }
  return out;
}

double log_det(const ModelMatrix& F) {
  return log_det_of_info(F.F.transpose() * F.F);
}

double log_det_of_info(const Eigen::MatrixXd& M) {
  auto f = factorise(M);
  return f ? f->logdet : kSingularPhi;
}

std::optional<InfoMatrix> InfoMatrix::build(const ModelMatrix& F) {
  return build(F.F.transpose() * F.F);
}

std::optional<InfoMatrix> InfoMatrix::build(Eigen::MatrixXd M) {
  auto f = factorise(M);
  if (!f) return std::nullopt;
  InfoMatrix im;
  im.M_ = std::move(M);
  im.Minv_ = std::move(f->inverse);
  im.logdet_ = f->logdet;
  return im;
}

double exchange_ratio(const InfoMatrix& M, const Eigen::VectorXd& f_old,
                      const Eigen::VectorXd& f_new) {
  const Eigen::VectorXd mi_new = M.Minv_ * f_new;
  const double vnn = f_new.dot(mi_new);
  const double voo = f_old.dot(M.Minv_ * f_old);
  const double vno = f_old.dot(mi_new);
  const double d = (1.0 + vnn) * (1.0 - voo) + vno * vno;
  if (!std::isfinite(d) || d < 0.0) return 0.0;
  return d;
}

std::optional<InfoMatrix> apply_exchange(const InfoMatrix& M,
                                         const Eigen::VectorXd& f_old,
                                         const Eigen::VectorXd& f_new) {
  const double d = exchange_ratio(M, f_old, f_new);
  if (d <= kPivotTol) return std::nullopt;

  InfoMatrix out;
  out.M_ = M.M_ + f_new * f_new.transpose() - f_old * f_old.transpose();
  out.logdet_ = M.logdet_ + std::log(d);
  out.updates_since_refresh_ = M.updates_since_refresh_ + 1;

  if (out.updates_since_refresh_ >= kRefreshInterval) {
    auto f = factorise(out.M_);
    if (!f) return std::nullopt;
    out.Minv_ = std::move(f->inverse);
    out.logdet_ = f->logdet;
    out.updates_since_refresh_ = 0;
    return out;
  }

  // Sherman-Morrison twice: add f_new f_new^T, then remove f_old f_old^T.
  const Eigen::VectorXd a = M.Minv_ * f_new;
  const double alpha = 1.0 + f_new.dot(a);
  if (!(alpha > kPivotTol) || !std::isfinite(alpha)) return std::nullopt;
  Eigen::MatrixXd inv1 = M.Minv_ - (a * a.transpose()) / alpha;
  const Eigen::VectorXd b = inv1 * f_old;
  const double beta = 1.0 - f_old.dot(b);
  if (!(beta > kPivotTol) || !std::isfinite(beta)) {
    // removal leaves a singular matrix unless the exact refactorisation
    // disagrees (possible when the cached inverse has drifted)
    auto f = factorise(out.M_);
    if (!f) return std::nullopt;
    out.Minv_ = std::move(f->inverse);
    out.logdet_ = f->logdet;
    out.updates_since_refresh_ = 0;
    return out;
  }
  out.Minv_ = inv1 + (b * b.transpose()) / beta;
  return out;
}

double relative_efficiency(double phi_a, double phi_b, int p) {
  if (p < 1) throw std::invalid_argument("relative_efficiency: p >= 1");
  if (!std::isfinite(phi_a) || !std::isfinite(phi_b))
    throw std::invalid_argument("relative_efficiency: phi must be finite");
  return std::exp((phi_a - phi_b) / p) * 100.0;
}

}  // namespace ldod
