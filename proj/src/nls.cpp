#include "ldod/nls.hpp"

#include <cmath>

#include "ldod/rng.hpp"

namespace ldod {

namespace {
constexpr int kRestarts = 8;
constexpr std::uint64_t kRestartSeed = 0x6c646f64;
}  // namespace

FitResult nls_fit(const Model& model, const std::vector<DataPoint>& data,
                  const Eigen::VectorXd& theta_init,
                  const std::function<double(double)>& transform) {
  const int p = model.p();
  if (theta_init.size() != p)
    throw std::invalid_argument("nls_fit: theta_init length must equal p");
  if (static_cast<int>(data.size()) < p)
    throw std::invalid_argument("nls_fit: need at least p = " + std::to_string(p) +
                                " data rows, got " + std::to_string(data.size()));
  for (const auto& d : data)
    if (d.point.size() != model.v())
      throw std::invalid_argument("nls_fit: data point dimension mismatch");

  std::vector<double> y(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    y[i] = transform ? transform(data[i].response) : data[i].response;

  auto sse = [&](std::span<const double> theta) {
    double s = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& pt = data[i].point;
      double r = model.mean({pt.data(), static_cast<std::size_t>(pt.size())}, theta) - y[i];
      s += r * r;
    }
    return s;
  };

  // wide box around the initial guess; evaluation errors inside simply
  // score +inf, so the box only needs to contain the basin
  std::vector<std::pair<double, double>> bounds;
  bounds.reserve(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) {
    double half = 10.0 * std::max(std::abs(theta_init[j]), 1.0);
    bounds.emplace_back(theta_init[j] - half, theta_init[j] + half);
  }

  std::vector<Eigen::VectorXd> restarts;
  Rng rng(kRestartSeed);
  for (int r = 0; r < kRestarts; ++r) {
    Eigen::VectorXd t(p);
    for (int j = 0; j < p; ++j) {
      double half = 0.5 * std::max(std::abs(theta_init[j]), 1.0);
      t[j] = theta_init[j] + rng.uniform(-half, half);
    }
    restarts.push_back(std::move(t));
  }

  NmOptions opts;
  opts.x_tol = 1e-10;
  opts.f_tol = 1e-12;
  opts.max_evals = 5000 * p;

  NmResult best = nm_minimize(sse, theta_init, bounds, opts, restarts);
  // polish: a fresh simplex around the winner tightens flat directions
  NmResult polish = nm_minimize(sse, best.x, bounds, opts);
  polish.evals += best.evals;
  if (best.f < polish.f) {
    polish.x = best.x;
    polish.f = best.f;
  }

  FitResult fit;
  fit.theta_hat = polish.x;
  fit.sse = polish.f;
  fit.evals = polish.evals;
  fit.converged = polish.converged;
  return fit;
}

}  // namespace ldod
