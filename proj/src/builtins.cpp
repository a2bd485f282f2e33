#include "ldod/builtins.hpp"

#include <cmath>

namespace ldod {

namespace {

struct MechTerms {
  double u, w;    // th0 C^th1 e^(th2 x), th0p C^th1p e^(th2p x)
  double cu, cw;  // the same without the leading theta
  double x, lnC;
  double A, B;  // R + w, R + u
};

MechTerms mech_terms(std::span<const double> pt, std::span<const double> th) {
  const double R = pt[0], C = pt[1], T = pt[2];
  if (T <= -273.0)
    throw EvalError("temperature transform undefined for T <= -273 (got T=" +
                    std::to_string(T) + ")");
  if (C <= 0.0)
    throw EvalError("catalyst concentration must be positive (got C=" +
                    std::to_string(C) + ")");
  MechTerms t;
  t.x = 0.0028344 - 1.0 / (T + 273.0);
  t.lnC = std::log(C);
  t.cu = std::pow(C, th[2]) * std::exp(th[4] * t.x);
  t.cw = std::pow(C, th[3]) * std::exp(th[5] * t.x);
  t.u = th[0] * t.cu;
  t.w = th[1] * t.cw;
  t.A = R + t.w;
  t.B = R + t.u;
  if (t.A == 0.0 || t.B == 0.0)
    throw EvalError("yield denominator vanishes at R=" + std::to_string(R));
  return t;
}

double hybrid_g(std::span<const double> pt, std::span<const double> a,
                double& xE, double& xP) {
  const double S = pt[0], E = pt[1], P = pt[2];
  if (E <= 0.0)
    throw EvalError("enzyme concentration must be positive (got E=" +
                    std::to_string(E) + ")");
  if (a[5] + S == 0.0)
    throw EvalError("saturation denominator a5 + S vanishes at S=" +
                    std::to_string(S));
  xE = std::log10(E / 6.25);
  xP = (P - 300.0) / 100.0;
  return std::exp(a[0] + a[1] * xE + a[2] * xP + a[3] * xE * xE +
                  a[4] * xP * xP) *
         S / (a[5] + S);
}

}  // namespace

Model mechanistic_model() {
  auto mean = [](std::span<const double> pt, std::span<const double> th) {
    const MechTerms t = mech_terms(pt, th);
    return t.u * pt[0] / (t.A * t.B);
  };
  auto grad = [](std::span<const double> pt, std::span<const double> th,
                 std::span<double> g) {
    const MechTerms t = mech_terms(pt, th);
    const double R = pt[0];
    const double dfu = R * R / (t.A * t.B * t.B);   // d eta / d u
    const double dfw = -R * t.u / (t.A * t.A * t.B);  // d eta / d w
    g[0] = dfu * t.cu;
    g[1] = dfw * t.cw;
    g[2] = dfu * t.u * t.lnC;
    g[3] = dfw * t.w * t.lnC;
    g[4] = dfu * t.u * t.x;
    g[5] = dfw * t.w * t.x;
  };
  return Model(6, 3, mean, grad, {"th0", "th0p", "th1", "th1p", "th2", "th2p"},
               {"R", "C", "T"});
}

Model mechanistic_model_fd() {
  return with_finite_difference_gradient(mechanistic_model());
}

Model hybrid_model() {
  auto mean = [](std::span<const double> pt, std::span<const double> a) {
    double xE, xP;
    return hybrid_g(pt, a, xE, xP);
  };
  auto grad = [](std::span<const double> pt, std::span<const double> a,
                 std::span<double> out) {
    double xE, xP;
    const double g = hybrid_g(pt, a, xE, xP);
    out[0] = g;
    out[1] = g * xE;
    out[2] = g * xP;
    out[3] = g * xE * xE;
    out[4] = g * xP * xP;
    out[5] = -g / (a[5] + pt[0]);
  };
  return Model(6, 3, mean, grad, {"a0", "a1", "a2", "a3", "a4", "a5"},
               {"S", "E", "P"});
}

Model hybrid_model_fd() { return with_finite_difference_gradient(hybrid_model()); }

double apply_scaling(const FactorScaling& s, double x) {
  if (const auto* a = std::get_if<AffineScaling>(&s))
    return (x - a->center) / a->scale;
  const auto& l = std::get<LogScaling>(s);
  if (x <= 0.0)
    throw EvalError("log scaling requires a positive level (got " +
                    std::to_string(x) + ")");
  return std::log(x / l.ref) / std::log(l.base);
}

Model second_order_polynomial(int v, std::vector<FactorScaling> scalings,
                              std::vector<std::string> factor_names) {
  if (v < 1) throw std::invalid_argument("second_order_polynomial: v >= 1");
  if (static_cast<int>(scalings.size()) != v)
    throw std::invalid_argument("one scaling per factor required");
  const int p = 1 + v + v * (v - 1) / 2 + v;

  auto regressors = [v, scalings](std::span<const double> pt,
                                  std::span<double> reg) {
    std::vector<double> x(static_cast<std::size_t>(v));
    for (int k = 0; k < v; ++k) x[static_cast<std::size_t>(k)] = apply_scaling(scalings[static_cast<std::size_t>(k)], pt[k]);
    int j = 0;
    reg[j++] = 1.0;
    for (int k = 0; k < v; ++k) reg[j++] = x[static_cast<std::size_t>(k)];
    for (int k = 0; k < v; ++k)
      for (int l = k + 1; l < v; ++l) reg[j++] = x[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(l)];
    for (int k = 0; k < v; ++k) reg[j++] = x[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(k)];
  };

  auto mean = [p, regressors](std::span<const double> pt,
                              std::span<const double> th) {
    std::vector<double> reg(static_cast<std::size_t>(p));
    regressors(pt, reg);
    double y = 0.0;
    for (int j = 0; j < p; ++j) y += th[j] * reg[static_cast<std::size_t>(j)];
    return y;
  };
  auto grad = [regressors](std::span<const double> pt, std::span<const double>,
                           std::span<double> out) { regressors(pt, out); };

  std::vector<std::string> params;
  params.reserve(static_cast<std::size_t>(p));
  params.push_back("b0");
  for (int k = 1; k <= v; ++k) params.push_back("b" + std::to_string(k));
  for (int k = 1; k <= v; ++k)
    for (int l = k + 1; l <= v; ++l)
      params.push_back("b" + std::to_string(k) + std::to_string(l));
  for (int k = 1; k <= v; ++k)
    params.push_back("b" + std::to_string(k) + std::to_string(k));
  return Model(p, v, mean, grad, std::move(params), std::move(factor_names));
}

std::pair<Model, Model> appendix_models() {
  auto sat_mean = [](std::span<const double> pt, std::span<const double> g) {
    if (g[1] + pt[0] == 0.0)
      throw EvalError("saturation denominator g2 + S vanishes");
    return g[0] * pt[0] / (g[1] + pt[0]);
  };
  auto sat_grad = [](std::span<const double> pt, std::span<const double> g,
                     std::span<double> out) {
    const double S = pt[0], den = g[1] + S;
    if (den == 0.0) throw EvalError("saturation denominator g2 + S vanishes");
    out[0] = S / den;
    out[1] = -g[0] * S / (den * den);
  };
  Model saturation(2, 1, sat_mean, sat_grad, {"g1", "g2"}, {"S"});

  auto eq_mean = [](std::span<const double> pt, std::span<const double> a) {
    const double E = pt[0], P = pt[1];
    if (E <= 0.0) throw EvalError("enzyme concentration must be positive");
    const double xE = std::log10(E / 6.25), xP = (P - 300.0) / 100.0;
    return std::exp(a[0] + a[1] * xE + a[2] * xP + a[3] * xE * xE +
                    a[4] * xP * xP);
  };
  auto eq_grad = [eq_mean](std::span<const double> pt, std::span<const double> a,
                           std::span<double> out) {
    const double g = eq_mean(pt, a);
    const double xE = std::log10(pt[0] / 6.25), xP = (pt[1] - 300.0) / 100.0;
    out[0] = g;
    out[1] = g * xE;
    out[2] = g * xP;
    out[3] = g * xE * xE;
    out[4] = g * xP * xP;
  };
  Model exp_quadratic(5, 2, eq_mean, eq_grad, {"a0", "a1", "a2", "a3", "a4"},
                      {"E", "P"});
  return {std::move(saturation), std::move(exp_quadratic)};
}

DesignRegion reactor_region() {
  return DesignRegion({{"R", 1.5, 6.0, {}}, {"C", 1.0, 4.0, {}}, {"T", 70.0, 90.0, {}}});
}

DesignRegion dextran_region() {
  return DesignRegion(
      {{"S", 2.5, 7.5, {}}, {"E", 0.625, 62.5, {}}, {"P", 200.0, 400.0, {}}});
}

PriorTheta reactor_prior() { return PriorTheta{5.90, 1.15, 0.53, -0.01, 15475.0, 7489.0}; }

PriorTheta dextran_prior() {
  return PriorTheta{0.4340, 1.3140, -0.1059, -0.8224, 0.4105, -2.0633};
}

Model quadratic_reactor_model() {
  return second_order_polynomial(
      3,
      {LogScaling{3.0, 2.0}, LogScaling{2.0, 2.0}, AffineScaling{80.0, 10.0}},
      {"R", "C", "T"});
}

Model quadratic_dextran_model() {
  return second_order_polynomial(
      3,
      {AffineScaling{5.0, 2.5}, LogScaling{6.25, 10.0}, AffineScaling{300.0, 100.0}},
      {"S", "E", "P"});
}

}  // namespace ldod
