#ifndef LDOD_BUILTINS_HPP
#define LDOD_BUILTINS_HPP

#include <variant>

#include "ldod/model.hpp"
#include "ldod/region.hpp"

namespace ldod {

/// Consecutive-reaction yield model for the stirred-reactor study.
/// Factors (R, C, T); six parameters (th0, th0p, th1, th1p, th2, th2p).
/// The temperature enters through x = 0.0028344 - 1/(T + 273).
///
///   eta = th0 C^th1 R e^(th2 x) /
///         [(R + th0p C^th1p e^(th2p x)) (R + th0 C^th1 e^(th2 x))]
Model mechanistic_model();

/// Same mean with the gradient replaced by central differences, for
/// cross-checking the analytic derivatives.
Model mechanistic_model_fd();

/// Saturation-times-exponential conversion model for the dextran
/// depolymerisation study. Factors (S, E, P); parameters a0..a5. E and P
/// enter through xE = log10(E/6.25) and xP = (P-300)/100:
///
///   y = exp(a0 + a1 xE + a2 xP + a3 xE^2 + a4 xP^2) S / (a5 + S)
Model hybrid_model();
Model hybrid_model_fd();

/// Per-factor coding for polynomial models: either affine
/// (x - center)/scale or logarithmic log(x/ref)/log(base).
struct AffineScaling {
  double center = 0.0;
  double scale = 1.0;
};
struct LogScaling {
  double ref = 1.0;
  double base = 10.0;
};
using FactorScaling = std::variant<AffineScaling, LogScaling>;

double apply_scaling(const FactorScaling& s, double x);

/// Full second-order polynomial in the scaled variables: intercept,
/// linear terms, two-factor interactions, then squares.
/// p = 1 + v + v(v-1)/2 + v; the gradient is the regressor vector.
Model second_order_polynomial(int v, std::vector<FactorScaling> scalings,
                              std::vector<std::string> factor_names = {});

/// Single-factor saturation model g1*S/(g2+S) used in deriving the hybrid
/// model, plus the exponential pure-quadratic model in (E, P).
std::pair<Model, Model> appendix_models();

/// Regions of the two bundled case studies.
DesignRegion reactor_region();
DesignRegion dextran_region();

/// Priors used throughout the case studies (nonlinear least squares
/// estimates from the original CCD experiments).
PriorTheta reactor_prior();
PriorTheta dextran_prior();

/// Second-order polynomial models pre-coded for each case study:
/// x1 = log2(R/3), x2 = log2(C/2), x3 = (T-80)/10 for the reactor;
/// xS = (S-5)/2.5, xE = log10(E/6.25), xP = (P-300)/100 for dextran.
Model quadratic_reactor_model();
Model quadratic_dextran_model();

}  // namespace ldod

#endif
