#pragma once

#include "ips/local_function.hpp"

namespace ips {

// Inputs to the closed-form deviation/moment bounds. The Young pair (u,v)
// must satisfy 1/u + 1/v = 3/2 whenever a pair bound is evaluated.
struct BoundParams {
  double c = 0.125;   // exponential-moment constant
  double u = 2.0;     // Young exponent applied to psi_t
  double v = 1.0;     // Young exponent applied to delta f
  double p = 2.0;     // moment order
  double a = 0.0;     // deviation level
  double kappa = 1.0; // tail constant of the moment lemma

  void validate_young() const;
};

struct GembCheckResult {
  double lhs = 0.0;  // E_{nu_rho} exp(f - E f), exact
  double rhs = 0.0;  // exp(c ||delta f||_2^2)
  bool holds = false;
};

// Exhaustive check of the Gaussian exponential-moment bound under the
// Bernoulli product measure nu_rho.
GembCheckResult gemb_exhaustive_check(const LocalFunction& f, double rho, double c);

// Exact mean and variance of f under nu_rho, by enumeration.
double product_mean(const LocalFunction& f, double rho);
double product_variance(const LocalFunction& f, double rho);

// 2 exp(-a^2 / (4 c psi_u^2 df_v^2)).
double deviation_bound(const BoundParams& bp, double psi_u, double df_v);

// 2 sqrt(c) (p Gamma(p/2))^{1/p} psi_u df_v.
double lp_relaxation_bound(const BoundParams& bp, double psi_u, double df_v);

// C(p) = 2^{-1/2} (p Gamma(p/2))^{1/p}.
double lp_constant(double p);

// p Gamma(p/2) kappa^{p/2}.
double moment_from_tail(double p, double kappa);

// 2 exp(-|Lambda|^{2 alpha - 2/v} a^2 / (4 c psi_u^2 df_1^2)).
double spatial_average_deviation_bound(const BoundParams& bp, double psi_u, double df_1,
                                       double window_size, double alpha);

// prefactor * t^{-d eps/(2+2 eps)} * |Lambda|^{(eps/(1+eps))(1 - kappa d/2)} * dg_1.
double mesoscopic_bound(int dim, double p, double t, double window_size, double kappa,
                        double alpha, double eps, double dg_1, double prefactor);

// 20 p * ||D^{2p}_t||_2 * ||delta f||_2 for the non-uniform moment bound;
// d_norm is the row l2 norm of the 2p-th moment matrix supplied by the
// estimators.
double nonuniform_lp_bound(int p, double d_norm, double df_2);

// Variance consequence of GEMB(c): Var <= 2 c ||delta f||_2^2.
double gemb_variance_bound(double c, double df_2);

}  // namespace ips
