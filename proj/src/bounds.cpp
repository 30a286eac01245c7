#include "ips/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace ips {

void BoundParams::validate_young() const {
  if (u < 1.0 || v < 1.0) throw std::invalid_argument("BoundParams: Young exponents must be >= 1");
  if (std::fabs(1.0 / u + 1.0 / v - 1.5) > 1e-12)
    throw std::invalid_argument("BoundParams: Young pair must satisfy 1/u + 1/v = 3/2");
}

namespace {

void check_rho(double rho) {
  if (rho <= 0.0 || rho >= 1.0)
    throw std::invalid_argument("density must lie in (0,1)");
}

// Probability of the restriction encoded by `bits` under nu_rho.
double restriction_weight(const LocalFunction& f, std::uint32_t bits, double rho) {
  double w = 1.0;
  for (int j = 0; j < f.arity(); ++j) w *= (bits & f.bit_of(j)) ? rho : (1.0 - rho);
  return w;
}

}  // namespace

double product_mean(const LocalFunction& f, double rho) {
  check_rho(rho);
  const std::uint32_t n = 1u << f.arity();
  double m = 0.0;
  for (std::uint32_t eta = 0; eta < n; ++eta) m += restriction_weight(f, eta, rho) * f.eval_bits(eta);
  return m;
}

double product_variance(const LocalFunction& f, double rho) {
  check_rho(rho);
  const double m = product_mean(f, rho);
  const std::uint32_t n = 1u << f.arity();
  double v = 0.0;
  for (std::uint32_t eta = 0; eta < n; ++eta) {
    const double d = f.eval_bits(eta) - m;
    v += restriction_weight(f, eta, rho) * d * d;
  }
  return v;
}

GembCheckResult gemb_exhaustive_check(const LocalFunction& f, double rho, double c) {
  check_rho(rho);
  const double m = product_mean(f, rho);
  const std::uint32_t n = 1u << f.arity();
  double lhs = 0.0;
  for (std::uint32_t eta = 0; eta < n; ++eta)
    lhs += restriction_weight(f, eta, rho) * std::exp(f.eval_bits(eta) - m);
  const DeltaVector dv = delta_vector(f);
  const double l2 = lp_norm(dv, 2.0);
  GembCheckResult out;
  out.lhs = lhs;
  out.rhs = std::exp(c * l2 * l2);
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-12);
  return out;
}

double deviation_bound(const BoundParams& bp, double psi_u, double df_v) {
  bp.validate_young();
  if (bp.a < 0.0) throw std::invalid_argument("deviation_bound: a must be >= 0");
  const double denom = 4.0 * bp.c * psi_u * psi_u * df_v * df_v;
  if (denom <= 0.0) {
    if (bp.a == 0.0) return 2.0;
    throw std::invalid_argument("deviation_bound: zero norms with positive deviation level");
  }
  return 2.0 * std::exp(-bp.a * bp.a / denom);
}

double lp_constant(double p) {
  if (p < 1.0) throw std::invalid_argument("lp_constant: p must be >= 1");
  return std::pow(2.0, -0.5) * std::pow(p * std::tgamma(p / 2.0), 1.0 / p);
}

double lp_relaxation_bound(const BoundParams& bp, double psi_u, double df_v) {
  bp.validate_young();
  if (bp.p < 1.0) throw std::invalid_argument("lp_relaxation_bound: p must be >= 1");
  return 2.0 * std::sqrt(bp.c) * std::pow(bp.p * std::tgamma(bp.p / 2.0), 1.0 / bp.p) * psi_u * df_v;
}

double moment_from_tail(double p, double kappa) {
  if (p < 1.0) throw std::invalid_argument("moment_from_tail: p must be >= 1");
  if (kappa <= 0.0) throw std::invalid_argument("moment_from_tail: kappa must be positive");
  return p * std::tgamma(p / 2.0) * std::pow(kappa, p / 2.0);
}

double spatial_average_deviation_bound(const BoundParams& bp, double psi_u, double df_1,
                                       double window_size, double alpha) {
  bp.validate_young();
  if (alpha < 0.5) throw std::invalid_argument("spatial_average_deviation_bound: alpha must be >= 1/2");
  if (window_size < 1.0)
    throw std::invalid_argument("spatial_average_deviation_bound: window size must be >= 1");
  const double denom = 4.0 * bp.c * psi_u * psi_u * df_1 * df_1;
  if (denom <= 0.0) {
    if (bp.a == 0.0) return 2.0;
    throw std::invalid_argument("spatial_average_deviation_bound: zero norms with positive level");
  }
  const double gain = std::pow(window_size, 2.0 * alpha - 2.0 / bp.v);
  return 2.0 * std::exp(-gain * bp.a * bp.a / denom);
}

double mesoscopic_bound(int dim, double p, double t, double window_size, double kappa,
                        double alpha, double eps, double dg_1, double prefactor) {
  if (p < 1.0) throw std::invalid_argument("mesoscopic_bound: p must be >= 1");
  if (eps <= 0.0 || eps >= 1.0) throw std::invalid_argument("mesoscopic_bound: need 0 < eps < 1");
  if (alpha < 0.5) throw std::invalid_argument("mesoscopic_bound: alpha must be >= 1/2");
  if (t <= 0.0 || window_size < 1.0)
    throw std::invalid_argument("mesoscopic_bound: need t > 0 and window size >= 1");
  const double d = dim;
  const double t_exp = -d * eps / (2.0 + 2.0 * eps);
  const double vol_exp = (eps / (1.0 + eps)) * (1.0 - kappa * d / 2.0);
  return prefactor * std::pow(t, t_exp) * std::pow(window_size, vol_exp) * dg_1;
}

double nonuniform_lp_bound(int p, double d_norm, double df_2) {
  if (p < 1) throw std::invalid_argument("nonuniform_lp_bound: p must be a positive integer");
  return 20.0 * static_cast<double>(p) * d_norm * df_2;
}

double gemb_variance_bound(double c, double df_2) { return 2.0 * c * df_2 * df_2; }

}  // namespace ips
