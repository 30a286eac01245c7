#include "ips/interaction.hpp"

#include <cmath>
#include <stdexcept>

namespace ips {

double power_tail_sum(double kappa, long m) {
  if (kappa <= 1.0) throw std::invalid_argument("power_tail_sum: kappa must exceed 1");
  if (m < 1) m = 1;
  const long cutoff = m + 2000;
  double s = 0.0;
  for (long r = m; r < cutoff; ++r) s += std::pow(static_cast<double>(r), -kappa);
  // Euler-Maclaurin remainder from cutoff: integral + f/2 - f'/12 + f'''/720.
  const double x = static_cast<double>(cutoff);
  const double fx = std::pow(x, -kappa);
  s += fx * x / (kappa - 1.0);
  s += 0.5 * fx;
  s += kappa * fx / x / 12.0;
  s -= kappa * (kappa + 1.0) * (kappa + 2.0) * fx / (x * x * x) / 720.0;
  return s;
}

Interaction Interaction::long_range_ising(double beta, double kappa, int range) {
  Interaction inter;
  inter.beta = beta;
  inter.kappa = kappa;
  inter.range = range;
  inter.couplings.resize(static_cast<std::size_t>(range));
  for (int r = 1; r <= range; ++r)
    inter.couplings[static_cast<std::size_t>(r - 1)] = beta * std::pow(static_cast<double>(r), -kappa);
  inter.validate();
  return inter;
}

Interaction Interaction::with_tail_tolerance(double beta, double kappa, double rel_tol,
                                             int max_range) {
  if (rel_tol <= 0.0) throw std::invalid_argument("Interaction: rel_tol must be positive");
  const double total = power_tail_sum(kappa, 1);
  int range = max_range;
  for (int r = 1; r <= max_range; ++r) {
    if (power_tail_sum(kappa, r + 1) <= rel_tol * total) {
      range = r;
      break;
    }
  }
  return long_range_ising(beta, kappa, range);
}

void Interaction::validate() const {
  if (kappa <= 2.0)
    throw std::invalid_argument("Interaction: kappa must exceed 2 (summability of r|J(r)|)");
  if (range < 1) throw std::invalid_argument("Interaction: range must be >= 1");
  if (couplings.size() != static_cast<std::size_t>(range))
    throw std::invalid_argument("Interaction: couplings size mismatch");
}

double Interaction::tail_abs_sum(int m) const {
  if (m < 1) m = 1;
  return 2.0 * std::fabs(beta) * power_tail_sum(kappa, m);
}

double Interaction::truncated_tail_abs_sum(int m) const {
  if (m < 1) m = 1;
  double s = 0.0;
  for (int r = m; r <= range; ++r) s += std::fabs(coupling(r));
  return 2.0 * s;
}

double Interaction::truncation_rel_error() const {
  const double total = tail_abs_sum(1);
  if (total == 0.0) return 0.0;
  return tail_abs_sum(range + 1) / total;
}

double gamma_bound(const Interaction& inter, int m) {
  if (m < 1) throw std::invalid_argument("gamma_bound: m must be >= 1");
  return std::expm1(inter.tail_abs_sum(m));
}

}  // namespace ips
