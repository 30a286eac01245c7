#pragma once

#include <vector>

namespace ips {

// sum_{r >= m} r^{-kappa}, kappa > 1, by direct summation with an
// Euler-Maclaurin remainder; accurate to ~1e-14 relative.
double power_tail_sum(double kappa, long m);

// Translation-invariant pair potential on Z: J(r) = beta / r^kappa for
// r = 1..range, zero beyond. Hamiltonians use the convention
// H = -sum_{i<j} J(|i-j|) s_i s_j with s = 2 sigma - 1, so beta > 0 is
// ferromagnetic.
struct Interaction {
  double beta = 0.0;
  double kappa = 3.0;
  int range = 1;
  std::vector<double> couplings;  // couplings[r-1] = J(r)

  static Interaction long_range_ising(double beta, double kappa, int range);
  // Smallest range with truncated relative tail below rel_tol, capped at
  // max_range (the transfer sweep is 2^range in memory).
  static Interaction with_tail_tolerance(double beta, double kappa, double rel_tol,
                                         int max_range);

  double coupling(int r) const {
    return (r >= 1 && r <= range) ? couplings[static_cast<std::size_t>(r - 1)] : 0.0;
  }

  // T(m) = 2 sum_{r>=m} |J(r)| of the untruncated potential.
  double tail_abs_sum(int m) const;
  // Same for the truncated potential actually simulated.
  double truncated_tail_abs_sum(int m) const;
  // Relative weight of the discarded tail, T_full(range+1)/T_full(1).
  double truncation_rel_error() const;

  void validate() const;
};

// Upper bound for the single-site conditional sensitivity gamma_m:
// exp(T(m)) - 1 with the untruncated tail sum.
double gamma_bound(const Interaction& inter, int m);

}  // namespace ips
