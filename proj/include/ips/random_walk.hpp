#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "ips/coupling_kernel.hpp"
#include "ips/lattice.hpp"

namespace ips {

// Finitely supported continuous-time jump kernel p(0,x), jump rate 1:
// p(0,0) = 0, sum p = 1.
struct JumpKernel {
  int dim = 1;
  std::vector<std::pair<Point, double>> jumps;

  bool symmetric() const;
  // First moment per axis (b); for d=1 use first_moment()[0].
  Eigen::ArrayXd first_moment() const;
  // theta = sum_x |x|^2 p(0,x).
  double second_moment() const;

  void validate() const;

  static JumpKernel simple(int dim);  // nearest-neighbor, uniform over the 2d steps
  static JumpKernel nn_1d(double p_right, double q_left);
};

// Transition row p_t(0,.) on a torus, with a certified truncation error.
struct TransitionRow {
  double t = 0.0;
  Lattice lat{1, 1};
  Eigen::ArrayXd probs;
  double truncation_error = 0.0;

  double at_offset(const Point& k) const { return probs[lat.site_of(k)]; }
  double at_site(int site) const { return probs[site]; }
  double origin() const { return probs[lat.site_of(Point{})]; }
};

// p_t(0,.) by uniformization: sum_n e^{-t} t^n/n! P^n(0,.), truncated once
// the Poisson tail drops below tol; stated error bound <= tol.
TransitionRow transition_row(const JumpKernel& kernel, double t, int torus_side, double tol);

// Exact SEP coupling kernel psi_t = p_t(0,.).
CouplingKernel psi_sep(const JumpKernel& kernel, double t, int torus_side, double tol);

// sum_k p_t(0,k)^2; certifies against p_{2t}(0,0) within 2*tol.
double psi_l2_squared(const JumpKernel& kernel, double t, int torus_side, double tol);

// 2 (d / (2 pi theta))^{d/2}; requires a symmetric kernel. Note this carries
// the period-2 lattice factor; the continuous-time walk's t^{-d/2} asymptote
// is half of it.
double local_limit_prefactor(const JumpKernel& kernel);

}  // namespace ips
