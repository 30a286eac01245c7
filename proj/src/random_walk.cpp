#include "ips/random_walk.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ips {

bool JumpKernel::symmetric() const {
  for (const auto& [x, p] : jumps) {
    Point neg{};
    for (int a = 0; a < kMaxDim; ++a) neg[static_cast<std::size_t>(a)] = -x[static_cast<std::size_t>(a)];
    double q = 0.0;
    for (const auto& [y, py] : jumps)
      if (y == neg) q = py;
    if (std::fabs(p - q) > 1e-12) return false;
  }
  return true;
}

Eigen::ArrayXd JumpKernel::first_moment() const {
  Eigen::ArrayXd b = Eigen::ArrayXd::Zero(dim);
  for (const auto& [x, p] : jumps)
    for (int a = 0; a < dim; ++a) b[a] += p * x[static_cast<std::size_t>(a)];
  return b;
}

double JumpKernel::second_moment() const {
  double s = 0.0;
  for (const auto& [x, p] : jumps) {
    double n2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double c = x[static_cast<std::size_t>(a)];
      n2 += c * c;
    }
    s += p * n2;
  }
  return s;
}

void JumpKernel::validate() const {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("JumpKernel: bad dimension");
  double total = 0.0;
  for (const auto& [x, p] : jumps) {
    if (p < 0.0) throw std::invalid_argument("JumpKernel: negative probability");
    bool zero = true;
    for (int a = 0; a < dim; ++a) zero = zero && x[static_cast<std::size_t>(a)] == 0;
    if (zero && p != 0.0) throw std::invalid_argument("JumpKernel: p(0,0) must be 0");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw std::invalid_argument("JumpKernel: probabilities must sum to 1");
  if (second_moment() <= 0.0) throw std::invalid_argument("JumpKernel: theta must be positive");
}

JumpKernel JumpKernel::simple(int dim) {
  JumpKernel k;
  k.dim = dim;
  const double p = 1.0 / (2.0 * dim);
  for (int a = 0; a < dim; ++a) {
    Point plus{}, minus{};
    plus[static_cast<std::size_t>(a)] = 1;
    minus[static_cast<std::size_t>(a)] = -1;
    k.jumps.emplace_back(plus, p);
    k.jumps.emplace_back(minus, p);
  }
  return k;
}

JumpKernel JumpKernel::nn_1d(double p_right, double q_left) {
  JumpKernel k;
  k.dim = 1;
  k.jumps.emplace_back(make_point({1}), p_right);
  k.jumps.emplace_back(make_point({-1}), q_left);
  return k;
}

TransitionRow transition_row(const JumpKernel& kernel, double t, int torus_side, double tol) {
  kernel.validate();
  if (tol <= 0.0) throw std::invalid_argument("transition_row: tol must be positive");
  if (t < 0.0) throw std::invalid_argument("transition_row: negative time");

  Lattice lat(kernel.dim, torus_side);
  const int n = lat.size();

  TransitionRow out;
  out.t = t;
  out.lat = lat;
  out.probs = Eigen::ArrayXd::Zero(n);

  // Precompute stencil targets: for each site, the sites it can be reached
  // from in one step (source convolution p_next(k) = sum_z p(z) p_prev(k-z)).
  std::vector<std::pair<std::vector<int>, double>> stencil;
  for (const auto& [z, p] : kernel.jumps) {
    if (p == 0.0) continue;
    std::vector<int> from(static_cast<std::size_t>(n));
    Point neg{};
    for (int a = 0; a < kMaxDim; ++a) neg[static_cast<std::size_t>(a)] = -z[static_cast<std::size_t>(a)];
    for (int k = 0; k < n; ++k) from[static_cast<std::size_t>(k)] = lat.translate(k, neg);
    stencil.emplace_back(std::move(from), p);
  }

  Eigen::ArrayXd cur = Eigen::ArrayXd::Zero(n);
  cur[lat.site_of(Point{})] = 1.0;

  // Poisson(t) weights, rolling; stop when the remaining tail < tol.
  double weight = std::exp(-t);  // e^-t t^0 / 0!
  double cumulative = 0.0;
  out.probs += weight * cur;
  cumulative += weight;
  Eigen::ArrayXd next(n);
  for (int m = 1; 1.0 - cumulative >= tol; ++m) {
    if (m > 10'000'000) throw std::runtime_error("transition_row: series failed to converge");
    next.setZero();
    for (const auto& [from, p] : stencil)
      for (int k = 0; k < n; ++k) next[k] += p * cur[from[static_cast<std::size_t>(k)]];
    cur.swap(next);
    weight *= t / static_cast<double>(m);
    out.probs += weight * cur;
    cumulative += weight;
  }
  out.truncation_error = std::max(0.0, 1.0 - cumulative);
  return out;
}

CouplingKernel psi_sep(const JumpKernel& kernel, double t, int torus_side, double tol) {
  TransitionRow row = transition_row(kernel, t, torus_side, tol);
  CouplingKernel psi;
  psi.t = t;
  psi.lat = row.lat;
  psi.psi = std::move(row.probs);
  psi.se = Eigen::ArrayXd::Zero(psi.lat.size());
  psi.provenance = CouplingKernel::Provenance::ExactDuality;
  return psi;
}

double psi_l2_squared(const JumpKernel& kernel, double t, int torus_side, double tol) {
  const TransitionRow row = transition_row(kernel, t, torus_side, tol);
  const double direct = (row.probs * row.probs).sum();
  const double via_2t = transition_row(kernel, 2.0 * t, torus_side, tol).origin();
  if (std::fabs(direct - via_2t) > 2.0 * tol + 1e-12)
    throw std::runtime_error("psi_l2_squared: Chapman-Kolmogorov consistency failure");
  return direct;
}

double local_limit_prefactor(const JumpKernel& kernel) {
  kernel.validate();
  if (!kernel.symmetric())
    throw std::invalid_argument("local_limit_prefactor: kernel must be symmetric");
  const double theta = kernel.second_moment();
  const double d = kernel.dim;
  return 2.0 * std::pow(d / (2.0 * std::numbers::pi * theta), d / 2.0);
}

double CouplingKernel::lp_norm(double p) const {
  if (p < 1.0) throw std::invalid_argument("CouplingKernel::lp_norm: p must be >= 1");
  double s = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) s += std::pow(psi[i], p);
  return std::pow(s, 1.0 / p);
}

}  // namespace ips
