#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "ips/interaction.hpp"
#include "ips/local_function.hpp"
#include "ips/rng.hpp"
#include "ips/stats.hpp"

namespace ips {

// Fixed spins adjacent to a volume, nearest-first; fewer than `range`
// entries means free boundary beyond them.
struct BoundaryCondition {
  std::vector<std::uint8_t> left;
  std::vector<std::uint8_t> right;

  static BoundaryCondition free_boundary() { return {}; }
  static BoundaryCondition uniform(int range, std::uint8_t left_spin, std::uint8_t right_spin);
};

// Finite-volume Gibbs measure of a truncated-range 1d Ising interaction on
// positions 0..n-1 with boundary condition collars. Construction runs one
// backward transfer sweep over the 2^range window states, after which exact
// sequential sampling and marginalized conditionals are table lookups.
class GibbsVolume {
 public:
  GibbsVolume(Interaction inter, int n, BoundaryCondition bc);

  const Interaction& interaction() const { return inter_; }
  int size() const { return n_; }
  int range() const { return inter_.range; }
  const BoundaryCondition& boundary() const { return bc_; }

  // Direct Hamiltonian sum over pairs meeting the volume (independent of
  // the transfer tables).
  double hamiltonian(std::span<const std::uint8_t> sigma) const;

  double log_partition() const { return log_z_; }

  // mu(sigma_i = 1 | full context + boundary), 1/(1+e^{Delta H}).
  double conditional_prob(int i, std::span<const std::uint8_t> context) const;

  // H(context with i flipped) - H(context): the flip energy difference.
  double flip_energy(int i, std::span<const std::uint8_t> context) const;

  // mu(sigma_i = 1 | sigma_{<i} = history, right tail marginalized).
  double sequential_conditional(int i, std::span<const std::uint8_t> history) const;

  // Exact sequential sample of the full volume.
  std::vector<std::uint8_t> sample(Rng& rng) const;

  // Volume on positions 1..n-1 (relabeled 0..n-2) given sigma_0 = s.
  GibbsVolume conditioned_on_first(std::uint8_t s) const;

  // Exact Boltzmann distribution over all 2^n configurations (n <= 24),
  // indexed with position 0 as the most significant bit.
  std::vector<double> boltzmann_distribution() const;

 private:
  double pair_energy_into_site(int i, std::uint32_t window, std::uint8_t s) const;
  double right_boundary_energy(std::uint32_t window) const;
  std::uint32_t initial_window() const;

  Interaction inter_;
  int n_;
  BoundaryCondition bc_;
  std::uint32_t mask_;
  std::vector<double> suffix_logz_;  // (n+1) x 2^range, row-major by position
  std::vector<double> cond_p1_;      // n x 2^range: P(sigma_i = 1 | window)
  double log_z_ = 0.0;
};

// Optimal coupling of two Bernoulli laws: masses on (1,1),(1,0),(0,1),(0,0).
struct TwoPointCoupling {
  double both_one;
  double first_only;
  double second_only;
  double neither;
  double mismatch() const { return first_only + second_only; }
};
TwoPointCoupling optimal_two_point_coupling(double p, double q);

// House-of-cards coupling of the two conditional measures given histories
// (sigma_{<i} flip(sigma_i)) and (sigma_{<i} sigma_i): sequential optimal
// coupling of the single-site conditionals, one shared uniform per site.
struct HocCoupleResult {
  std::vector<std::uint8_t> tail_flipped;  // tail of the flipped-history copy
  std::vector<std::uint8_t> tail_kept;
  int first_match_offset = 0;  // smallest j>=1 with equal symbols at i+j; 0 if none
};
HocCoupleResult house_of_cards_couple(const GibbsVolume& vol, int i,
                                      std::span<const std::uint8_t> sigma_upto_i, Rng& rng);

// Coupled mismatch frequencies at offsets 1..j_max, maximized over a stress
// set of histories (all-plus, all-minus, alternating) plus random Gibbs
// histories, with the flip site centered.
struct ThetaProfile {
  int i_center = 0;
  Eigen::ArrayXd theta;  // index j-1 for offset j
  Eigen::ArrayXd se;
  double at(int j) const { return theta[j - 1]; }
  double se_at(int j) const { return se[j - 1]; }
  int j_max() const { return static_cast<int>(theta.size()); }
};
ThetaProfile estimate_theta(const GibbsVolume& vol, int j_max, std::size_t n_runs,
                            std::size_t n_gibbs_histories, std::uint64_t seed);

// House-of-cards chain: P(Z_{l+1} = m+1 | Z_l = m) = 1 - gamma_m, reset to 0
// otherwise. Exact return probabilities P(Z_l = 0) for l = 0..horizon.
struct HocChain {
  std::vector<double> gamma;
  Eigen::ArrayXd p_zero;  // index l
  int horizon() const { return static_cast<int>(p_zero.size()) - 1; }
  // sum_{l >= k, l <= horizon} P(Z_l = 0)
  double return_tail(int k) const;
};
HocChain hoc_return_probs(std::span<const double> gamma, int horizon);

// gamma sequence gamma_m = min(1, exp(T(max(m,1))) - 1) for m = 0..horizon.
std::vector<double> gamma_sequence(const Interaction& inter, int horizon);

// sum_j Theta(j)^{1/q} over the measured range plus a chain-dominated tail.
struct ThetaSummability {
  double measured_part = 0.0;
  double tail_part = 0.0;
  bool tail_flagged = false;  // tail extrapolation divergent or unavailable
  double value() const { return measured_part + tail_part; }
};
ThetaSummability theta_summability(const ThetaProfile& profile, double q,
                                   const HocChain* chain = nullptr);

// Quadratic form sum_i int (grad_i f)^2 dmu, Monte Carlo over volume samples
// or exact by enumeration.
EstimateWithError dirichlet_form(const LocalFunction& f, const GibbsVolume& vol, std::size_t n,
                                 std::uint64_t seed);
double dirichlet_form_exact(const LocalFunction& f, const GibbsVolume& vol);

// Var_mu(f) / E(f,f), flagged when the Dirichlet estimate is within 5 SE of
// zero.
struct PoincareEstimate {
  EstimateWithError ratio;
  EstimateWithError variance;
  EstimateWithError dirichlet;
  bool flagged = false;
};
PoincareEstimate poincare_ratio(const LocalFunction& f, const GibbsVolume& vol, std::size_t n,
                                std::uint64_t seed);
double poincare_ratio_exact(const LocalFunction& f, const GibbsVolume& vol);
double variance_exact(const LocalFunction& f, const GibbsVolume& vol);

// Dobrushin sensitivity row C_{0j}, |j| <= range, by exact enumeration of
// the neighbor patterns.
struct DobrushinMatrix {
  int range = 0;
  Eigen::ArrayXd row;  // index j + range for offset j
  double at(int j) const { return row[j + range]; }
  double norm_inf() const { return row.sum(); }
};
DobrushinMatrix dobrushin_matrix(const Interaction& inter);

// Row l2 norm of e^{-t(I-C)}; requires ||C||_inf < 1.
double glauber_decay_bound(const DobrushinMatrix& c, double t);

}  // namespace ips
