#pragma once

#include <Eigen/Core>
#include <functional>
#include <span>
#include <vector>

#include "ips/coupling_kernel.hpp"
#include "ips/dynamics.hpp"
#include "ips/local_function.hpp"
#include "ips/process.hpp"
#include "ips/stats.hpp"

namespace ips {

// Initial law of the environment: Bernoulli nu_rho, or an explicit sampler
// (e.g. a Gibbs chain sampler) overriding it.
struct ProductMeasureSpec {
  double rho = 0.5;
  std::function<Configuration(const Lattice&, std::uint64_t seed)> sampler;

  Configuration sample(const Lattice& lat, std::uint64_t seed) const;
};

// Inner-replica estimate of S_t f(sigma) = E_sigma f(eta_t).
EstimateWithError estimate_stf(const Configuration& sigma, const LocalFunction& f,
                               const ProcessSpec& spec, double t, std::size_t n_inner,
                               std::uint64_t seed, int n_workers = 1);

// Unbiased nested variance estimator of Var_mu(S_t f): sample variance of
// inner means minus (mean inner sample variance)/n_inner; negative corrected
// estimates clamp to zero with the flag set.
struct NestedVarianceEstimate {
  EstimateWithError var;
  double grand_mean = 0.0;
  double mean_inner_sd = 0.0;  // average sd of one inner replicate
};
NestedVarianceEstimate estimate_var_stf(const ProductMeasureSpec& mu, const Lattice& lat,
                                        const LocalFunction& f, const ProcessSpec& spec, double t,
                                        std::size_t n_outer, std::size_t n_inner,
                                        std::uint64_t seed, int n_workers = 1);

// Coupled-run estimate of psi_t: fraction of runs whose discrepancy set
// contains each site, from (sigma with flip at origin, sigma) pairs with
// sigma ~ env. l2_squared is the unbiased across-run U-statistic
// sum_k (S_k^2 - S_k) / (n(n-1)).
struct PsiEstimate {
  CouplingKernel kernel;
  EstimateWithError l2_squared;
  EstimateWithError total_mass;
  EstimateWithError max_entry;  // max_k psi-hat(k), SE taken at the argmax
  std::size_t runs = 0;
};
std::vector<PsiEstimate> estimate_psi_grid(const ProcessSpec& spec, const Lattice& lat,
                                           std::span<const double> times,
                                           const ProductMeasureSpec& env, std::size_t n,
                                           std::uint64_t seed, int n_workers = 1);
PsiEstimate estimate_psi(const ProcessSpec& spec, const Lattice& lat, double t,
                         const ProductMeasureSpec& env, std::size_t n, std::uint64_t seed,
                         int n_workers = 1);

// ASEP second-class moment profile Psi_t(k): per environment, P(X_t = k)^2
// estimated unbiasedly by ordered-pair counting over n_rep independent runs,
// averaged over n_env environments; square root with delta-method errors.
// Offsets are unwrapped displacements in [k_min, k_max].
struct PsiAsepEstimate {
  double t = 0.0;
  long k_min = 0;
  std::vector<double> psi;  // Psi-hat(k)
  std::vector<double> se;
  EstimateWithError l2_squared;  // sum_k Psi_t(k)^2
  double psi_at(long k) const { return psi[static_cast<std::size_t>(k - k_min)]; }
  double se_at(long k) const { return se[static_cast<std::size_t>(k - k_min)]; }
};
PsiAsepEstimate estimate_Psi_asep(double rho, const AsepSpec& spec, const Lattice& lat, double t,
                                  long k_min, long k_max, std::size_t n_env, std::size_t n_rep,
                                  std::uint64_t seed, int n_workers = 1);

// Stationary-start two-point function S(k,t) of the exclusion process,
// normalized by rho(1-rho); sum_rule estimates sum_k S(k,t) (= 1 exactly by
// particle conservation).
struct StructureFunctionEstimate {
  double t = 0.0;
  long k_min = 0;
  std::vector<double> s;
  std::vector<double> se;
  EstimateWithError sum_rule;
  double s_at(long k) const { return s[static_cast<std::size_t>(k - k_min)]; }
  double se_at(long k) const { return se[static_cast<std::size_t>(k - k_min)]; }
};
StructureFunctionEstimate estimate_structure_function(double rho, const AsepSpec& spec,
                                                      const Lattice& lat, double t, long k_min,
                                                      long k_max, std::size_t n,
                                                      std::uint64_t seed, int n_workers = 1);
EstimateWithError estimate_structure_function(double rho, const AsepSpec& spec, const Lattice& lat,
                                              double t, long k, std::size_t n, std::uint64_t seed);

// Empirical tail of |S_t f - mean| at one or more levels, with the mean
// inner noise reported for bound inflation.
struct DeviationEstimate {
  double a = 0.0;
  EstimateWithError fraction;
  double grand_mean = 0.0;
  double mean_inner_se = 0.0;
};
std::vector<DeviationEstimate> empirical_deviation_grid(
    const ProductMeasureSpec& mu, const Lattice& lat, const LocalFunction& f,
    const ProcessSpec& spec, double t, std::span<const double> levels, std::size_t n_outer,
    std::size_t n_inner, std::uint64_t seed, int n_workers = 1);
DeviationEstimate empirical_deviation(const ProductMeasureSpec& mu, const Lattice& lat,
                                      const LocalFunction& f, const ProcessSpec& spec, double t,
                                      double a, std::size_t n_outer, std::size_t n_inner,
                                      std::uint64_t seed, int n_workers = 1);

// Weighted least squares on log values.
enum class DecayModel { Power, Exponential };
struct FitPoint {
  double t;
  double value;
  double se;
};
struct FitResult {
  double rate_or_exponent = 0.0;  // exponent (signed) for Power, decay rate for Exponential
  double se = 0.0;
  double log_prefactor = 0.0;
};
FitResult fit_decay(std::span<const FitPoint> points, DecayModel model);

}  // namespace ips
