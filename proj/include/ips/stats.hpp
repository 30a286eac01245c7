#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ips {

// Point estimate with a standard error, as produced by the Monte Carlo
// estimators (batch means over replicas).
struct EstimateWithError {
  double estimate = 0.0;
  double se = 0.0;
  std::size_t n = 0;
  bool flagged = false;
};

inline constexpr int kDefaultBatches = 32;

double mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);  // divisor n-1

// Which batch replica `r` of `n` falls into; contiguous ranges, fixed
// independently of worker count.
std::size_t batch_of(std::size_t replica, std::size_t n, int n_batches = kDefaultBatches);
std::size_t batch_begin(std::size_t batch, std::size_t n, int n_batches = kDefaultBatches);

// Mean with batch-means standard error.
EstimateWithError batch_mean_estimate(std::span<const double> values,
                                      int n_batches = kDefaultBatches);

// Estimate from precomputed per-batch sums/counts (the deterministic
// reduction path used by the parallel estimators).
EstimateWithError from_batch_sums(std::span<const double> batch_sums,
                                  std::span<const std::size_t> batch_counts);

// Standard error of a statistic given its per-batch values (each batch value
// an independent estimate of the same quantity).
double batch_se(std::span<const double> batch_values);

// Regularized incomplete gamma functions P(a,x), Q(a,x) and the chi-squared
// upper-tail p-value Q(dof/2, stat/2).
double gamma_p(double a, double x);
double gamma_q(double a, double x);
double chi_squared_pvalue(double stat, int dof);

}  // namespace ips
