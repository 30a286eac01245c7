#include "ips/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ips {

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(n - 1);
}

std::size_t batch_of(std::size_t replica, std::size_t n, int n_batches) {
  if (n == 0) return 0;
  const std::size_t b = static_cast<std::size_t>(n_batches);
  return (replica * b) / n;
}

std::size_t batch_begin(std::size_t batch, std::size_t n, int n_batches) {
  const std::size_t b = static_cast<std::size_t>(n_batches);
  // first replica r with r*b >= batch*n, i.e. ceil(batch*n / b)
  return (batch * n + b - 1) / b;
}

double batch_se(std::span<const double> batch_values) {
  const std::size_t b = batch_values.size();
  if (b < 2) return 0.0;
  return std::sqrt(sample_variance(batch_values) / static_cast<double>(b));
}

EstimateWithError batch_mean_estimate(std::span<const double> values, int n_batches) {
  const std::size_t n = values.size();
  EstimateWithError out;
  out.n = n;
  if (n == 0) return out;
  const int b = static_cast<int>(std::min<std::size_t>(n, static_cast<std::size_t>(n_batches)));
  std::vector<double> sums(b, 0.0);
  std::vector<std::size_t> counts(b, 0);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t k = batch_of(r, n, b);
    sums[k] += values[r];
    ++counts[k];
  }
  return from_batch_sums(sums, counts);
}

EstimateWithError from_batch_sums(std::span<const double> batch_sums,
                                  std::span<const std::size_t> batch_counts) {
  if (batch_sums.size() != batch_counts.size())
    throw std::invalid_argument("from_batch_sums: size mismatch");
  EstimateWithError out;
  double total = 0.0;
  std::size_t n = 0;
  std::vector<double> batch_means;
  batch_means.reserve(batch_sums.size());
  for (std::size_t k = 0; k < batch_sums.size(); ++k) {
    total += batch_sums[k];
    n += batch_counts[k];
    if (batch_counts[k] > 0)
      batch_means.push_back(batch_sums[k] / static_cast<double>(batch_counts[k]));
  }
  out.n = n;
  if (n == 0) return out;
  out.estimate = total / static_cast<double>(n);
  out.se = batch_se(batch_means);
  return out;
}

namespace {

// Lower regularized incomplete gamma by series, valid for x < a+1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized incomplete gamma by Lentz continued fraction, x >= a+1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_p: need a>0, x>=0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_q: need a>0, x>=0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_squared_pvalue(double stat, int dof) {
  if (dof <= 0) throw std::invalid_argument("chi_squared_pvalue: dof must be positive");
  if (stat <= 0.0) return 1.0;
  return gamma_q(0.5 * static_cast<double>(dof), 0.5 * stat);
}

}  // namespace ips
