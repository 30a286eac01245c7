#include "ips/estimators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ips/parallel.hpp"
#include "ips/rng.hpp"

namespace ips {

Configuration ProductMeasureSpec::sample(const Lattice& lat, std::uint64_t seed) const {
  if (sampler) return sampler(lat, seed);
  if (rho <= 0.0 || rho >= 1.0)
    throw std::invalid_argument("ProductMeasureSpec: density must lie in (0,1)");
  Rng rng(seed);
  return Configuration::bernoulli(lat, rho, rng);
}

EstimateWithError estimate_stf(const Configuration& sigma, const LocalFunction& f,
                               const ProcessSpec& spec, double t, std::size_t n_inner,
                               std::uint64_t seed, int n_workers) {
  if (n_inner < 2) throw std::invalid_argument("estimate_stf: need n_inner >= 2");
  std::vector<double> values(n_inner);
  for_each_batch(n_inner, kDefaultBatches, n_workers, [&](int, std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      EventStream stream = EventStream::generate(spec, sigma.lattice(), t, substream_seed(seed, r));
      values[r] = f.eval(evolve(sigma, spec, t, stream));
    }
  });
  return batch_mean_estimate(values);
}

namespace {

// Inner means and inner sample variances for n_outer environments.
void nested_pass(const ProductMeasureSpec& mu, const Lattice& lat, const LocalFunction& f,
                 const ProcessSpec& spec, double t, std::size_t n_outer, std::size_t n_inner,
                 std::uint64_t seed, int n_workers, std::vector<double>& inner_mean,
                 std::vector<double>& inner_var) {
  inner_mean.assign(n_outer, 0.0);
  inner_var.assign(n_outer, 0.0);
  for_each_batch(n_outer, kDefaultBatches, n_workers, [&](int, std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const std::uint64_t outer_seed = substream_seed(seed, j);
      const Configuration sigma = mu.sample(lat, substream_seed(outer_seed, 0));
      double sum = 0.0, sumsq = 0.0;
      for (std::size_t r = 0; r < n_inner; ++r) {
        EventStream stream =
            EventStream::generate(spec, lat, t, substream_seed(outer_seed, 1 + r));
        const double v = f.eval(evolve(sigma, spec, t, stream));
        sum += v;
        sumsq += v * v;
      }
      const double m = sum / static_cast<double>(n_inner);
      inner_mean[j] = m;
      const double ss = sumsq - static_cast<double>(n_inner) * m * m;
      inner_var[j] = std::max(0.0, ss / static_cast<double>(n_inner - 1));
    }
  });
}

// Bias-corrected variance from inner means/variances over a replica range.
double nested_var_value(std::span<const double> means, std::span<const double> vars,
                        std::size_t begin, std::size_t end, std::size_t n_inner) {
  const std::size_t n = end - begin;
  if (n < 2) return 0.0;
  double s = 0.0;
  for (std::size_t j = begin; j < end; ++j) s += means[j];
  const double m = s / static_cast<double>(n);
  double ss = 0.0, vbar = 0.0;
  for (std::size_t j = begin; j < end; ++j) {
    ss += (means[j] - m) * (means[j] - m);
    vbar += vars[j];
  }
  const double var_of_means = ss / static_cast<double>(n - 1);
  const double noise = vbar / static_cast<double>(n) / static_cast<double>(n_inner);
  return var_of_means - noise;
}

}  // namespace

NestedVarianceEstimate estimate_var_stf(const ProductMeasureSpec& mu, const Lattice& lat,
                                        const LocalFunction& f, const ProcessSpec& spec, double t,
                                        std::size_t n_outer, std::size_t n_inner,
                                        std::uint64_t seed, int n_workers) {
  if (n_inner < 2) throw std::invalid_argument("estimate_var_stf: need n_inner >= 2");
  if (n_outer < 4) throw std::invalid_argument("estimate_var_stf: need n_outer >= 4");

  std::vector<double> means, vars;
  nested_pass(mu, lat, f, spec, t, n_outer, n_inner, seed, n_workers, means, vars);

  NestedVarianceEstimate out;
  const double raw = nested_var_value(means, vars, 0, n_outer, n_inner);
  out.var.n = n_outer;
  out.var.estimate = std::max(0.0, raw);
  out.var.flagged = raw < 0.0;
  out.grand_mean = mean(means);
  double sd = 0.0;
  for (double v : vars) sd += std::sqrt(v);
  out.mean_inner_sd = sd / static_cast<double>(n_outer);

  std::vector<double> batch_vals;
  for (int b = 0; b < kDefaultBatches; ++b) {
    const std::size_t begin = batch_begin(static_cast<std::size_t>(b), n_outer);
    const std::size_t end = b + 1 < kDefaultBatches
                                ? batch_begin(static_cast<std::size_t>(b + 1), n_outer)
                                : n_outer;
    if (end - begin >= 2) batch_vals.push_back(nested_var_value(means, vars, begin, end, n_inner));
  }
  out.var.se = batch_se(batch_vals);
  return out;
}

std::vector<PsiEstimate> estimate_psi_grid(const ProcessSpec& spec, const Lattice& lat,
                                           std::span<const double> times,
                                           const ProductMeasureSpec& env, std::size_t n,
                                           std::uint64_t seed, int n_workers) {
  if (times.empty()) throw std::invalid_argument("estimate_psi_grid: empty time grid");
  if (n < 2) throw std::invalid_argument("estimate_psi_grid: need n >= 2");
  if (!is_monotone_dynamics(spec) && !std::holds_alternative<AsepSpec>(spec))
    throw std::invalid_argument("estimate_psi_grid: spec must be monotone or ASEP");

  const int n_sites = lat.size();
  const std::size_t g_count = times.size();
  const int B = kDefaultBatches;
  const int origin = lat.site_of(Point{});
  const double horizon = times.back();

  // Per-batch, per-grid-time site counts and per-run discrepancy size sums.
  std::vector<std::vector<std::uint64_t>> counts(
      static_cast<std::size_t>(B) * g_count, std::vector<std::uint64_t>(static_cast<std::size_t>(n_sites), 0));
  std::vector<double> mass_sum(static_cast<std::size_t>(B) * g_count, 0.0);
  std::vector<std::size_t> batch_n(static_cast<std::size_t>(B), 0);

  for_each_batch(n, B, n_workers, [&](int b, std::size_t begin, std::size_t end) {
    batch_n[static_cast<std::size_t>(b)] = end - begin;
    for (std::size_t r = begin; r < end; ++r) {
      const std::uint64_t run_seed = substream_seed(seed, r);
      Configuration sigma = env.sample(lat, substream_seed(run_seed, 0));
      sigma.set(origin, 0);
      const Configuration flipped = flip(sigma, origin);
      EventSource source(spec, lat, horizon, substream_seed(run_seed, 1));
      evolve_coupled_observe(flipped, sigma, spec, times, source, [&](const CoupledSnapshot& snap) {
        if (snap.coalesced) return;
        auto& slot = counts[static_cast<std::size_t>(b) * g_count + snap.grid_index];
        int sz = 0;
        for (int k = 0; k < n_sites; ++k) {
          if (snap.first->at(k) != snap.second->at(k)) {
            ++slot[static_cast<std::size_t>(k)];
            ++sz;
          }
        }
        mass_sum[static_cast<std::size_t>(b) * g_count + snap.grid_index] += sz;
      });
    }
  });

  std::vector<PsiEstimate> out(g_count);
  const double dn = static_cast<double>(n);
  for (std::size_t g = 0; g < g_count; ++g) {
    PsiEstimate& pe = out[g];
    pe.runs = n;
    pe.kernel.t = times[g];
    pe.kernel.lat = lat;
    pe.kernel.provenance = CouplingKernel::Provenance::MonteCarlo;
    pe.kernel.psi = Eigen::ArrayXd::Zero(n_sites);
    pe.kernel.se = Eigen::ArrayXd::Zero(n_sites);

    std::vector<std::uint64_t> total(static_cast<std::size_t>(n_sites), 0);
    for (int b = 0; b < B; ++b) {
      const auto& slot = counts[static_cast<std::size_t>(b) * g_count + g];
      for (int k = 0; k < n_sites; ++k) total[static_cast<std::size_t>(k)] += slot[static_cast<std::size_t>(k)];
    }
    for (int k = 0; k < n_sites; ++k)
      pe.kernel.psi[k] = static_cast<double>(total[static_cast<std::size_t>(k)]) / dn;

    // per-site SE from batch fractions
    std::vector<double> fracs;
    fracs.reserve(static_cast<std::size_t>(B));
    for (int k = 0; k < n_sites; ++k) {
      fracs.clear();
      for (int b = 0; b < B; ++b) {
        if (batch_n[static_cast<std::size_t>(b)] == 0) continue;
        const auto& slot = counts[static_cast<std::size_t>(b) * g_count + g];
        fracs.push_back(static_cast<double>(slot[static_cast<std::size_t>(k)]) /
                        static_cast<double>(batch_n[static_cast<std::size_t>(b)]));
      }
      pe.kernel.se[k] = batch_se(fracs);
    }

    // unbiased l2: sum_k (S^2 - S) / (n (n-1)), with per-batch values for SE
    double u_global = 0.0;
    for (int k = 0; k < n_sites; ++k) {
      const double s = static_cast<double>(total[static_cast<std::size_t>(k)]);
      u_global += s * s - s;
    }
    u_global /= dn * (dn - 1.0);
    std::vector<double> u_batches;
    for (int b = 0; b < B; ++b) {
      const double nb = static_cast<double>(batch_n[static_cast<std::size_t>(b)]);
      if (nb < 2) continue;
      const auto& slot = counts[static_cast<std::size_t>(b) * g_count + g];
      double u = 0.0;
      for (int k = 0; k < n_sites; ++k) {
        const double s = static_cast<double>(slot[static_cast<std::size_t>(k)]);
        u += s * s - s;
      }
      u_batches.push_back(u / (nb * (nb - 1.0)));
    }
    pe.l2_squared.estimate = u_global;
    pe.l2_squared.se = batch_se(u_batches);
    pe.l2_squared.n = n;

    // total discrepancy mass
    std::vector<double> sums;
    std::vector<std::size_t> cnts;
    for (int b = 0; b < B; ++b) {
      sums.push_back(mass_sum[static_cast<std::size_t>(b) * g_count + g]);
      cnts.push_back(batch_n[static_cast<std::size_t>(b)]);
    }
    pe.total_mass = from_batch_sums(sums, cnts);

    // max entry with the argmax SE
    int argmax = 0;
    for (int k = 1; k < n_sites; ++k)
      if (pe.kernel.psi[k] > pe.kernel.psi[argmax]) argmax = k;
    pe.max_entry.estimate = pe.kernel.psi[argmax];
    pe.max_entry.se = pe.kernel.se[argmax];
    pe.max_entry.n = n;
  }
  return out;
}

PsiEstimate estimate_psi(const ProcessSpec& spec, const Lattice& lat, double t,
                         const ProductMeasureSpec& env, std::size_t n, std::uint64_t seed,
                         int n_workers) {
  const double times[] = {t};
  return estimate_psi_grid(spec, lat, times, env, n, seed, n_workers).front();
}

PsiAsepEstimate estimate_Psi_asep(double rho, const AsepSpec& spec, const Lattice& lat, double t,
                                  long k_min, long k_max, std::size_t n_env, std::size_t n_rep,
                                  std::uint64_t seed, int n_workers) {
  if (n_rep < 2) throw std::invalid_argument("estimate_Psi_asep: need n_rep >= 2");
  if (n_env < 1) throw std::invalid_argument("estimate_Psi_asep: need n_env >= 1");
  if (k_min > k_max) throw std::invalid_argument("estimate_Psi_asep: bad offset range");

  const std::size_t width = static_cast<std::size_t>(k_max - k_min + 1);
  const int B = kDefaultBatches;
  const int origin = lat.site_of(Point{});

  // Per-batch sums of the per-environment unbiased pair rates.
  std::vector<std::vector<double>> pair_sum(static_cast<std::size_t>(B),
                                            std::vector<double>(width, 0.0));
  std::vector<double> l2_sum(static_cast<std::size_t>(B), 0.0);
  std::vector<std::size_t> batch_n(static_cast<std::size_t>(B), 0);

  const double denom = static_cast<double>(n_rep) * static_cast<double>(n_rep - 1);
  for_each_batch(n_env, B, n_workers, [&](int b, std::size_t begin, std::size_t end) {
    batch_n[static_cast<std::size_t>(b)] = end - begin;
    std::vector<std::uint32_t> hits(width);
    for (std::size_t e = begin; e < end; ++e) {
      const std::uint64_t env_seed = substream_seed(seed, e);
      Rng env_rng(substream_seed(env_seed, 0));
      const Configuration sigma = Configuration::bernoulli(lat, rho, env_rng);
      std::fill(hits.begin(), hits.end(), 0);
      for (std::size_t r = 0; r < n_rep; ++r) {
        EventStream stream =
            EventStream::generate(ProcessSpec{spec}, lat, t, substream_seed(env_seed, 1 + r));
        const long x = track_second_class(sigma, origin, spec, t, stream).displacement;
        if (x >= k_min && x <= k_max) ++hits[static_cast<std::size_t>(x - k_min)];
      }
      double l2 = 0.0;
      for (std::size_t k = 0; k < width; ++k) {
        const double c = hits[k];
        const double pairs = (c * c - c) / denom;
        pair_sum[static_cast<std::size_t>(b)][k] += pairs;
        l2 += pairs;
      }
      l2_sum[static_cast<std::size_t>(b)] += l2;
    }
  });

  PsiAsepEstimate out;
  out.t = t;
  out.k_min = k_min;
  out.psi.assign(width, 0.0);
  out.se.assign(width, 0.0);
  const double dn = static_cast<double>(n_env);
  std::vector<double> batch_vals;
  for (std::size_t k = 0; k < width; ++k) {
    double total = 0.0;
    for (int b = 0; b < B; ++b) total += pair_sum[static_cast<std::size_t>(b)][k];
    const double sq = total / dn;  // estimate of Psi_t(k)^2
    batch_vals.clear();
    for (int b = 0; b < B; ++b) {
      if (batch_n[static_cast<std::size_t>(b)] == 0) continue;
      batch_vals.push_back(pair_sum[static_cast<std::size_t>(b)][k] /
                           static_cast<double>(batch_n[static_cast<std::size_t>(b)]));
    }
    const double sq_se = batch_se(batch_vals);
    const double root = std::sqrt(std::max(0.0, sq));
    out.psi[k] = root;
    out.se[k] = root > 0.0 ? sq_se / (2.0 * root) : std::sqrt(sq_se);
  }
  std::vector<std::size_t> cnts(batch_n.begin(), batch_n.end());
  out.l2_squared = from_batch_sums(l2_sum, cnts);
  return out;
}

StructureFunctionEstimate estimate_structure_function(double rho, const AsepSpec& spec,
                                                      const Lattice& lat, double t, long k_min,
                                                      long k_max, std::size_t n,
                                                      std::uint64_t seed, int n_workers) {
  if (rho <= 0.0 || rho >= 1.0)
    throw std::invalid_argument("estimate_structure_function: density must lie in (0,1)");
  if (k_min > k_max) throw std::invalid_argument("estimate_structure_function: bad offset range");
  const std::size_t width = static_cast<std::size_t>(k_max - k_min + 1);
  const int B = kDefaultBatches;
  const int origin = lat.site_of(Point{});
  const double norm = rho * (1.0 - rho);

  std::vector<std::vector<double>> sums(static_cast<std::size_t>(B), std::vector<double>(width, 0.0));
  std::vector<double> rule_sum(static_cast<std::size_t>(B), 0.0);
  std::vector<std::size_t> batch_n(static_cast<std::size_t>(B), 0);

  std::vector<int> site_of_offset(width);
  for (std::size_t k = 0; k < width; ++k)
    site_of_offset[k] = lat.site_of(make_point({static_cast<int>(k_min + static_cast<long>(k))}));

  for_each_batch(n, B, n_workers, [&](int b, std::size_t begin, std::size_t end) {
    batch_n[static_cast<std::size_t>(b)] = end - begin;
    for (std::size_t r = begin; r < end; ++r) {
      const std::uint64_t run_seed = substream_seed(seed, r);
      Rng env_rng(substream_seed(run_seed, 0));
      const Configuration sigma0 = Configuration::bernoulli(lat, rho, env_rng);
      EventStream stream =
          EventStream::generate(ProcessSpec{spec}, lat, t, substream_seed(run_seed, 1));
      const Configuration sigma_t = evolve(sigma0, ProcessSpec{spec}, t, stream);
      const double w = (sigma0.at(origin) - rho) / norm;
      for (std::size_t k = 0; k < width; ++k)
        sums[static_cast<std::size_t>(b)][k] += (sigma_t.at(site_of_offset[k]) - rho) * w;
      rule_sum[static_cast<std::size_t>(b)] +=
          (static_cast<double>(sigma_t.occupied_count()) - rho * lat.size()) * w;
    }
  });

  StructureFunctionEstimate out;
  out.t = t;
  out.k_min = k_min;
  out.s.assign(width, 0.0);
  out.se.assign(width, 0.0);
  std::vector<double> batch_vals;
  for (std::size_t k = 0; k < width; ++k) {
    double total = 0.0;
    batch_vals.clear();
    for (int b = 0; b < B; ++b) {
      total += sums[static_cast<std::size_t>(b)][k];
      if (batch_n[static_cast<std::size_t>(b)] > 0)
        batch_vals.push_back(sums[static_cast<std::size_t>(b)][k] /
                             static_cast<double>(batch_n[static_cast<std::size_t>(b)]));
    }
    out.s[k] = total / static_cast<double>(n);
    out.se[k] = batch_se(batch_vals);
  }
  std::vector<std::size_t> cnts(batch_n.begin(), batch_n.end());
  out.sum_rule = from_batch_sums(rule_sum, cnts);
  return out;
}

EstimateWithError estimate_structure_function(double rho, const AsepSpec& spec, const Lattice& lat,
                                              double t, long k, std::size_t n,
                                              std::uint64_t seed) {
  const StructureFunctionEstimate prof =
      estimate_structure_function(rho, spec, lat, t, k, k, n, seed, 1);
  EstimateWithError out;
  out.estimate = prof.s_at(k);
  out.se = prof.se_at(k);
  out.n = n;
  return out;
}

std::vector<DeviationEstimate> empirical_deviation_grid(
    const ProductMeasureSpec& mu, const Lattice& lat, const LocalFunction& f,
    const ProcessSpec& spec, double t, std::span<const double> levels, std::size_t n_outer,
    std::size_t n_inner, std::uint64_t seed, int n_workers) {
  if (levels.empty()) throw std::invalid_argument("empirical_deviation: no levels");
  std::vector<double> means, vars;
  nested_pass(mu, lat, f, spec, t, n_outer, n_inner, seed, n_workers, means, vars);

  const double grand = mean(means);
  double sd = 0.0;
  for (double v : vars) sd += std::sqrt(v);
  const double inner_se = sd / static_cast<double>(n_outer) / std::sqrt(static_cast<double>(n_inner));

  std::vector<DeviationEstimate> out;
  out.reserve(levels.size());
  std::vector<double> indicator(n_outer);
  for (double a : levels) {
    if (a < 0.0) throw std::invalid_argument("empirical_deviation: negative level");
    for (std::size_t j = 0; j < n_outer; ++j)
      indicator[j] = std::fabs(means[j] - grand) >= a ? 1.0 : 0.0;
    DeviationEstimate de;
    de.a = a;
    de.fraction = batch_mean_estimate(indicator);
    de.grand_mean = grand;
    de.mean_inner_se = inner_se;
    out.push_back(de);
  }
  return out;
}

DeviationEstimate empirical_deviation(const ProductMeasureSpec& mu, const Lattice& lat,
                                      const LocalFunction& f, const ProcessSpec& spec, double t,
                                      double a, std::size_t n_outer, std::size_t n_inner,
                                      std::uint64_t seed, int n_workers) {
  const double levels[] = {a};
  return empirical_deviation_grid(mu, lat, f, spec, t, levels, n_outer, n_inner, seed, n_workers)
      .front();
}

FitResult fit_decay(std::span<const FitPoint> points, DecayModel model) {
  if (points.size() < 4) throw std::invalid_argument("fit_decay: need at least 4 points");
  bool weighted = true;
  for (const FitPoint& p : points) {
    if (p.value <= 0.0) throw std::invalid_argument("fit_decay: values must be positive");
    if (p.t <= 0.0 && model == DecayModel::Power)
      throw std::invalid_argument("fit_decay: power fit needs positive times");
    if (p.se <= 0.0) weighted = false;
  }

  const std::size_t n = points.size();
  Eigen::VectorXd w(n), x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[static_cast<Eigen::Index>(i)] =
        model == DecayModel::Power ? std::log(points[i].t) : points[i].t;
    y[static_cast<Eigen::Index>(i)] = std::log(points[i].value);
    const double se_log = weighted ? points[i].se / points[i].value : 1.0;
    w[static_cast<Eigen::Index>(i)] = 1.0 / (se_log * se_log);
  }
  const double sw = w.sum();
  const double xbar = (w.array() * x.array()).sum() / sw;
  const double ybar = (w.array() * y.array()).sum() / sw;
  double sxx = 0.0, sxy = 0.0;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
  }
  if (sxx <= 0.0) throw std::invalid_argument("fit_decay: degenerate abscissae");
  const double slope = sxy / sxx;
  const double intercept = ybar - slope * xbar;

  double slope_var;
  if (weighted) {
    slope_var = 1.0 / sxx;  // known-variance weighted LS
  } else {
    double rss = 0.0;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
      const double r = y[i] - intercept - slope * x[i];
      rss += r * r;
    }
    slope_var = n > 2 ? rss / static_cast<double>(n - 2) / sxx : 0.0;
  }

  FitResult out;
  out.rate_or_exponent = model == DecayModel::Power ? slope : -slope;
  out.se = std::sqrt(std::max(0.0, slope_var));
  out.log_prefactor = intercept;
  return out;
}

}  // namespace ips
