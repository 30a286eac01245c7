#include "ips/gibbs1d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ips {

namespace {

inline double spin(std::uint8_t b) { return 2.0 * static_cast<double>(b) - 1.0; }

inline double logsumexp2(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

}  // namespace

BoundaryCondition BoundaryCondition::uniform(int range, std::uint8_t left_spin,
                                             std::uint8_t right_spin) {
  BoundaryCondition bc;
  bc.left.assign(static_cast<std::size_t>(range), left_spin);
  bc.right.assign(static_cast<std::size_t>(range), right_spin);
  return bc;
}

GibbsVolume::GibbsVolume(Interaction inter, int n, BoundaryCondition bc)
    : inter_(std::move(inter)), n_(n), bc_(std::move(bc)) {
  inter_.validate();
  if (n_ < 1) throw std::invalid_argument("GibbsVolume: empty volume");
  if (static_cast<int>(bc_.left.size()) > inter_.range ||
      static_cast<int>(bc_.right.size()) > inter_.range)
    throw std::invalid_argument("GibbsVolume: collar wider than the interaction range");
  const int r = inter_.range;
  if (r > 22 || (static_cast<long long>(n_) + 1) * (1LL << r) > (1LL << 23))
    throw std::runtime_error(
        "GibbsVolume: n * 2^range exceeds the transfer budget; reduce the truncation range");
  mask_ = (1u << r) - 1u;

  const std::size_t width = std::size_t{1} << r;
  suffix_logz_.assign(static_cast<std::size_t>(n_ + 1) * width, 0.0);
  for (std::uint32_t w = 0; w < width; ++w)
    suffix_logz_[static_cast<std::size_t>(n_) * width + w] = -right_boundary_energy(w);
  cond_p1_.assign(static_cast<std::size_t>(n_) * width, 0.0);
  for (int i = n_ - 1; i >= 0; --i) {
    for (std::uint32_t w = 0; w < width; ++w) {
      const std::uint32_t w0 = (w << 1) & mask_;
      const double a0 = -pair_energy_into_site(i, w, 0) +
                        suffix_logz_[static_cast<std::size_t>(i + 1) * width + w0];
      const double a1 = -pair_energy_into_site(i, w, 1) +
                        suffix_logz_[static_cast<std::size_t>(i + 1) * width + (w0 | 1u)];
      const double lse = logsumexp2(a0, a1);
      suffix_logz_[static_cast<std::size_t>(i) * width + w] = lse;
      cond_p1_[static_cast<std::size_t>(i) * width + w] = std::exp(a1 - lse);
    }
  }
  log_z_ = suffix_logz_[initial_window()];
}

double GibbsVolume::pair_energy_into_site(int i, std::uint32_t window, std::uint8_t s) const {
  double e = 0.0;
  const double si = spin(s);
  for (int r = 1; r <= inter_.range; ++r) {
    const int p = i - r;
    double sp;
    if (p >= 0) {
      sp = spin((window >> (r - 1)) & 1u);
    } else {
      const std::size_t c = static_cast<std::size_t>(-p - 1);
      if (c >= bc_.left.size()) continue;
      sp = spin(bc_.left[c]);
    }
    e -= inter_.coupling(r) * sp * si;
  }
  return e;
}

double GibbsVolume::right_boundary_energy(std::uint32_t window) const {
  double e = 0.0;
  for (std::size_t c = 0; c < bc_.right.size(); ++c) {
    const double sc = spin(bc_.right[c]);
    for (int r = 1; r <= inter_.range; ++r) {
      const int p = n_ + static_cast<int>(c) - r;
      if (p < 0 || p >= n_) continue;  // pairs not meeting the volume
      const int rw = n_ - p;           // window bit index + 1
      if (rw < 1 || rw > inter_.range) continue;
      e -= inter_.coupling(r) * sc * spin((window >> (rw - 1)) & 1u);
    }
  }
  return e;
}

std::uint32_t GibbsVolume::initial_window() const {
  std::uint32_t w = 0;
  for (std::size_t c = 0; c < bc_.left.size(); ++c)
    if (bc_.left[c]) w |= 1u << c;
  return w;
}

double GibbsVolume::hamiltonian(std::span<const std::uint8_t> sigma) const {
  if (static_cast<int>(sigma.size()) != n_)
    throw std::invalid_argument("hamiltonian: configuration size mismatch");
  double h = 0.0;
  for (int i = 0; i < n_; ++i) {
    const double si = spin(sigma[static_cast<std::size_t>(i)]);
    for (int r = 1; r <= inter_.range && i + r < n_; ++r)
      h -= inter_.coupling(r) * si * spin(sigma[static_cast<std::size_t>(i + r)]);
    for (std::size_t c = 0; c < bc_.left.size(); ++c) {
      const int d = i + 1 + static_cast<int>(c);
      if (d <= inter_.range) h -= inter_.coupling(d) * si * spin(bc_.left[c]);
    }
    for (std::size_t c = 0; c < bc_.right.size(); ++c) {
      const int d = n_ + static_cast<int>(c) - i;
      if (d <= inter_.range) h -= inter_.coupling(d) * si * spin(bc_.right[c]);
    }
  }
  return h;
}

double GibbsVolume::flip_energy(int i, std::span<const std::uint8_t> context) const {
  if (i < 0 || i >= n_) throw std::invalid_argument("flip_energy: site outside the volume");
  double field = 0.0;
  for (int r = 1; r <= inter_.range; ++r) {
    for (int sgn : {-1, 1}) {
      const int p = i + sgn * r;
      double sp;
      if (p >= 0 && p < n_) {
        sp = spin(context[static_cast<std::size_t>(p)]);
      } else if (p < 0) {
        const std::size_t c = static_cast<std::size_t>(-p - 1);
        if (c >= bc_.left.size()) continue;
        sp = spin(bc_.left[c]);
      } else {
        const std::size_t c = static_cast<std::size_t>(p - n_);
        if (c >= bc_.right.size()) continue;
        sp = spin(bc_.right[c]);
      }
      field += inter_.coupling(r) * sp;
    }
  }
  return 2.0 * spin(context[static_cast<std::size_t>(i)]) * field;
}

double GibbsVolume::conditional_prob(int i, std::span<const std::uint8_t> context) const {
  // Delta H between sigma_i = 1 and sigma_i = 0 is -2 * field.
  std::vector<std::uint8_t> ctx(context.begin(), context.end());
  ctx[static_cast<std::size_t>(i)] = 0;
  const double dh = flip_energy(i, ctx);  // H(1) - H(0)
  return 1.0 / (1.0 + std::exp(dh));
}

double GibbsVolume::sequential_conditional(int i, std::span<const std::uint8_t> history) const {
  if (i < 0 || i >= n_) throw std::invalid_argument("sequential_conditional: bad position");
  if (static_cast<int>(history.size()) < i)
    throw std::invalid_argument("sequential_conditional: history too short");
  std::uint32_t w = 0;
  for (int r = 1; r <= inter_.range; ++r) {
    const int p = i - r;
    std::uint8_t b = 0;
    if (p >= 0) {
      b = history[static_cast<std::size_t>(p)];
    } else {
      const std::size_t c = static_cast<std::size_t>(-p - 1);
      b = c < bc_.left.size() ? bc_.left[c] : 0;
    }
    if (b) w |= 1u << (r - 1);
  }
  const std::size_t width = std::size_t{1} << inter_.range;
  return cond_p1_[static_cast<std::size_t>(i) * width + w];
}

std::vector<std::uint8_t> GibbsVolume::sample(Rng& rng) const {
  std::vector<std::uint8_t> sigma(static_cast<std::size_t>(n_), 0);
  const std::size_t width = std::size_t{1} << inter_.range;
  std::uint32_t w = initial_window();
  for (int i = 0; i < n_; ++i) {
    const double p1 = cond_p1_[static_cast<std::size_t>(i) * width + w];
    const std::uint8_t s = rng.uniform() < p1 ? 1 : 0;
    sigma[static_cast<std::size_t>(i)] = s;
    w = ((w << 1) & mask_) | s;
  }
  return sigma;
}

GibbsVolume GibbsVolume::conditioned_on_first(std::uint8_t s) const {
  if (n_ < 2) throw std::invalid_argument("conditioned_on_first: volume too small");
  BoundaryCondition bc;
  bc.right = bc_.right;
  bc.left.push_back(s);
  for (std::uint8_t b : bc_.left) {
    if (static_cast<int>(bc.left.size()) >= inter_.range) break;
    bc.left.push_back(b);
  }
  return GibbsVolume(inter_, n_ - 1, std::move(bc));
}

std::vector<double> GibbsVolume::boltzmann_distribution() const {
  if (n_ > 24) throw std::runtime_error("boltzmann_distribution: enumeration beyond 2^24 states");
  const std::size_t count = std::size_t{1} << n_;
  std::vector<double> logw(count);
  std::vector<std::uint8_t> sigma(static_cast<std::size_t>(n_));
  double max_logw = -1e300;
  for (std::size_t code = 0; code < count; ++code) {
    for (int i = 0; i < n_; ++i)
      sigma[static_cast<std::size_t>(i)] = (code >> (n_ - 1 - i)) & 1u;
    logw[code] = -hamiltonian(sigma);
    max_logw = std::max(max_logw, logw[code]);
  }
  double z = 0.0;
  for (double& lw : logw) {
    lw = std::exp(lw - max_logw);
    z += lw;
  }
  for (double& lw : logw) lw /= z;
  return logw;
}

TwoPointCoupling optimal_two_point_coupling(double p, double q) {
  if (p < 0.0 || p > 1.0 || q < 0.0 || q > 1.0)
    throw std::invalid_argument("optimal_two_point_coupling: probabilities outside [0,1]");
  const double both = std::min(p, q);
  return TwoPointCoupling{both, p - both, q - both, 1.0 - p - q + both};
}

HocCoupleResult house_of_cards_couple(const GibbsVolume& vol, int i,
                                      std::span<const std::uint8_t> sigma_upto_i, Rng& rng) {
  if (i < 0 || i >= vol.size()) throw std::invalid_argument("house_of_cards_couple: bad site");
  if (static_cast<int>(sigma_upto_i.size()) < i + 1)
    throw std::invalid_argument("house_of_cards_couple: history must reach site i");

  std::vector<std::uint8_t> h_flip(sigma_upto_i.begin(), sigma_upto_i.begin() + i + 1);
  std::vector<std::uint8_t> h_keep = h_flip;
  h_flip[static_cast<std::size_t>(i)] ^= 1;

  HocCoupleResult out;
  for (int j = i + 1; j < vol.size(); ++j) {
    const double p1 = vol.sequential_conditional(j, h_flip);
    const double p2 = vol.sequential_conditional(j, h_keep);
    // shared uniform realizes the optimal (monotone) coupling
    const double u = rng.uniform();
    const std::uint8_t s1 = u < p1 ? 1 : 0;
    const std::uint8_t s2 = u < p2 ? 1 : 0;
    h_flip.push_back(s1);
    h_keep.push_back(s2);
    out.tail_flipped.push_back(s1);
    out.tail_kept.push_back(s2);
    if (out.first_match_offset == 0 && s1 == s2) out.first_match_offset = j - i;
  }
  return out;
}

ThetaProfile estimate_theta(const GibbsVolume& vol, int j_max, std::size_t n_runs,
                            std::size_t n_gibbs_histories, std::uint64_t seed) {
  const int n = vol.size();
  const int i_center = n / 2;
  if (j_max < 1 || i_center + j_max >= n)
    throw std::invalid_argument("estimate_theta: j_max does not fit right of the centered site");
  if (n_runs < 2) throw std::invalid_argument("estimate_theta: need n_runs >= 2");

  // Stress histories plus random Gibbs histories, all of length i_center+1.
  std::vector<std::vector<std::uint8_t>> histories;
  const std::size_t len = static_cast<std::size_t>(i_center + 1);
  histories.emplace_back(len, std::uint8_t{1});
  histories.emplace_back(len, std::uint8_t{0});
  std::vector<std::uint8_t> alt(len);
  for (std::size_t k = 0; k < len; ++k) alt[k] = static_cast<std::uint8_t>(k & 1);
  histories.push_back(std::move(alt));
  for (std::size_t g = 0; g < n_gibbs_histories; ++g) {
    Rng rng(substream_seed(seed, 1'000'000 + g));
    std::vector<std::uint8_t> sigma = vol.sample(rng);
    sigma.resize(len);
    histories.push_back(std::move(sigma));
  }

  ThetaProfile out;
  out.i_center = i_center;
  out.theta = Eigen::ArrayXd::Zero(j_max);
  out.se = Eigen::ArrayXd::Zero(j_max);

  std::vector<std::uint64_t> counts(static_cast<std::size_t>(j_max));
  std::vector<std::vector<std::uint64_t>> batch_counts(
      kDefaultBatches, std::vector<std::uint64_t>(static_cast<std::size_t>(j_max)));
  for (std::size_t hi = 0; hi < histories.size(); ++hi) {
    std::fill(counts.begin(), counts.end(), 0);
    for (auto& bc : batch_counts) std::fill(bc.begin(), bc.end(), 0);
    const std::uint64_t hist_seed = substream_seed(seed, hi);
    for (std::size_t run = 0; run < n_runs; ++run) {
      Rng rng(substream_seed(hist_seed, run));
      const HocCoupleResult hc = house_of_cards_couple(vol, i_center, histories[hi], rng);
      const std::size_t b = batch_of(run, n_runs);
      for (int j = 1; j <= j_max; ++j) {
        if (hc.tail_flipped[static_cast<std::size_t>(j - 1)] !=
            hc.tail_kept[static_cast<std::size_t>(j - 1)]) {
          ++counts[static_cast<std::size_t>(j - 1)];
          ++batch_counts[b][static_cast<std::size_t>(j - 1)];
        }
      }
    }
    for (int j = 1; j <= j_max; ++j) {
      const double freq =
          static_cast<double>(counts[static_cast<std::size_t>(j - 1)]) / static_cast<double>(n_runs);
      if (freq >= out.theta[j - 1]) {
        std::vector<double> fracs;
        for (int b = 0; b < kDefaultBatches; ++b) {
          const std::size_t begin = batch_begin(static_cast<std::size_t>(b), n_runs);
          const std::size_t end = b + 1 < kDefaultBatches
                                      ? batch_begin(static_cast<std::size_t>(b + 1), n_runs)
                                      : n_runs;
          if (end > begin)
            fracs.push_back(static_cast<double>(batch_counts[static_cast<std::size_t>(b)]
                                                            [static_cast<std::size_t>(j - 1)]) /
                            static_cast<double>(end - begin));
        }
        out.theta[j - 1] = freq;
        out.se[j - 1] = batch_se(fracs);
      }
    }
  }
  return out;
}

HocChain hoc_return_probs(std::span<const double> gamma, int horizon) {
  if (horizon < 1) throw std::invalid_argument("hoc_return_probs: horizon must be >= 1");
  if (static_cast<int>(gamma.size()) < horizon)
    throw std::invalid_argument("hoc_return_probs: gamma sequence shorter than the horizon");
  for (double g : gamma)
    if (g < 0.0 || g > 1.0) throw std::invalid_argument("hoc_return_probs: gamma outside [0,1]");

  HocChain out;
  out.gamma.assign(gamma.begin(), gamma.end());
  out.p_zero = Eigen::ArrayXd::Zero(horizon + 1);
  out.p_zero[0] = 1.0;
  std::vector<double> dist(static_cast<std::size_t>(horizon + 1), 0.0);
  dist[0] = 1.0;
  std::vector<double> next(dist.size(), 0.0);
  for (int l = 1; l <= horizon; ++l) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int m = 0; m < l; ++m) {
      const double mass = dist[static_cast<std::size_t>(m)];
      if (mass == 0.0) continue;
      const double g = out.gamma[static_cast<std::size_t>(m)];
      next[0] += mass * g;
      next[static_cast<std::size_t>(m + 1)] += mass * (1.0 - g);
    }
    dist.swap(next);
    out.p_zero[l] = dist[0];
  }
  return out;
}

double HocChain::return_tail(int k) const {
  if (k < 0) k = 0;
  double s = 0.0;
  for (int l = k; l < static_cast<int>(p_zero.size()); ++l) s += p_zero[l];
  return s;
}

std::vector<double> gamma_sequence(const Interaction& inter, int horizon) {
  std::vector<double> g(static_cast<std::size_t>(horizon));
  for (int m = 0; m < horizon; ++m)
    g[static_cast<std::size_t>(m)] = std::min(1.0, gamma_bound(inter, std::max(1, m)));
  return g;
}

ThetaSummability theta_summability(const ThetaProfile& profile, double q, const HocChain* chain) {
  if (q <= 2.0) throw std::invalid_argument("theta_summability: q must exceed 2");
  ThetaSummability out;
  for (int j = 1; j <= profile.j_max(); ++j)
    out.measured_part += std::pow(profile.at(j), 1.0 / q);

  if (chain == nullptr || chain->horizon() <= profile.j_max()) {
    out.tail_flagged = true;
    return out;
  }
  // a chain whose return probability has not decayed by the horizon gives
  // no finite ceiling (e.g. the gamma bound capped at 1 pins Z at 0)
  if (chain->p_zero[chain->horizon()] > 1e-4) {
    out.tail_flagged = true;
    return out;
  }
  // chain-dominated tail over the computed horizon
  for (int j = profile.j_max() + 1; j <= chain->horizon(); ++j)
    out.tail_part += std::pow(chain->return_tail(j), 1.0 / q);

  // extrapolate S(j) = sum_{l>=j} P(Z_l=0) by a power law over the last octave
  const int h = chain->horizon();
  const int j0 = std::max(profile.j_max() + 1, h / 2);
  const double s0 = chain->return_tail(j0);
  const double s1 = chain->return_tail(h);
  if (s1 <= 0.0) return out;  // tail already exhausted numerically
  if (s0 <= s1 || j0 >= h) {
    out.tail_flagged = true;
    return out;
  }
  const double alpha = std::log(s0 / s1) / std::log(static_cast<double>(h) / j0);
  if (alpha / q <= 1.0) {
    out.tail_flagged = true;  // extrapolated tail not summable
    return out;
  }
  // integral bound for sum_{j>h} (s1 (j/h)^-alpha)^{1/q}
  out.tail_part +=
      std::pow(s1, 1.0 / q) * static_cast<double>(h) / (alpha / q - 1.0);
  return out;
}

EstimateWithError dirichlet_form(const LocalFunction& f, const GibbsVolume& vol, std::size_t n,
                                 std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("dirichlet_form: need n >= 2");
  std::vector<double> vals(n);
  for (std::size_t r = 0; r < n; ++r) {
    Rng rng(substream_seed(seed, r));
    std::vector<std::uint8_t> sigma = vol.sample(rng);
    double acc = 0.0;
    const double base = f.eval_chain(sigma);
    for (const Point& site : f.sites()) {
      const int i = site[0];
      sigma[static_cast<std::size_t>(i)] ^= 1;
      const double g = f.eval_chain(sigma) - base;
      sigma[static_cast<std::size_t>(i)] ^= 1;
      acc += g * g;
    }
    vals[r] = acc;
  }
  return batch_mean_estimate(vals);
}

namespace {

double expectation_exact(const GibbsVolume& vol,
                         const std::function<double(std::span<const std::uint8_t>)>& h) {
  const std::vector<double> weights = vol.boltzmann_distribution();
  const int n = vol.size();
  std::vector<std::uint8_t> sigma(static_cast<std::size_t>(n));
  double acc = 0.0;
  for (std::size_t code = 0; code < weights.size(); ++code) {
    for (int i = 0; i < n; ++i)
      sigma[static_cast<std::size_t>(i)] = (code >> (n - 1 - i)) & 1u;
    acc += weights[code] * h(sigma);
  }
  return acc;
}

}  // namespace

double dirichlet_form_exact(const LocalFunction& f, const GibbsVolume& vol) {
  return expectation_exact(vol, [&](std::span<const std::uint8_t> sigma) {
    std::vector<std::uint8_t> s(sigma.begin(), sigma.end());
    const double base = f.eval_chain(s);
    double acc = 0.0;
    for (const Point& site : f.sites()) {
      const int i = site[0];
      s[static_cast<std::size_t>(i)] ^= 1;
      const double g = f.eval_chain(s) - base;
      s[static_cast<std::size_t>(i)] ^= 1;
      acc += g * g;
    }
    return acc;
  });
}

double variance_exact(const LocalFunction& f, const GibbsVolume& vol) {
  const double m =
      expectation_exact(vol, [&](std::span<const std::uint8_t> s) { return f.eval_chain(s); });
  return expectation_exact(vol, [&](std::span<const std::uint8_t> s) {
    const double d = f.eval_chain(s) - m;
    return d * d;
  });
}

double poincare_ratio_exact(const LocalFunction& f, const GibbsVolume& vol) {
  const double e = dirichlet_form_exact(f, vol);
  if (e <= 0.0) throw std::invalid_argument("poincare_ratio_exact: zero Dirichlet form");
  return variance_exact(f, vol) / e;
}

PoincareEstimate poincare_ratio(const LocalFunction& f, const GibbsVolume& vol, std::size_t n,
                                std::uint64_t seed) {
  if (n < 64) throw std::invalid_argument("poincare_ratio: need n >= 64");
  std::vector<double> fvals(n), dvals(n);
  for (std::size_t r = 0; r < n; ++r) {
    Rng rng(substream_seed(seed, r));
    std::vector<std::uint8_t> sigma = vol.sample(rng);
    const double base = f.eval_chain(sigma);
    fvals[r] = base;
    double acc = 0.0;
    for (const Point& site : f.sites()) {
      const int i = site[0];
      sigma[static_cast<std::size_t>(i)] ^= 1;
      const double g = f.eval_chain(sigma) - base;
      sigma[static_cast<std::size_t>(i)] ^= 1;
      acc += g * g;
    }
    dvals[r] = acc;
  }

  PoincareEstimate out;
  out.dirichlet = batch_mean_estimate(dvals);

  const double grand = mean(fvals);
  std::vector<double> var_batches, ratio_batches;
  double var_global = sample_variance(fvals);
  for (int b = 0; b < kDefaultBatches; ++b) {
    const std::size_t begin = batch_begin(static_cast<std::size_t>(b), n);
    const std::size_t end =
        b + 1 < kDefaultBatches ? batch_begin(static_cast<std::size_t>(b + 1), n) : n;
    if (end - begin < 2) continue;
    double ss = 0.0, ds = 0.0;
    for (std::size_t r = begin; r < end; ++r) {
      ss += (fvals[r] - grand) * (fvals[r] - grand);
      ds += dvals[r];
    }
    const double vb = ss / static_cast<double>(end - begin - 1);
    var_batches.push_back(vb);
    if (ds > 0.0) ratio_batches.push_back(vb / (ds / static_cast<double>(end - begin)));
  }
  out.variance.estimate = var_global;
  out.variance.se = batch_se(var_batches);
  out.variance.n = n;

  out.flagged = out.dirichlet.estimate <= 5.0 * out.dirichlet.se || out.dirichlet.estimate <= 0.0;
  out.ratio.n = n;
  if (!out.flagged) {
    out.ratio.estimate = var_global / out.dirichlet.estimate;
    out.ratio.se = batch_se(ratio_batches);
  } else {
    out.ratio.flagged = true;
  }
  return out;
}

DobrushinMatrix dobrushin_matrix(const Interaction& inter) {
  inter.validate();
  const int r = inter.range;
  if (r > 11)
    throw std::runtime_error("dobrushin_matrix: enumeration beyond range 11 is out of budget");
  DobrushinMatrix out;
  out.range = r;
  out.row = Eigen::ArrayXd::Zero(2 * r + 1);

  // neighbor offsets of the origin
  std::vector<int> offsets;
  for (int k = -r; k <= r; ++k)
    if (k != 0) offsets.push_back(k);
  const int m = static_cast<int>(offsets.size());

  auto pi = [](double field) { return 1.0 / (1.0 + std::exp(-2.0 * field)); };

  for (int ji = 0; ji < m; ++ji) {
    const int j = offsets[static_cast<std::size_t>(ji)];
    const double jj = inter.coupling(std::abs(j));
    double best = 0.0;
    const std::uint32_t patterns = 1u << (m - 1);
    for (std::uint32_t pat = 0; pat < patterns; ++pat) {
      double rest = 0.0;
      int bit = 0;
      for (int ki = 0; ki < m; ++ki) {
        if (ki == ji) continue;
        const double s = ((pat >> bit) & 1u) ? 1.0 : -1.0;
        rest += inter.coupling(std::abs(offsets[static_cast<std::size_t>(ki)])) * s;
        ++bit;
      }
      best = std::max(best, std::fabs(pi(rest + jj) - pi(rest - jj)));
    }
    out.row[j + r] = best;
  }
  return out;
}

double glauber_decay_bound(const DobrushinMatrix& c, double t) {
  if (c.norm_inf() >= 1.0)
    throw std::invalid_argument("glauber_decay_bound: ||C||_inf >= 1 is out of the regime");
  if (t < 0.0) throw std::invalid_argument("glauber_decay_bound: negative time");
  if (t == 0.0) return 1.0;

  // truncation order with Poisson tail < 1e-14
  int order = 8;
  {
    double w = std::exp(-t), cum = w;
    int n = 0;
    while (1.0 - cum > 1e-14 && n < 100000) {
      ++n;
      w *= t / n;
      cum += w;
    }
    order = n;
  }
  const int r = c.range;
  const int half = r * order + 1;
  const int width = 2 * half + 1;
  Eigen::ArrayXd cur = Eigen::ArrayXd::Zero(width);
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(width);
  Eigen::ArrayXd next = Eigen::ArrayXd::Zero(width);
  cur[half] = 1.0;
  double w = std::exp(-t);
  acc[half] += w;
  for (int n = 1; n <= order; ++n) {
    next.setZero();
    for (int x = 0; x < width; ++x) {
      const double v = cur[x];
      if (v == 0.0) continue;
      for (int j = -r; j <= r; ++j) {
        if (j == 0) continue;
        const int y = x + j;
        if (y < 0 || y >= width) continue;
        next[y] += v * c.at(j);
      }
    }
    cur.swap(next);
    w *= t / n;
    acc += w * cur;
  }
  return std::sqrt((acc * acc).sum());
}

}  // namespace ips
