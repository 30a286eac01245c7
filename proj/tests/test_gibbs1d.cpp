#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "ips/gibbs1d.hpp"
#include "ips/stats.hpp"

using namespace ips;

namespace {

constexpr double kZeta5 = 1.0369277551433699263;

std::vector<std::uint8_t> decode(std::size_t code, int n) {
  std::vector<std::uint8_t> sigma(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) sigma[static_cast<std::size_t>(i)] = (code >> (n - 1 - i)) & 1u;
  return sigma;
}

}  // namespace

TEST_CASE("power tail sums against the zeta oracle") {
  CHECK(power_tail_sum(5.0, 1) == doctest::Approx(kZeta5).epsilon(1e-13));
  CHECK(power_tail_sum(5.0, 2) == doctest::Approx(kZeta5 - 1.0).epsilon(1e-12));
  CHECK(power_tail_sum(3.0, 1) == doctest::Approx(1.2020569031595943).epsilon(1e-13));
}

TEST_CASE("hamiltonian basics") {
  // beta = 0
  Interaction zero = Interaction::long_range_ising(0.0, 5.0, 2);
  GibbsVolume v0(zero, 4, BoundaryCondition::free_boundary());
  std::vector<std::uint8_t> s{1, 0, 1, 1};
  CHECK(v0.hamiltonian(s) == doctest::Approx(0.0));

  // single free site: no pair terms at all
  Interaction inter = Interaction::long_range_ising(0.5, 5.0, 1);
  GibbsVolume v1(inter, 1, BoundaryCondition::free_boundary());
  std::vector<std::uint8_t> up{1}, down{0};
  CHECK(v1.hamiltonian(up) == doctest::Approx(0.0));
  CHECK(v1.hamiltonian(down) == doctest::Approx(0.0));

  // N=2, R=1, beta=0.5, free boundary: H(11)=H(00)=-beta, H(10)=H(01)=+beta
  GibbsVolume v2(inter, 2, BoundaryCondition::free_boundary());
  const double beta = 0.5;
  CHECK(v2.hamiltonian(std::vector<std::uint8_t>{1, 1}) == doctest::Approx(-beta));
  CHECK(v2.hamiltonian(std::vector<std::uint8_t>{0, 0}) == doctest::Approx(-beta));
  CHECK(v2.hamiltonian(std::vector<std::uint8_t>{1, 0}) == doctest::Approx(beta));
  CHECK(v2.hamiltonian(std::vector<std::uint8_t>{0, 1}) == doctest::Approx(beta));
  // aligning the pair lowers the energy by 2 beta
  CHECK(v2.hamiltonian(std::vector<std::uint8_t>{1, 1}) -
            v2.hamiltonian(std::vector<std::uint8_t>{1, 0}) ==
        doctest::Approx(-2.0 * beta));
}

TEST_CASE("partition function matches enumeration") {
  Interaction inter = Interaction::long_range_ising(0.5, 5.0, 3);
  for (const BoundaryCondition& bc :
       {BoundaryCondition::free_boundary(), BoundaryCondition::uniform(3, 1, 0)}) {
    const int n = 8;
    GibbsVolume vol(inter, n, bc);
    double z = 0.0;
    for (std::size_t code = 0; code < (1u << n); ++code)
      z += std::exp(-vol.hamiltonian(decode(code, n)));
    CHECK(vol.log_partition() == doctest::Approx(std::log(z)).epsilon(1e-12));
  }
}

TEST_CASE("conditional probabilities: coin flips at beta=0, ferromagnetic pull, enumeration") {
  Interaction zero = Interaction::long_range_ising(0.0, 5.0, 2);
  GibbsVolume v0(zero, 6, BoundaryCondition::free_boundary());
  std::vector<std::uint8_t> ctx{1, 0, 1, 1, 0, 0};
  CHECK(v0.conditional_prob(3, ctx) == doctest::Approx(0.5));

  Interaction inter = Interaction::long_range_ising(0.5, 5.0, 3);
  GibbsVolume vp(inter, 6, BoundaryCondition::uniform(3, 1, 1));
  std::vector<std::uint8_t> allplus(6, 1);
  CHECK(vp.conditional_prob(2, allplus) > 0.5);

  // N=8 exhaustive check of the single-site conditionals
  const int n = 8;
  GibbsVolume vol(inter, n, BoundaryCondition::uniform(3, 1, 0));
  const std::vector<double> dist = vol.boltzmann_distribution();
  for (std::size_t code : {std::size_t{0}, std::size_t{77}, std::size_t{170}, std::size_t{255}}) {
    for (int i = 0; i < n; ++i) {
      const std::size_t bit = std::size_t{1} << (n - 1 - i);
      const double w1 = dist[code | bit];
      const double w0 = dist[code & ~bit];
      const double want = w1 / (w0 + w1);
      CHECK(vol.conditional_prob(i, decode(code, n)) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("sequential conditionals match enumeration") {
  Interaction inter = Interaction::long_range_ising(0.4, 4.0, 3);
  const int n = 10;
  GibbsVolume vol(inter, n, BoundaryCondition::uniform(3, 0, 1));
  const std::vector<double> dist = vol.boltzmann_distribution();
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int i = static_cast<int>(rng.uniform_index(n));
    std::vector<std::uint8_t> hist(static_cast<std::size_t>(i));
    for (auto& b : hist) b = rng.bernoulli(0.5);
    double num = 0.0, den = 0.0;
    for (std::size_t code = 0; code < dist.size(); ++code) {
      bool match = true;
      for (int k = 0; k < i && match; ++k)
        match = ((code >> (n - 1 - k)) & 1u) == hist[static_cast<std::size_t>(k)];
      if (!match) continue;
      den += dist[code];
      if ((code >> (n - 1 - i)) & 1u) num += dist[code];
    }
    CHECK(vol.sequential_conditional(i, hist) == doctest::Approx(num / den).epsilon(1e-11));
  }
}

TEST_CASE("marginal consistency under conditioning on the first spin") {
  Interaction inter = Interaction::long_range_ising(0.5, 5.0, 3);
  for (int n : {5, 8, 12}) {
    GibbsVolume vol(inter, n, BoundaryCondition::uniform(3, 1, 0));
    const std::vector<double> dist = vol.boltzmann_distribution();
    for (std::uint8_t s : {std::uint8_t{0}, std::uint8_t{1}}) {
      GibbsVolume cond = vol.conditioned_on_first(s);
      const std::vector<double> rest = cond.boltzmann_distribution();
      double norm = 0.0;
      for (std::size_t tail = 0; tail < rest.size(); ++tail) {
        const std::size_t code = (static_cast<std::size_t>(s) << (n - 1)) | tail;
        norm += dist[code];
      }
      for (std::size_t tail = 0; tail < rest.size(); ++tail) {
        const std::size_t code = (static_cast<std::size_t>(s) << (n - 1)) | tail;
        CHECK(rest[tail] == doctest::Approx(dist[code] / norm).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("exact sampler: fair coins at beta=0") {
  Interaction zero = Interaction::long_range_ising(0.0, 5.0, 2);
  const int n = 4;
  GibbsVolume vol(zero, n, BoundaryCondition::free_boundary());
  Rng rng(11);
  std::array<int, 16> counts{};
  const int samples = 100'000;
  for (int r = 0; r < samples; ++r) {
    const std::vector<std::uint8_t> s = vol.sample(rng);
    int code = 0;
    for (int i = 0; i < n; ++i) code = (code << 1) | s[static_cast<std::size_t>(i)];
    ++counts[static_cast<std::size_t>(code)];
  }
  double stat = 0.0;
  const double expected = samples / 16.0;
  for (int c : counts) stat += (c - expected) * (c - expected) / expected;
  CHECK(chi_squared_pvalue(stat, 15) > 0.01);
}

TEST_CASE("exact sampler matches the Boltzmann weights in total variation") {
  Interaction inter = Interaction::long_range_ising(0.5, 5.0, 3);
  const int n = 8;
  GibbsVolume vol(inter, n, BoundaryCondition::uniform(3, 1, 1));
  const std::vector<double> dist = vol.boltzmann_distribution();
  Rng rng(13);
  std::vector<int> counts(dist.size(), 0);
  const int samples = 200'000;
  for (int r = 0; r < samples; ++r) {
    const std::vector<std::uint8_t> s = vol.sample(rng);
    std::size_t code = 0;
    for (int i = 0; i < n; ++i) code = (code << 1) | s[static_cast<std::size_t>(i)];
    ++counts[code];
  }
  double tv = 0.0;
  for (std::size_t c = 0; c < dist.size(); ++c)
    tv += std::fabs(static_cast<double>(counts[c]) / samples - dist[c]);
  tv /= 2.0;
  CHECK(tv < 0.02);
}

TEST_CASE("free-boundary magnetization is symmetric") {
  Interaction inter = Interaction::long_range_ising(0.5, 5.0, 3);
  GibbsVolume vol(inter, 16, BoundaryCondition::free_boundary());
  Rng rng(17);
  std::vector<double> mags;
  for (int r = 0; r < 20'000; ++r) {
    const std::vector<std::uint8_t> s = vol.sample(rng);
    double m = 0.0;
    for (std::uint8_t b : s) m += 2.0 * b - 1.0;
    mags.push_back(m / 16.0);
  }
  const EstimateWithError est = batch_mean_estimate(mags);
  CHECK(std::fabs(est.estimate) <= 3.0 * est.se);
}

TEST_CASE("optimal two-point coupling") {
  const TwoPointCoupling diag = optimal_two_point_coupling(0.6, 0.6);
  CHECK(diag.mismatch() == doctest::Approx(0.0));
  const TwoPointCoupling c = optimal_two_point_coupling(0.7, 0.4);
  CHECK(c.both_one == doctest::Approx(0.4));
  CHECK(c.first_only == doctest::Approx(0.3));
  CHECK(c.second_only == doctest::Approx(0.0));
  CHECK(c.neither == doctest::Approx(0.3));
  CHECK(c.mismatch() == doctest::Approx(0.3));
  for (double p : {0.0, 0.25, 0.8, 1.0}) {
    for (double q : {0.0, 0.3, 0.9, 1.0}) {
      const TwoPointCoupling k = optimal_two_point_coupling(p, q);
      CHECK(k.both_one + k.first_only == doctest::Approx(p));
      CHECK(k.both_one + k.second_only == doctest::Approx(q));
      CHECK(k.both_one + k.first_only + k.second_only + k.neither == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("house of cards coupling: product case couples immediately") {
  Interaction zero = Interaction::long_range_ising(0.0, 5.0, 2);
  GibbsVolume vol(zero, 12, BoundaryCondition::free_boundary());
  Rng rng(19);
  std::vector<std::uint8_t> hist{1, 0, 1, 1, 0, 1};
  for (int run = 0; run < 200; ++run) {
    const HocCoupleResult hc = house_of_cards_couple(vol, 5, hist, rng);
    CHECK(hc.tail_flipped == hc.tail_kept);
    CHECK(hc.first_match_offset == 1);
  }
}

TEST_CASE("house of cards marginals match the conditioned volume") {
  Interaction inter = Interaction::long_range_ising(0.5, 5.0, 3);
  const int n = 10, i = 4;
  GibbsVolume vol(inter, n, BoundaryCondition::uniform(3, 1, 0));
  std::vector<std::uint8_t> hist{1, 0, 0, 1, 1};  // sigma_{<=4}

  // law of the kept-history tail: volume on the remaining 5 sites with the
  // last range spins of the history as the left collar
  BoundaryCondition bc_tail;
  bc_tail.right = vol.boundary().right;
  bc_tail.left = {hist[4], hist[3], hist[2]};
  GibbsVolume tail_vol(inter, n - i - 1, bc_tail);
  const std::vector<double> want = tail_vol.boltzmann_distribution();

  Rng rng(23);
  std::vector<int> counts(want.size(), 0);
  const int runs = 100'000;
  for (int run = 0; run < runs; ++run) {
    const HocCoupleResult hc = house_of_cards_couple(vol, i, hist, rng);
    std::size_t code = 0;
    for (std::uint8_t b : hc.tail_kept) code = (code << 1) | b;
    ++counts[code];
  }
  double tv = 0.0;
  for (std::size_t c = 0; c < want.size(); ++c)
    tv += std::fabs(static_cast<double>(counts[c]) / runs - want[c]);
  tv /= 2.0;
  CHECK(tv < 0.02);
}

TEST_CASE("flipping the conditioned spin up raises every sequential conditional") {
  Interaction inter = Interaction::long_range_ising(0.5, 5.0, 3);
  const int n = 12, i = 5;
  GibbsVolume vol(inter, n, BoundaryCondition::uniform(3, 1, 1));
  std::vector<std::uint8_t> lo{1, 0, 1, 0, 0, 0};
  std::vector<std::uint8_t> hi = lo;
  hi[5] = 1;
  // identical continuations after i: the up-history conditional dominates
  std::vector<std::uint8_t> cont{1, 0, 1};
  for (std::size_t extra = 0; extra <= cont.size(); ++extra) {
    std::vector<std::uint8_t> hlo = lo, hhi = hi;
    hlo.insert(hlo.end(), cont.begin(), cont.begin() + static_cast<long>(extra));
    hhi.insert(hhi.end(), cont.begin(), cont.begin() + static_cast<long>(extra));
    const int j = i + 1 + static_cast<int>(extra);
    CHECK(vol.sequential_conditional(j, hhi) >= vol.sequential_conditional(j, hlo));
  }
}

TEST_CASE("theta profile: product measure has zero mismatch") {
  Interaction zero = Interaction::long_range_ising(0.0, 5.0, 2);
  GibbsVolume vol(zero, 16, BoundaryCondition::free_boundary());
  const ThetaProfile prof = estimate_theta(vol, 6, 2000, 2, 29);
  for (int j = 1; j <= 6; ++j) {
    CHECK(prof.at(j) == doctest::Approx(0.0));
    CHECK(prof.at(j) <= 1.0);
  }
}

TEST_CASE("theta profile decays for the kappa=5 chain") {
  Interaction inter = Interaction::long_range_ising(0.5, 5.0, 8);
  GibbsVolume vol(inter, 24, BoundaryCondition::uniform(8, 1, 1));
  const ThetaProfile prof = estimate_theta(vol, 8, 20'000, 4, 31);
  CHECK(prof.at(1) > 0.0);
  // fitted slope of theta over j is nonpositive
  double sx = 0, sy = 0, sxy = 0, sxx = 0;
  int m = 0;
  for (int j = 1; j <= 8; ++j) {
    sx += j;
    sy += prof.at(j);
    sxy += j * prof.at(j);
    sxx += j * j;
    ++m;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  CHECK(slope <= 0.0);
}

TEST_CASE("gamma bound values") {
  Interaction zero = Interaction::long_range_ising(0.0, 5.0, 2);
  CHECK(gamma_bound(zero, 3) == doctest::Approx(0.0));

  Interaction inter = Interaction::long_range_ising(0.5, 5.0, 12);
  const double t2 = kZeta5 - 1.0;
  CHECK(inter.tail_abs_sum(2) == doctest::Approx(t2).epsilon(1e-12));
  CHECK(gamma_bound(inter, 2) == doctest::Approx(std::expm1(t2)).epsilon(1e-12));
  CHECK(gamma_bound(inter, 2) == doctest::Approx(0.0376184).epsilon(2e-5));

  // m^{kappa-1} gamma_m -> 2 beta / (kappa - 1)
  const double limit = 2.0 * 0.5 / 4.0;
  for (long m : {100L, 1000L, 10'000L}) {
    const double scaled = std::pow(static_cast<double>(m), 4.0) * gamma_bound(inter, static_cast<int>(m));
    CHECK(scaled == doctest::Approx(limit).epsilon(5.0 / static_cast<double>(m)));
  }
}

TEST_CASE("house-of-cards chain returns") {
  std::vector<double> zero(16, 0.0);
  const HocChain c0 = hoc_return_probs(zero, 12);
  for (int l = 1; l <= 12; ++l) CHECK(c0.p_zero[l] == doctest::Approx(0.0));

  std::vector<double> g(16, 0.25);
  const HocChain cg = hoc_return_probs(g, 12);
  CHECK(cg.p_zero[1] == doctest::Approx(0.25));
  // two-step check by hand: P(Z_2=0) = g*g + (1-g)*g
  CHECK(cg.p_zero[2] == doctest::Approx(0.25 * 0.25 + 0.75 * 0.25));
}

TEST_CASE("theta summability: geometric profile and q=4") {
  ThetaProfile prof;
  prof.theta = Eigen::ArrayXd::Zero(40);
  prof.se = Eigen::ArrayXd::Zero(40);
  for (int j = 1; j <= 40; ++j) prof.theta[j - 1] = std::pow(4.0, -j);
  const ThetaSummability ts = theta_summability(prof, 4.0);
  CHECK(ts.measured_part == doctest::Approx(1.0 / (std::sqrt(2.0) - 1.0)).epsilon(1e-5));
  CHECK(ts.measured_part == doctest::Approx(2.41421).epsilon(1e-4));
  CHECK(ts.tail_flagged);  // no chain supplied

  ThetaProfile zero;
  zero.theta = Eigen::ArrayXd::Zero(10);
  zero.se = Eigen::ArrayXd::Zero(10);
  const ThetaSummability tz = theta_summability(zero, 2.5);
  CHECK(tz.measured_part == doctest::Approx(0.0));
  CHECK_THROWS_AS(theta_summability(zero, 2.0), std::invalid_argument);
}

TEST_CASE("theta summability for the kappa=5 chain: finite where the ceiling is informative") {
  // beta=0.2: gamma stays below 1, the chain is transient and the summed
  // ceiling converges for q slightly above 2 (tail exponent kappa-1 = 4).
  Interaction informative = Interaction::long_range_ising(0.2, 5.0, 8);
  GibbsVolume vol(informative, 24, BoundaryCondition::uniform(8, 1, 1));
  const ThetaProfile prof = estimate_theta(vol, 8, 10'000, 3, 61);
  const HocChain chain = hoc_return_probs(gamma_sequence(informative, 1024), 1024);
  const ThetaSummability ts = theta_summability(prof, 2.5, &chain);
  CHECK_FALSE(ts.tail_flagged);
  CHECK(ts.value() > 0.0);
  CHECK(ts.value() < 1e3);
  CHECK(std::isfinite(ts.value()));

  // beta=0.5 caps gamma at 1: the chain never decays and no finite tail
  // ceiling exists; the summability must be flagged, not faked.
  Interaction vacuous = Interaction::long_range_ising(0.5, 5.0, 8);
  const HocChain stuck = hoc_return_probs(gamma_sequence(vacuous, 1024), 1024);
  const ThetaSummability tv = theta_summability(prof, 2.5, &stuck);
  CHECK(tv.tail_flagged);
}

TEST_CASE("hoc dominance of the measured theta profile") {
  // beta=0.2 keeps the gamma bound below 1, so the chain ceiling is
  // informative; beta=0.5 caps at 1 and the ceiling is vacuous but the
  // inequality is still exercised.
  for (double beta : {0.2, 0.5}) {
    Interaction inter = Interaction::long_range_ising(beta, 5.0, 8);
    GibbsVolume vol(inter, 24, BoundaryCondition::uniform(8, 1, 1));
    const ThetaProfile prof = estimate_theta(vol, 8, 20'000, 4, 37);
    const HocChain chain = hoc_return_probs(gamma_sequence(inter, 512), 512);
    for (int j = 1; j <= 8; ++j) CHECK(prof.at(j) <= chain.return_tail(j) + 4.0 * prof.se_at(j));
  }
  Interaction informative = Interaction::long_range_ising(0.2, 5.0, 8);
  CHECK(gamma_sequence(informative, 4)[1] < 1.0);
}

TEST_CASE("dirichlet form and poincare ratio") {
  Interaction inter = Interaction::long_range_ising(0.5, 5.0, 3);
  GibbsVolume vol(inter, 8, BoundaryCondition::uniform(3, 1, 0));

  // constants have zero form
  CHECK(dirichlet_form_exact(LocalFunction::constant(1, 3.0), vol) == doctest::Approx(0.0));
  // f = sigma(0): (grad_0 f)^2 = 1 identically
  LocalFunction f0 = LocalFunction::occupancy(1, Point{});
  CHECK(dirichlet_form_exact(f0, vol) == doctest::Approx(1.0));
  const EstimateWithError mc = dirichlet_form(f0, vol, 256, 41);
  CHECK(mc.estimate == doctest::Approx(1.0));

  // MC vs enumeration for a three-site function
  LocalFunction f(1, {make_point({1}), make_point({3}), make_point({4})},
                  {0.0, 0.5, -0.25, 1.0, 0.75, -0.5, 0.25, 2.0});
  const double exact = dirichlet_form_exact(f, vol);
  const EstimateWithError est = dirichlet_form(f, vol, 20'000, 43);
  CHECK(std::fabs(est.estimate - exact) <= 3.0 * est.se);

  // product measure: Var = 1/4 and E = 1 for f = sigma(0)
  Interaction zero = Interaction::long_range_ising(0.0, 5.0, 2);
  GibbsVolume pv(zero, 8, BoundaryCondition::free_boundary());
  CHECK(poincare_ratio_exact(f0, pv) == doctest::Approx(0.25));

  // random local functions under the product measure: ratio <= 1
  Rng rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 1 + static_cast<int>(rng.uniform_index(3));
    std::vector<Point> sites;
    while (static_cast<int>(sites.size()) < m) {
      Point p = make_point({static_cast<int>(rng.uniform_index(8))});
      bool dup = false;
      for (const Point& q : sites) dup = dup || q == p;
      if (!dup) sites.push_back(p);
    }
    std::vector<double> values(std::size_t{1} << m);
    for (double& v : values) v = 2.0 * rng.uniform() - 1.0;
    LocalFunction rf(1, std::move(sites), std::move(values));
    if (dirichlet_form_exact(rf, pv) <= 0.0) continue;
    CHECK(poincare_ratio_exact(rf, pv) <= 1.0 + 1e-12);
  }

  // Monte Carlo ratio agrees with enumeration for the interacting chain
  const PoincareEstimate pr = poincare_ratio(f0, vol, 40'000, 53);
  CHECK_FALSE(pr.flagged);
  CHECK(std::fabs(pr.ratio.estimate - poincare_ratio_exact(f0, vol)) <= 4.0 * pr.ratio.se);
}

TEST_CASE("flip ratios obey the Radon-Nikodym bound") {
  Interaction inter = Interaction::long_range_ising(0.5, 5.0, 8);
  GibbsVolume vol(inter, 20, BoundaryCondition::uniform(8, 1, 0));
  const double cap = std::exp(2.0 * inter.tail_abs_sum(1));
  Rng rng(59);
  double max_ratio = 0.0;
  for (int trial = 0; trial < 10'000; ++trial) {
    const std::vector<std::uint8_t> sigma = vol.sample(rng);
    const int i = static_cast<int>(rng.uniform_index(20));
    max_ratio = std::max(max_ratio, std::exp(-vol.flip_energy(i, sigma)));
  }
  CHECK(max_ratio <= cap);
}

TEST_CASE("dobrushin matrix for the nearest-neighbor chain") {
  Interaction zero = Interaction::long_range_ising(0.0, 5.0, 1);
  const DobrushinMatrix c0 = dobrushin_matrix(zero);
  CHECK(c0.norm_inf() == doctest::Approx(0.0));

  Interaction nn = Interaction::long_range_ising(0.2, 50.0, 1);
  const DobrushinMatrix c = dobrushin_matrix(nn);
  const double want = std::tanh(2.0 * 0.2) / 2.0;
  CHECK(c.at(1) == doctest::Approx(want).epsilon(1e-12));
  CHECK(c.at(-1) == doctest::Approx(want).epsilon(1e-12));
  CHECK(c.at(0) == doctest::Approx(0.0));
  CHECK(c.norm_inf() == doctest::Approx(2.0 * want).epsilon(1e-12));
  CHECK(c.norm_inf() < 1.0);
}

TEST_CASE("glauber decay bound") {
  Interaction zero = Interaction::long_range_ising(0.0, 5.0, 1);
  const DobrushinMatrix c0 = dobrushin_matrix(zero);
  for (double t : {0.5, 1.0, 3.0})
    CHECK(glauber_decay_bound(c0, t) == doctest::Approx(std::exp(-t)).epsilon(1e-12));
  CHECK(glauber_decay_bound(c0, 0.0) == doctest::Approx(1.0));

  Interaction nn = Interaction::long_range_ising(0.2, 50.0, 1);
  const DobrushinMatrix c = dobrushin_matrix(nn);
  // log-linear decay with slope at most -(1 - ||C||_inf)
  double prev = 1.0;
  for (double t : {1.0, 2.0, 3.0, 4.0}) {
    const double v = glauber_decay_bound(c, t);
    CHECK(v < prev);
    CHECK(std::log(v) <= -(1.0 - c.norm_inf()) * t + 1e-9);
    prev = v;
  }

  DobrushinMatrix hot;
  hot.range = 1;
  hot.row = Eigen::ArrayXd::Zero(3);
  hot.row[0] = 0.6;
  hot.row[2] = 0.6;
  CHECK_THROWS_AS(glauber_decay_bound(hot, 1.0), std::invalid_argument);
}

TEST_CASE("transfer budget guard") {
  Interaction wide = Interaction::long_range_ising(0.5, 5.0, 22);
  CHECK_THROWS_AS(GibbsVolume(wide, 64, BoundaryCondition::free_boundary()), std::runtime_error);
}
