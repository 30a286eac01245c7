#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ips/bounds.hpp"
#include "ips/estimators.hpp"
#include "ips/random_walk.hpp"
#include "ips/rng.hpp"

using namespace ips;

namespace {

ProcessSpec sep_simple() { return SepSpec{JumpKernel::simple(1)}; }

}  // namespace

TEST_CASE("estimate_stf: t=0 is exact, constants stay constant") {
  Lattice lat(1, 32);
  Rng rng(1);
  Configuration sigma = Configuration::bernoulli(lat, 0.5, rng);
  LocalFunction f(1, {make_point({0}), make_point({1})}, {0.0, 0.3, 0.7, 1.0});
  const EstimateWithError e0 = estimate_stf(sigma, f, sep_simple(), 0.0, 16, 3);
  CHECK(e0.estimate == doctest::Approx(f.eval(sigma)).epsilon(1e-14));
  CHECK(e0.se == doctest::Approx(0.0));

  LocalFunction c = LocalFunction::constant(1, 2.25);
  const EstimateWithError ec = estimate_stf(sigma, c, sep_simple(), 3.0, 16, 4);
  CHECK(ec.estimate == doctest::Approx(2.25));
  CHECK(ec.se == doctest::Approx(0.0));
}

TEST_CASE("estimate_stf matches the SEP duality oracle") {
  // S_t f(sigma) = sum_k p_t(0,k) sigma(k) for f = eta(0).
  Lattice lat(1, 64);
  const double t = 2.0;
  const TransitionRow row = transition_row(JumpKernel::simple(1), t, 64, 1e-12);
  LocalFunction f = LocalFunction::occupancy(1, Point{});
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    Configuration sigma = Configuration::bernoulli(lat, 0.5, rng);
    double oracle = 0.0;
    for (int k = 0; k < 64; ++k) oracle += row.at_site(k) * sigma.at(k);
    const EstimateWithError est = estimate_stf(sigma, f, sep_simple(), t, 800, 1000 + trial);
    const double binom_se = std::sqrt(std::max(oracle * (1.0 - oracle), 1e-8) / 800.0);
    CHECK(std::fabs(est.estimate - oracle) <= 4.0 * std::max(est.se, binom_se));
  }
}

TEST_CASE("nested variance at t=0 matches exhaustive product variance") {
  Lattice lat(1, 32);
  LocalFunction f(1, {make_point({0}), make_point({1}), make_point({2})},
                  {0.0, 0.2, -0.5, 1.0, 0.4, 0.9, -0.1, 0.7});
  for (double rho : {0.3, 0.5}) {
    ProductMeasureSpec mu;
    mu.rho = rho;
    const NestedVarianceEstimate v =
        estimate_var_stf(mu, lat, f, sep_simple(), 0.0, 4000, 2, 99);
    const double exact = product_variance(f, rho);
    CHECK(std::fabs(v.var.estimate - exact) <= 3.5 * v.var.se);
  }
}

TEST_CASE("nested variance reproduces the SEP duality variance") {
  // Var_{nu_rho}(S_t f) = rho(1-rho) p_{2t}(0,0) for f = eta(0).
  Lattice lat(1, 64);
  LocalFunction f = LocalFunction::occupancy(1, Point{});
  ProductMeasureSpec mu;
  mu.rho = 0.5;
  for (double t : {1.0, 4.0}) {
    const double exact = 0.25 * transition_row(JumpKernel::simple(1), 2.0 * t, 64, 1e-12).origin();
    const NestedVarianceEstimate v =
        estimate_var_stf(mu, lat, f, sep_simple(), t, 3000, 12, 7000 + static_cast<int>(t), 4);
    CHECK(std::fabs(v.var.estimate - exact) <= 3.5 * v.var.se);
  }
}

TEST_CASE("nested variance of a constant is zero") {
  Lattice lat(1, 16);
  ProductMeasureSpec mu;
  const NestedVarianceEstimate v =
      estimate_var_stf(mu, lat, LocalFunction::constant(1, 5.0), sep_simple(), 1.0, 64, 4, 11);
  CHECK(v.var.estimate == doctest::Approx(0.0));
}

TEST_CASE("nested variance estimator is unbiased on a solvable toy chain") {
  // Single beta=0 heat-bath spin: S_t f = 1/2 + (sigma(0)-1/2)e^{-t}, so
  // Var(S_t f) = e^{-2t}/4 under nu_{1/2}.
  Lattice lat(1, 4);
  ProcessSpec spec = GlauberSpec{Interaction::long_range_ising(0.0, 5.0, 1)};
  LocalFunction f = LocalFunction::occupancy(1, Point{});
  ProductMeasureSpec mu;
  const double t = 1.0;
  const double exact = std::exp(-2.0 * t) / 4.0;
  std::vector<double> estimates;
  for (int rep = 0; rep < 50; ++rep) {
    const NestedVarianceEstimate v =
        estimate_var_stf(mu, lat, f, spec, t, 400, 8, 20'000 + rep);
    estimates.push_back(v.var.estimate);
  }
  const EstimateWithError pooled = batch_mean_estimate(estimates, 10);
  CHECK(std::fabs(pooled.estimate - exact) <= 2.0 * pooled.se);
}

TEST_CASE("estimate_psi at t=0 is the indicator at the origin") {
  Lattice lat(1, 32);
  ProductMeasureSpec env;
  const PsiEstimate pe = estimate_psi(sep_simple(), lat, 0.0, env, 64, 5);
  CHECK(pe.kernel.at_offset(Point{}) == doctest::Approx(1.0));
  CHECK(pe.kernel.l1() == doctest::Approx(1.0));
  CHECK(pe.l2_squared.estimate == doctest::Approx(1.0));
}

TEST_CASE("SEP psi-hat matches the exact random-walk row") {
  Lattice lat(1, 64);
  ProductMeasureSpec env;
  const double t = 2.0;
  const std::size_t n = 40'000;
  const PsiEstimate pe = estimate_psi(sep_simple(), lat, t, env, n, 31);
  const TransitionRow row = transition_row(JumpKernel::simple(1), t, 64, 1e-12);
  // total mass is exactly one discrepancy per run
  CHECK(pe.total_mass.estimate == doctest::Approx(1.0));
  CHECK(pe.total_mass.se == doctest::Approx(0.0));
  // compare in SE units where the CLT is valid
  double max_z = 0.0;
  for (int k = 0; k < 64; ++k) {
    const double p = row.at_site(k);
    if (p * static_cast<double>(n) < 25.0) continue;
    const double se = std::max(pe.kernel.se[k], std::sqrt(p * (1 - p) / static_cast<double>(n)));
    max_z = std::max(max_z, std::fabs(pe.kernel.psi[k] - p) / se);
  }
  CHECK(max_z < 4.0);
  // unbiased l2 against p_{2t}(0,0)
  const double l2_exact = transition_row(JumpKernel::simple(1), 2.0 * t, 64, 1e-12).origin();
  CHECK(std::fabs(pe.l2_squared.estimate - l2_exact) <= 4.0 * pe.l2_squared.se);
}

TEST_CASE("voter psi l2 matches the symmetrized-walk return probability") {
  Lattice lat(1, 64);
  ProcessSpec voter = VoterSpec{JumpKernel::simple(1)};
  ProductMeasureSpec env;
  const double times[] = {1.0, 4.0};
  const auto estimates = estimate_psi_grid(voter, lat, times, env, 40'000, 77, 4);
  for (std::size_t g = 0; g < 2; ++g) {
    const double exact = transition_row(JumpKernel::simple(1), 2.0 * times[g], 64, 1e-12).origin();
    CHECK(std::fabs(estimates[g].l2_squared.estimate - exact) <=
          4.0 * estimates[g].l2_squared.se);
  }
}

TEST_CASE("ASEP Psi profile: t=0 indicator, mass bound, reflection symmetry") {
  Lattice lat(1, 64);
  AsepSpec right{0.8, 0.2};
  AsepSpec left{0.2, 0.8};

  const PsiAsepEstimate at0 = estimate_Psi_asep(0.5, right, lat, 0.0, -4, 4, 200, 4, 13);
  CHECK(at0.psi_at(0) == doctest::Approx(1.0));
  CHECK(at0.psi_at(1) == doctest::Approx(0.0));
  CHECK(at0.l2_squared.estimate == doctest::Approx(1.0));

  const double t = 4.0;
  const PsiAsepEstimate pr = estimate_Psi_asep(0.5, right, lat, t, -12, 12, 3000, 6, 17);
  const PsiAsepEstimate pl = estimate_Psi_asep(0.5, left, lat, t, -12, 12, 3000, 6, 19);
  CHECK(pr.l2_squared.estimate <= 1.0 + 4.0 * pr.l2_squared.se);
  for (long k = -8; k <= 8; ++k) {
    const double se = std::hypot(pr.se_at(k), pl.se_at(-k));
    if (se == 0.0) {
      CHECK(pr.psi_at(k) == doctest::Approx(pl.psi_at(-k)));
    } else {
      CHECK(std::fabs(pr.psi_at(k) - pl.psi_at(-k)) <= 4.5 * se);
    }
  }
}

TEST_CASE("structure function: t=0 values and the conservation sum rule") {
  Lattice lat(1, 64);
  AsepSpec asep{0.8, 0.2};
  const EstimateWithError s00 = estimate_structure_function(0.5, asep, lat, 0.0, 0, 2000, 23);
  CHECK(s00.estimate == doctest::Approx(1.0));
  const EstimateWithError s03 = estimate_structure_function(0.5, asep, lat, 0.0, 3, 2000, 29);
  CHECK(std::fabs(s03.estimate) <= 3.5 * s03.se);

  const StructureFunctionEstimate prof =
      estimate_structure_function(0.5, asep, lat, 3.0, -16, 16, 6000, 31, 4);
  CHECK(std::fabs(prof.sum_rule.estimate - 1.0) <= 4.0 * prof.sum_rule.se);
}

TEST_CASE("empirical deviation endpoints") {
  Lattice lat(1, 32);
  LocalFunction f = LocalFunction::occupancy(1, Point{});
  ProductMeasureSpec mu;
  const DeviationEstimate all = empirical_deviation(mu, lat, f, sep_simple(), 1.0, 0.0, 500, 4, 37);
  CHECK(all.fraction.estimate == doctest::Approx(1.0));
  // at t=0 with a beyond the range of f the tail is empty
  const DeviationEstimate none = empirical_deviation(mu, lat, f, sep_simple(), 0.0, 1.5, 500, 4, 41);
  CHECK(none.fraction.estimate == doctest::Approx(0.0));
}

TEST_CASE("fit_decay on synthetic data") {
  std::vector<FitPoint> power;
  for (double t : {2.0, 4.0, 8.0, 16.0, 32.0}) power.push_back({t, std::pow(t, -0.5), 0.0});
  const FitResult fp = fit_decay(power, DecayModel::Power);
  CHECK(fp.rate_or_exponent == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(fp.se <= 1e-9);

  std::vector<FitPoint> expo;
  for (double t : {1.0, 2.0, 3.0, 4.0, 6.0}) expo.push_back({t, 2.0 * std::exp(-0.3 * t), 0.0});
  const FitResult fe = fit_decay(expo, DecayModel::Exponential);
  CHECK(fe.rate_or_exponent == doctest::Approx(0.3).epsilon(1e-9));

  std::vector<FitPoint> bad = {{1.0, 1.0, 0.0}, {2.0, -0.5, 0.0}, {3.0, 0.1, 0.0}, {4.0, 0.1, 0.0}};
  CHECK_THROWS_AS(fit_decay(bad, DecayModel::Power), std::invalid_argument);
  std::vector<FitPoint> few = {{1.0, 1.0, 0.0}, {2.0, 0.5, 0.0}, {3.0, 0.3, 0.0}};
  CHECK_THROWS_AS(fit_decay(few, DecayModel::Power), std::invalid_argument);
}

TEST_CASE("fit_decay recovers the d=1 return-probability exponent") {
  std::vector<FitPoint> pts;
  for (double t : {8.0, 16.0, 24.0, 32.0, 48.0, 64.0})
    pts.push_back({t, transition_row(JumpKernel::simple(1), 2.0 * t, 512, 1e-12).origin(), 0.0});
  const FitResult fr = fit_decay(pts, DecayModel::Power);
  CHECK(fr.rate_or_exponent == doctest::Approx(-0.5).epsilon(0.1));
  CHECK(std::fabs(fr.rate_or_exponent + 0.5) < 0.05);
}

TEST_CASE("estimators are reproducible and worker-count invariant") {
  Lattice lat(1, 48);
  ProductMeasureSpec env;
  const PsiEstimate a = estimate_psi(sep_simple(), lat, 2.0, env, 4000, 51, 1);
  const PsiEstimate b = estimate_psi(sep_simple(), lat, 2.0, env, 4000, 51, 4);
  const PsiEstimate c = estimate_psi(sep_simple(), lat, 2.0, env, 4000, 51, 7);
  CHECK((a.kernel.psi == b.kernel.psi).all());
  CHECK((a.kernel.psi == c.kernel.psi).all());
  CHECK(a.l2_squared.estimate == b.l2_squared.estimate);
  CHECK(a.l2_squared.se == c.l2_squared.se);

  LocalFunction f = LocalFunction::occupancy(1, Point{});
  ProductMeasureSpec mu;
  const NestedVarianceEstimate v1 = estimate_var_stf(mu, lat, f, sep_simple(), 1.0, 512, 4, 53, 1);
  const NestedVarianceEstimate v2 = estimate_var_stf(mu, lat, f, sep_simple(), 1.0, 512, 4, 53, 5);
  CHECK(v1.var.estimate == v2.var.estimate);
  CHECK(v1.var.se == v2.var.se);
}
