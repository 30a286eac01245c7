#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ips/runner.hpp"

using namespace ips;

namespace {

const char* kRwConfig = R"(
kind = rw
seed = 7
lattice.d = 1
lattice.L = 512
times = 1
)";

ResultRow find_row(const ResultBundle& b, const std::string& quantity, double t = -1.0) {
  for (const ResultRow& r : b.rows)
    if (r.quantity == quantity && (t < 0.0 || r.t == t)) return r;
  throw std::runtime_error("row not found: " + quantity);
}

}  // namespace

TEST_CASE("config parsing basics") {
  const ExperimentConfig cfg = ExperimentConfig::from_text(kRwConfig);
  CHECK(cfg.kind == "rw");
  CHECK(cfg.seed == 7);
  CHECK(cfg.workers == 1);
  CHECK(cfg.hash.size() == 16);
}

TEST_CASE("unknown keys are schema errors with paths") {
  const std::string bad = std::string(kRwConfig) + "process.lambda = 0.5\n";
  try {
    ExperimentConfig::from_text(bad);
    FAIL("expected schema violation");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("process.lambda") != std::string::npos);
  }
}

TEST_CASE("missing required keys are reported") {
  try {
    ExperimentConfig::from_text("kind = rw\nseed = 1\nlattice.d = 1\n");
    FAIL("expected schema violation");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("lattice.L") != std::string::npos);
    CHECK(msg.find("times") != std::string::npos);
  }
}

TEST_CASE("empty time grid is a validation error") {
  const char* cfg = "kind = rw\nseed = 1\nlattice.d = 1\nlattice.L = 64\ntimes = \n";
  CHECK_THROWS_AS(run(ExperimentConfig::from_text(cfg)), std::invalid_argument);
}

TEST_CASE("duplicate keys are rejected") {
  CHECK_THROWS_AS(ConfigMap::parse("a = 1\na = 2\n"), std::invalid_argument);
}

TEST_CASE("rw experiment reproduces the Bessel value") {
  const ResultBundle b = run(ExperimentConfig::from_text(kRwConfig));
  const ResultRow r = find_row(b, "p_t00", 1.0);
  CHECK(r.estimate == doctest::Approx(0.4657596).epsilon(1e-6));
}

TEST_CASE("bounds experiment: lp bound equals 1 at the canonical point") {
  const char* cfg = "kind = bounds\nseed = 1\nc = 0.125\nu = 2\nv = 1\np = 2\npsi_u = 1\ndf_v = 1\n";
  const ResultBundle b = run(ExperimentConfig::from_text(cfg));
  CHECK(find_row(b, "lp_bound").estimate == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(find_row(b, "lp_constant").estimate == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("verdict rules") {
  ResultRow r;
  r.quantity = "x";
  r.estimate = 1.0;
  r.se = 0.1;
  r.bound = 1.2;
  r.direction = Direction::Upper;
  CHECK(evaluate(r) == Verdict::Pass);
  r.estimate = 1.25;  // above but within 3 se
  CHECK(evaluate(r) == Verdict::Indeterminate);
  r.estimate = 2.0;
  CHECK(evaluate(r) == Verdict::Fail);
  r.direction = Direction::Lower;
  CHECK(evaluate(r) == Verdict::Pass);
  r.estimate = 0.95;
  CHECK(evaluate(r) == Verdict::Indeterminate);
  r.estimate = 0.0;
  CHECK(evaluate(r) == Verdict::Fail);
  r.direction = Direction::TwoSided;
  r.estimate = 1.15;
  CHECK(evaluate(r) == Verdict::Pass);
  r.estimate = 2.0;
  CHECK(evaluate(r) == Verdict::Fail);
  r.direction = Direction::Info;
  CHECK(evaluate(r) == Verdict::Info);
  ResultRow nb;
  nb.direction = Direction::Upper;  // no bound attached
  CHECK(evaluate(nb) == Verdict::Info);
}

TEST_CASE("csv is deterministic and carries the exact column set") {
  const ResultBundle a = run(ExperimentConfig::from_text(kRwConfig));
  const ResultBundle b = run(ExperimentConfig::from_text(kRwConfig));
  CHECK(a.csv() == b.csv());
  CHECK(a.csv().rfind("quantity,t,k,estimate,se,bound,bound_name,config_hash,seed\n", 0) == 0);
}

TEST_CASE("worker count does not change any number") {
  const char* cfg = R"(
kind = sep
seed = 99
lattice.L = 32
rho = 0.5
times = 1
n_psi = 2000
n_outer = 400
n_inner = 6
psi_window = 6
)";
  ExperimentConfig c1 = ExperimentConfig::from_text(cfg);
  ExperimentConfig c4 = ExperimentConfig::from_text(cfg);
  c4.override_workers(4);
  const ResultBundle b1 = run(c1);
  const ResultBundle b4 = run(c4);
  CHECK(b1.csv() == b4.csv());
  CHECK(b1.config_hash == b4.config_hash);  // workers excluded from the hash
}

TEST_CASE("merge pools replica chunks deterministically") {
  const char* base = R"(
kind = voter
seed = 4242
lattice.L = 32
times = 1
n_psi = 3000
)";
  ExperimentConfig c0 = ExperimentConfig::from_text(std::string(base) + "chunk = 0\n");
  ExperimentConfig c1 = ExperimentConfig::from_text(std::string(base) + "chunk = 1\n");
  ExperimentConfig c2 = ExperimentConfig::from_text(std::string(base) + "chunk = 2\n");
  const ResultBundle b0 = run(c0), b1 = run(c1), b2 = run(c2);
  CHECK(b0.config_hash == b1.config_hash);

  // single partial is the identity
  const ResultBundle solo = merge({b0});
  CHECK(solo.csv() == b0.csv());

  // permutations give byte-identical bundles
  const ResultBundle m1 = merge({b0, b1, b2});
  const ResultBundle m2 = merge({b2, b0, b1});
  CHECK(m1.csv() == m2.csv());

  // counts add over disjoint chunks
  const ResultRow pooled = find_row(m1, "psi_l2sq", 1.0);
  const ResultRow part = find_row(b0, "psi_l2sq", 1.0);
  CHECK(pooled.n == 3 * part.n);
  // pooled estimate is the replica-weighted mean
  const double expect = (find_row(b0, "psi_l2sq", 1.0).estimate +
                         find_row(b1, "psi_l2sq", 1.0).estimate +
                         find_row(b2, "psi_l2sq", 1.0).estimate) /
                        3.0;
  CHECK(pooled.estimate == doctest::Approx(expect).epsilon(1e-12));

  // duplicate chunks, foreign bundles, and full-run mixtures are rejected
  CHECK_THROWS_AS(merge({b0, b0}), std::invalid_argument);
  ResultBundle foreign = b1;
  foreign.config_hash = "deadbeefdeadbeef";
  CHECK_THROWS_AS(merge({b0, foreign}), std::invalid_argument);
  ExperimentConfig full_cfg = ExperimentConfig::from_text(base);
  const ResultBundle full = run(full_cfg);
  CHECK_THROWS_AS(merge({full, b1}), std::invalid_argument);
}

TEST_CASE("local function literals parse in both dimensions") {
  ConfigMap m = ConfigMap::parse("f.sites = 0,2\nf.values = 0,1,2,3\n");
  const LocalFunction f1 = parse_local_function(m, "f", 1);
  CHECK(f1.arity() == 2);
  CHECK(f1.sites()[1] == make_point({2}));
  CHECK(f1.eval_bits(3) == doctest::Approx(3.0));

  ConfigMap m2 = ConfigMap::parse("g.sites = (0 0),(1 -1)\ng.values = 0,0.5,1,1.5\n");
  const LocalFunction f2 = parse_local_function(m2, "g", 2);
  CHECK(f2.arity() == 2);
  CHECK(f2.sites()[1] == make_point({1, -1}));
}

TEST_CASE("seed override changes the hash, reruns stay identical") {
  ExperimentConfig a = ExperimentConfig::from_text(kRwConfig);
  ExperimentConfig b = ExperimentConfig::from_text(kRwConfig);
  b.override_seed(123456);
  CHECK(a.hash != b.hash);
  CHECK(run(b).csv() == run(b).csv());
}
