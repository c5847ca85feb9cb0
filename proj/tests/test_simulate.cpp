#include <doctest.h>

#include "helpers.hpp"
#include "rgpt/simulate.hpp"

using namespace rgpt;
using testutil::make_graph;

namespace {

SyntheticSpec basic_spec(std::initializer_list<double> means, Index n_samples,
                         std::uint64_t seed = 1) {
  SyntheticSpec spec;
  spec.constrained_means = Matrix(static_cast<Index>(means.size()), 1);
  Index i = 0;
  for (double m : means) spec.constrained_means(i++, 0) = m;
  spec.aux_means = Matrix(static_cast<Index>(means.size()), 0);
  spec.n_samples = n_samples;
  spec.seed = seed;
  return spec;
}

SelectionProblem problem_at(double alpha, double delta = 0.1) {
  SelectionProblem p;
  p.n_constrained = 1;
  p.alphas = Vector::Constant(1, alpha);
  p.delta = delta;
  return p;
}

}  // namespace

TEST_CASE("validate_spec rejects malformed specs") {
  SyntheticSpec s = basic_spec({0.2}, 10);
  CHECK_NOTHROW(validate_spec(s));

  s.n_samples = 1;
  CHECK_THROWS_AS(validate_spec(s), BadConfig);

  s = basic_spec({1.2}, 10);
  CHECK_THROWS_AS(validate_spec(s), BadConfig);

  s = basic_spec({0.2, 0.3}, 10);
  s.aux_means = Matrix::Constant(3, 1, 0.1);
  CHECK_THROWS_AS(validate_spec(s), DimensionMismatch);

  s = basic_spec({0.2}, 10);
  s.rho = 1.5;
  CHECK_THROWS_AS(validate_spec(s), BadConfig);
}

TEST_CASE("gen_synthetic honors degenerate means exactly") {
  const RiskTable zeros = gen_synthetic(basic_spec({0.0, 0.0}, 50));
  CHECK(zeros.values[0].isZero(0.0));
  const RiskTable ones = gen_synthetic(basic_spec({1.0}, 50));
  CHECK(ones.values[0].isOnes());
}

TEST_CASE("gen_synthetic hits the requested means at scale") {
  const RiskTable t = gen_synthetic(basic_spec({0.3, 0.7}, 100000, 3));
  CHECK(t.values[0].col(0).mean() == doctest::Approx(0.3).epsilon(0.02));
  CHECK(t.values[0].col(1).mean() == doctest::Approx(0.7).epsilon(0.02));
}

TEST_CASE("gen_synthetic is seed-deterministic") {
  const SyntheticSpec s = basic_spec({0.4, 0.2}, 500, 7);
  const RiskTable a = gen_synthetic(s, 7);
  const RiskTable b = gen_synthetic(s, 7);
  CHECK(a.values[0] == b.values[0]);
  const RiskTable c = gen_synthetic(s, 8);
  CHECK(a.values[0] != c.values[0]);
}

TEST_CASE("shared noise couples losses monotonically at rho = 1") {
  SyntheticSpec s = basic_spec({0.2, 0.6}, 2000, 5);
  s.correlation = SyntheticSpec::Correlation::SharedNoise;
  s.rho = 1.0;
  const RiskTable t = gen_synthetic(s);
  // the same shared uniform drives every column, so a loss at the low-mean
  // hyperparameter forces a loss at the high-mean one
  for (Index i = 0; i < t.n_samples; ++i)
    CHECK(t.values[0](i, 0) <= t.values[0](i, 1));
}

TEST_CASE("true_reliability compares means against alphas") {
  const SyntheticSpec s = basic_spec({0.1, 0.3, 0.5}, 100);
  const std::vector<bool> r = true_reliability(s, problem_at(0.3));
  CHECK(r == std::vector<bool>{true, true, false});  // boundary mean is reliable
}

TEST_CASE("run_trials on a null-free scenario has zero FDP and high power") {
  const SyntheticSpec s = basic_spec({0.05, 0.05, 0.05}, 300, 11);
  MethodConfig cfg;
  cfg.kind = MethodKind::LttBh;
  const FdrReport rep = run_trials(s, problem_at(0.4), cfg, 20);
  CHECK(rep.trials == 20);
  CHECK(rep.mean_fdp == 0.0);
  CHECK(rep.mean_power > 0.9);
  for (const TrialOutcome& r : rep.records) CHECK(r.n_false == 0);
}

TEST_CASE("run_trials guards the FDP denominator when nothing is discovered") {
  const SyntheticSpec s = basic_spec({0.9, 0.9}, 100, 13);
  MethodConfig cfg;
  cfg.kind = MethodKind::Rgpt;
  const FdrReport rep = run_trials(s, problem_at(0.2), cfg, 10);
  for (const TrialOutcome& r : rep.records) {
    CHECK(r.n_discovered == 0);
    CHECK(r.fdp == 0.0);
    CHECK(r.power == 0.0);
  }
}

TEST_CASE("run_trials results do not depend on the thread count") {
  const SyntheticSpec s = basic_spec({0.1, 0.2, 0.3, 0.4}, 200, 17);
  MethodConfig cfg;
  cfg.kind = MethodKind::Rgpt;
  const FdrReport serial = run_trials(s, problem_at(0.3), cfg, 12, 1);
  const FdrReport parallel = run_trials(s, problem_at(0.3), cfg, 12, 4);
  REQUIRE(serial.records.size() == parallel.records.size());
  for (std::size_t i = 0; i < serial.records.size(); ++i) {
    CHECK(serial.records[i].n_discovered == parallel.records[i].n_discovered);
    CHECK(serial.records[i].fdp == parallel.records[i].fdp);
    CHECK(serial.records[i].power == parallel.records[i].power);
  }
  CHECK(serial.mean_fdp == parallel.mean_fdp);
}

TEST_CASE("sweep_depth reuses the same synthetic tables at every depth") {
  const SyntheticSpec s = basic_spec({0.1, 0.2, 0.3}, 150, 19);
  MethodConfig cfg;
  cfg.kind = MethodKind::LttBh;  // depth is ignored, so every point must match
  const std::vector<Index> depths{1, 2, 3};
  const auto reports = sweep_depth(s, problem_at(0.3), cfg, depths, 8);
  REQUIRE(reports.size() == 3);
  for (const FdrReport& r : reports) {
    CHECK(r.mean_fdp == reports[0].mean_fdp);
    CHECK(r.mean_power == reports[0].mean_power);
  }
}

TEST_CASE("corrupt_priors endpoints and invariants") {
  PriorSpec prior = PriorSpec::none(4);
  Rng rng(23);
  for (Index i = 0; i < 4; ++i)
    for (Index j = i + 1; j < 4; ++j) {
      prior.eta(i, j) = uniform01(rng);
      prior.eta(j, i) = 1.0 - prior.eta(i, j);
    }

  const PriorSpec same = corrupt_priors(prior, 0.0, 99);
  CHECK(same.eta == prior.eta);

  const PriorSpec flipped = corrupt_priors(prior, 1.0, 99);
  CHECK(flipped.eta == prior.eta.transpose().eval());

  const PriorSpec half = corrupt_priors(prior, 0.5, 7);
  CHECK_NOTHROW(validate_prior(half));
  CHECK(corrupt_priors(prior, 0.5, 7).eta == half.eta);

  CHECK_THROWS_AS(corrupt_priors(prior, 1.5, 0), BadFraction);
}

TEST_CASE("structured_prior points toward the larger constraint slack") {
  SyntheticSpec s = basic_spec({0.1, 0.3, 0.3}, 100);
  const Matrix eta = structured_prior(s, problem_at(0.4));
  CHECK(eta(0, 1) == 0.0);  // item 0 has more slack, oriented as "more reliable"
  CHECK(eta(1, 0) == 1.0);
  CHECK(eta(1, 2) == 0.5);  // equal slack stays neutral
  CHECK(eta(0, 0) == 0.5);
}

TEST_CASE("oracle_dagger sanity and size limit") {
  const ReliabilityGraph single = make_graph({1}, {});
  Vector p(1);
  p << 0.05;
  CHECK(oracle_dagger(single, p, 0.1, ReshapeKind::Identity) == std::vector<Index>{0});
  p << 0.2;
  CHECK(oracle_dagger(single, p, 0.1, ReshapeKind::Identity).empty());

  const ReliabilityGraph big =
      make_graph(std::vector<Index>(13, 1), {});
  CHECK_THROWS_AS(oracle_dagger(big, Vector::Zero(13), 0.1, ReshapeKind::Identity), TooLarge);
}
