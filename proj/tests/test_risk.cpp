#include <doctest.h>

#include <cmath>

#include "rgpt/risk.hpp"

using namespace rgpt;

namespace {

RiskTable make_table(Index n_samples, Index n_hyperparams, Index n_risks, double fill) {
  RiskTable t;
  t.n_samples = n_samples;
  t.n_hyperparams = n_hyperparams;
  for (Index l = 0; l < n_risks; ++l)
    t.values.push_back(Matrix::Constant(n_samples, n_hyperparams, fill));
  return t;
}

SelectionProblem make_problem(Index n_constrained, double alpha = 0.2, double delta = 0.1) {
  SelectionProblem p;
  p.n_constrained = n_constrained;
  p.alphas = Vector::Constant(n_constrained, alpha);
  p.delta = delta;
  return p;
}

}  // namespace

TEST_CASE("validate_inputs accepts 0-1 losses") {
  RiskTable t = make_table(10, 3, 2, 0.0);
  t.values[0](0, 0) = 1.0;
  CHECK_NOTHROW(validate_inputs(t, make_problem(1)));
}

TEST_CASE("validate_inputs rejects out-of-range values") {
  RiskTable t = make_table(10, 3, 2, 0.0);
  t.values[1](4, 2) = 1.5;
  CHECK_THROWS_AS(validate_inputs(t, make_problem(1)), OutOfRangeRisk);
}

TEST_CASE("validate_inputs rejects bad constraint counts and levels") {
  RiskTable t = make_table(10, 3, 2, 0.0);
  CHECK_THROWS_AS(validate_inputs(t, make_problem(3)), BadConfig);  // L_c = L+1
  SelectionProblem p = make_problem(1);
  p.delta = 0.0;
  CHECK_THROWS_AS(validate_inputs(t, p), BadConfig);
  p = make_problem(1);
  p.alphas[0] = 1.0;
  CHECK_THROWS_AS(validate_inputs(t, p), BadConfig);
}

TEST_CASE("validate_inputs rejects inconsistent slices") {
  RiskTable t = make_table(10, 3, 2, 0.0);
  t.values[1] = Matrix::Zero(10, 4);
  CHECK_THROWS_AS(validate_inputs(t, make_problem(1)), DimensionMismatch);
}

TEST_CASE("split_data produces the documented sizes") {
  const DataSplit s = split_data(400, 0.5, 7);
  CHECK(s.opt_indices.size() == 200);
  CHECK(s.mht_indices.size() == 200);

  const DataSplit tiny = split_data(2, 0.5, 3);
  CHECK(tiny.opt_indices.size() == 1);
  CHECK(tiny.mht_indices.size() == 1);
}

TEST_CASE("split_data is deterministic and a partition") {
  const DataSplit a = split_data(101, 0.3, 42);
  const DataSplit b = split_data(101, 0.3, 42);
  CHECK(a.opt_indices == b.opt_indices);
  CHECK(a.mht_indices == b.mht_indices);

  std::vector<bool> seen(101, false);
  for (Index i : a.opt_indices) seen[static_cast<std::size_t>(i)] = true;
  for (Index i : a.mht_indices) {
    CHECK_FALSE(seen[static_cast<std::size_t>(i)]);
    seen[static_cast<std::size_t>(i)] = true;
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](bool x) { return x; }));
}

TEST_CASE("split_data rejects degenerate splits") {
  CHECK_THROWS_AS(split_data(1, 0.5, 0), TooFewSamples);
  CHECK_THROWS_AS(split_data(10, 0.01, 0), TooFewSamples);
}

TEST_CASE("empirical_risk is the subset mean") {
  RiskTable t = make_table(4, 1, 1, 0.0);
  t.values[0] << 0, 1, 1, 0;
  const std::vector<Index> all{0, 1, 2, 3};
  CHECK(empirical_risk(t, all, 0, 0) == doctest::Approx(0.5));

  RiskTable ones = make_table(3, 1, 1, 1.0);
  const std::vector<Index> three{0, 1, 2};
  CHECK(empirical_risk(ones, three, 0, 0) == doctest::Approx(1.0));
  RiskTable zeros = make_table(3, 1, 1, 0.0);
  CHECK(empirical_risk(zeros, three, 0, 0) == doctest::Approx(0.0));

  CHECK_THROWS_AS(empirical_risk(t, std::vector<Index>{}, 0, 0), EmptySubset);
}

TEST_CASE("hoeffding_pvalue matches direct evaluation") {
  CHECK(hoeffding_pvalue(0.2, 0.3, 100) == doctest::Approx(1.0));
  CHECK(hoeffding_pvalue(0.5, 0.3, 50) == doctest::Approx(std::exp(-4.0)).epsilon(1e-12));
  CHECK(hoeffding_pvalue(0.3, 0.0, 10) == doctest::Approx(std::exp(-1.8)).epsilon(1e-12));
}

TEST_CASE("hoeffding_pvalue monotonicity") {
  // non-decreasing in the empirical risk at fixed alpha, n
  double prev = 0.0;
  for (double rhat = 0.0; rhat <= 1.0; rhat += 0.01) {
    const double p = hoeffding_pvalue(0.4, rhat, 200);
    CHECK(p >= prev);
    prev = p;
  }
  // strictly decreasing in n when rhat < alpha
  prev = 2.0;
  for (Index n = 10; n <= 200; n += 10) {
    const double p = hoeffding_pvalue(0.4, 0.2, n);
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("combined_pvalue is the max and attains an element") {
  const std::vector<double> v{0.3, 0.7};
  CHECK(combined_pvalue(v) == doctest::Approx(0.7));
  const std::vector<double> single{0.42};
  CHECK(combined_pvalue(single) == doctest::Approx(0.42));
  const std::vector<double> with_one{1.0, 0.01};
  CHECK(combined_pvalue(with_one) == doctest::Approx(1.0));
  CHECK_THROWS_AS(combined_pvalue(std::vector<double>{}), EmptyVector);

  Rng rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> ps;
    const std::size_t len = 1 + uniform_below(rng, 6);
    for (std::size_t i = 0; i < len; ++i) ps.push_back(1e-6 + uniform01(rng));
    const double c = combined_pvalue(ps);
    bool attained = false;
    for (double p : ps) {
      CHECK(c >= p);
      if (c == p) attained = true;
    }
    CHECK(attained);
  }
}
