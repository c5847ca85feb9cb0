#include "rgpt/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rgpt {

void validate_inputs(const RiskTable& table, const SelectionProblem& problem) {
  if (table.n_samples < 1 || table.n_hyperparams < 1 || table.n_risks() < 1)
    throw DimensionMismatch("risk table has an empty dimension");
  for (Index l = 0; l < table.n_risks(); ++l) {
    const Matrix& m = table.values[static_cast<std::size_t>(l)];
    if (m.rows() != table.n_samples || m.cols() != table.n_hyperparams)
      throw DimensionMismatch("risk slice " + std::to_string(l) + " has shape " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                              ", expected " + std::to_string(table.n_samples) + "x" +
                              std::to_string(table.n_hyperparams));
    if (!m.allFinite() || m.minCoeff() < 0.0 || m.maxCoeff() > 1.0)
      throw OutOfRangeRisk("risk " + std::to_string(l) + " has a value outside [0,1]");
  }
  if (problem.n_constrained < 1 || problem.n_constrained > table.n_risks())
    throw BadConfig("n_constrained must lie in [1, L]");
  if (problem.alphas.size() != problem.n_constrained)
    throw BadConfig("alphas length does not match n_constrained");
  for (Index l = 0; l < problem.alphas.size(); ++l) {
    const double a = problem.alphas[l];
    if (!(a > 0.0 && a < 1.0)) throw BadConfig("alpha must lie strictly inside (0,1)");
  }
  if (!(problem.delta > 0.0 && problem.delta < 1.0))
    throw BadConfig("delta must lie strictly inside (0,1)");
  if (!(problem.split_fraction > 0.0 && problem.split_fraction < 1.0))
    throw BadConfig("split_fraction must lie strictly inside (0,1)");
}

DataSplit split_data(Index n_samples, double fraction, std::uint64_t seed) {
  if (n_samples < 2) throw TooFewSamples("need at least two samples to split");
  if (!(fraction > 0.0 && fraction < 1.0)) throw BadConfig("split fraction must be in (0,1)");
  const Index n_opt = static_cast<Index>(std::llround(fraction * static_cast<double>(n_samples)));
  if (n_opt < 1 || n_opt >= n_samples)
    throw TooFewSamples("split would leave one side empty");

  std::vector<Index> perm(static_cast<std::size_t>(n_samples));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng(seed);
  // Fisher-Yates with an explicit bounded draw for cross-platform determinism.
  for (Index i = n_samples - 1; i > 0; --i) {
    const Index j = static_cast<Index>(uniform_below(rng, static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }

  DataSplit split;
  split.opt_indices.assign(perm.begin(), perm.begin() + n_opt);
  split.mht_indices.assign(perm.begin() + n_opt, perm.end());
  std::sort(split.opt_indices.begin(), split.opt_indices.end());
  std::sort(split.mht_indices.begin(), split.mht_indices.end());
  return split;
}

double empirical_risk(const RiskTable& table, std::span<const Index> subset, Index hyperparam,
                      Index risk) {
  if (subset.empty()) throw EmptySubset("empirical risk over an empty subset");
  const Matrix& m = table.values[static_cast<std::size_t>(risk)];
  double sum = 0.0;
  for (Index s : subset) sum += m(s, hyperparam);
  return sum / static_cast<double>(subset.size());
}

double hoeffding_pvalue(double alpha, double empirical_risk, Index n) {
  const double gap = std::max(0.0, alpha - empirical_risk);
  return std::exp(-2.0 * static_cast<double>(n) * gap * gap);
}

double combined_pvalue(std::span<const double> per_risk_pvalues) {
  if (per_risk_pvalues.empty()) throw EmptyVector("combined p-value of an empty vector");
  return *std::max_element(per_risk_pvalues.begin(), per_risk_pvalues.end());
}

double combined_pvalue_for(const RiskTable& table, std::span<const Index> subset, Index hyperparam,
                           const SelectionProblem& problem) {
  if (subset.empty()) throw EmptySubset("p-value over an empty subset");
  const Index n = static_cast<Index>(subset.size());
  double p = 0.0;
  for (Index l = 0; l < problem.n_constrained; ++l) {
    const double rhat = empirical_risk(table, subset, hyperparam, l);
    p = std::max(p, hoeffding_pvalue(problem.alphas[l], rhat, n));
  }
  return p;
}

Vector combined_pvalues(const RiskTable& table, std::span<const Index> subset,
                        std::span<const Index> hyperparams, const SelectionProblem& problem) {
  Vector out(static_cast<Index>(hyperparams.size()));
  for (std::size_t i = 0; i < hyperparams.size(); ++i)
    out[static_cast<Index>(i)] = combined_pvalue_for(table, subset, hyperparams[i], problem);
  return out;
}

}  // namespace rgpt
