#pragma once

#include <span>

#include "rgpt/types.hpp"

namespace rgpt {

/// Non-dominated hyperparameters under the empirical risks on one split.
struct ParetoFront {
  std::vector<Index> members;  // ascending hyperparameter indices
  Matrix risks;                // |members| x L, row i = risks of members[i]
};

/// Weak dominance with at least one strict coordinate (risks negatively
/// oriented: smaller is better).
bool dominates(const Vector& a, const Vector& b);

/// Exact O(n^2) dominance filter over empirical risks on `subset`.
/// Equal-risk duplicates are all retained.
ParetoFront pareto_front(const RiskTable& table, std::span<const Index> subset,
                         const SelectionProblem& problem);

/// Final multi-objective pick over the discovered set using auxiliary risk
/// estimates on `subset`. One auxiliary risk: argmin (ties by index). Several:
/// the Pareto subset under auxiliary risks, ranked by `weights` when given.
/// No auxiliary risks: the discovered set in index order.
std::vector<Index> final_selection(std::span<const Index> discovered, const RiskTable& table,
                                   std::span<const Index> subset, const SelectionProblem& problem,
                                   std::span<const double> weights = {});

}  // namespace rgpt
