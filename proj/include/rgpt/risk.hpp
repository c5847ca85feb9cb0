#pragma once

#include <span>

#include "rgpt/types.hpp"

namespace rgpt {

/// Checks every RiskTable / SelectionProblem invariant; throws on violation.
void validate_inputs(const RiskTable& table, const SelectionProblem& problem);

/// Uniform random partition of {0..n_samples-1} with |opt| = round(fraction * n).
DataSplit split_data(Index n_samples, double fraction, std::uint64_t seed);

/// Mean of r_l(Z, lambda) over the given sample subset.
double empirical_risk(const RiskTable& table, std::span<const Index> subset, Index hyperparam,
                      Index risk);

/// Hoeffding p-value exp(-2 n ((alpha - rhat)_+)^2); exactly 1 when rhat >= alpha.
double hoeffding_pvalue(double alpha, double empirical_risk, Index n);

/// Combined p-value across constrained risks: the maximum.
double combined_pvalue(std::span<const double> per_risk_pvalues);

/// Combined p-value of one hyperparameter on one split.
double combined_pvalue_for(const RiskTable& table, std::span<const Index> subset, Index hyperparam,
                           const SelectionProblem& problem);

/// Combined p-values for a list of hyperparameters on one split.
Vector combined_pvalues(const RiskTable& table, std::span<const Index> subset,
                        std::span<const Index> hyperparams, const SelectionProblem& problem);

}  // namespace rgpt
