#pragma once

#include <optional>
#include <span>
#include <string>

#include "rgpt/ranking.hpp"
#include "rgpt/types.hpp"

namespace rgpt {

/// DAG over the Pareto-front hyperparameters. Nodes are positions
/// 0..n-1 into `node_ids`; every edge goes from depth d-1 to depth d.
struct ReliabilityGraph {
  std::vector<Index> node_ids;               // node -> hyperparameter index
  std::vector<std::string> node_labels;      // node -> display label
  std::vector<Index> depth_of;               // node -> depth in [1, D]
  std::vector<std::vector<Index>> parents;   // node -> parent nodes (sorted)
  std::vector<std::vector<Index>> children;  // node -> child nodes (sorted)
  Index n_depths = 0;

  Index size() const { return static_cast<Index>(node_ids.size()); }
  std::vector<Index> nodes_at_depth(Index d) const;
};

/// Effective leaf/node weights for the DAGGER thresholds, computed
/// recursively from leaves to roots.
struct EffectiveCounts {
  Vector v;            // effective leaves per node
  Vector m;            // effective nodes per node
  Index leaf_count;    // V: number of actual leaf nodes
};

struct LassoSolution {
  Vector beta;               // non-negative coefficients
  double objective = 0.0;    // value of the penalized objective at beta
  std::vector<Index> active; // indices with beta > 0
  Index sweeps = 0;
};

/// Non-negative Lasso  min_{beta >= 0} ||y - X beta||^2 + tau * sum(beta),
/// solved by cyclic coordinate descent with non-negative soft-thresholding.
/// No intercept, no standardization.
LassoSolution nonneg_lasso(const Matrix& X, const Vector& y, double tau);

/// Stacked-design overload matching the per-sample risk layout: targets is
/// n x L_c for the child, features is one n x L_c matrix per candidate parent.
LassoSolution nonneg_lasso(const Matrix& targets, const std::vector<Matrix>& features, double tau);

/// KKT residual of a candidate solution: max over coordinates of the
/// violation of the stationarity conditions (test hook).
double lasso_kkt_residual(const Matrix& X, const Vector& y, double tau, const Vector& beta);

/// Learns the RG edges level by level via non-negative Lasso on the
/// constrained risks over the Z_OPT samples. Nodes whose Lasso active set is
/// empty fall back to the maximally correlated previous-level node.
ReliabilityGraph learn_edges(const RiskTable& table, std::span<const Index> subset,
                             std::span<const Index> front_members, const DepthAssignment& depths,
                             Index n_constrained, double tau);

EffectiveCounts effective_counts(const ReliabilityGraph& graph);

/// Deterministic DOT rendering; nodes annotated with depth and, when given,
/// scores and p-values.
std::string export_dot(const ReliabilityGraph& graph, const EffectiveCounts& counts,
                       const Vector* scores = nullptr, const Vector* pvalues = nullptr);

}  // namespace rgpt
