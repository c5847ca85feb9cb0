#pragma once

#include "rgpt/types.hpp"

namespace rgpt {

/// Pairwise prior probabilities eta_ij with antisymmetry eta_ji = 1 - eta_ij,
/// weighted by a pseudocount. pseudocount = 0 means "no prior".
struct PriorSpec {
  Matrix eta;                // square, entries in [0,1], diagonal ignored
  double pseudocount = 0.0;  // n_p >= 0

  static PriorSpec none(Index n) { return PriorSpec{Matrix::Constant(n, n, 0.5), 0.0}; }
};

/// Throws unless eta is square with entries in [0,1] and eta_ji = 1 - eta_ij.
void validate_prior(const PriorSpec& prior);

struct PairwiseCounts {
  Matrix w;  // non-negative, zero diagonal
};

struct BtScores {
  Vector s;  // positive, sums to 1
  bool converged = false;
  bool degenerate = false;  // some item had zero total involvement
  Index iterations = 0;
  std::vector<double> loglik_path;  // per-iteration Eq-(11) log-likelihood
};

/// Partition of the items into D depth clusters, ordered ascending by score
/// (lowest score = highest expected reliability = depth 1).
struct DepthAssignment {
  std::vector<std::vector<Index>> clusters;  // clusters[d-1] = items at depth d
  std::vector<Index> depth_of;               // item -> depth in [1, D]

  Index depth() const { return static_cast<Index>(clusters.size()); }
};

/// Data-driven probability p_i / (p_i + p_j); 0.5 when both are zero.
double data_prob(double p_i, double p_j);

/// w_ij = n_opt * data_prob(p_i, p_j) + n_p * eta_ij, zero diagonal.
PairwiseCounts pairwise_counts(const Vector& pvalues_opt, const PriorSpec& prior, Index n_opt);

/// Bradley-Terry maximum likelihood via Hunter's MM iteration.
BtScores fit_bt_mm(const PairwiseCounts& counts, double tol = 1e-8, Index max_iter = 1000);

/// Log-likelihood of Eq-(11) form at the given scores (test hook).
double bt_loglik(const Matrix& w, const Vector& s);

/// Agglomerative average-linkage clustering of the scalar scores into D
/// clusters; D > n is clamped to n.
DepthAssignment cluster_depths(const BtScores& scores, Index D);

}  // namespace rgpt
