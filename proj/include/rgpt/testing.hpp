#pragma once

#include <optional>
#include <span>

#include "rgpt/graph.hpp"
#include "rgpt/types.hpp"

namespace rgpt {

enum class ReshapeKind { Identity, BenjaminiYekutieli };

/// x divided by the V-th harmonic number.
double by_reshape(double x, Index V);

/// Threshold reshaping function beta(.); BY divides by the harmonic number
/// to keep FDR control under arbitrary p-value dependence.
struct ReshapingFunction {
  ReshapeKind kind = ReshapeKind::BenjaminiYekutieli;
  Index V = 1;

  double operator()(double x) const {
    return kind == ReshapeKind::Identity ? x : by_reshape(x, V);
  }
};

struct TestDecision {
  Index node = 0;
  bool tested = false;
  std::optional<double> threshold;
  double pvalue = 1.0;
  bool reliable = false;
};

struct DepthRecord {
  Index depth = 0;
  std::vector<Index> candidates;
  Index rejections = 0;            // R chosen at this depth
  Index cumulative_rejections = 0; // R_{1:d}
};

struct DaggerTrace {
  std::vector<TestDecision> decisions;  // one per node
  std::vector<DepthRecord> depths;
};

struct FstConfig {
  Index k = 1;        // failures allowed before testing stops
  double delta = 0.1;
};

/// DAGGER threshold (v_i/V) * delta / beta(m_i + r + R_prev - 1).
double dagger_threshold(double v_i, Index V, double m_i, Index r, Index rejections_prev,
                        double delta, const ReshapingFunction& reshape);

/// Step-up choice of R at one depth: the largest r in [1, level_size] with at
/// least r candidate p-values at or below their thresholds, else 0.
/// Returns R and marks each candidate reliable iff p_i <= delta_i(R).
Index dagger_stepup(std::span<const Index> candidates, const Vector& pvalues, Index level_size,
                    Index rejections_prev, const EffectiveCounts& counts, double delta,
                    const ReshapingFunction& reshape, DaggerTrace& trace);

/// Full DAGGER pass over the graph: depths in order, a node is a candidate
/// only when all its parents were found reliable. Returns the discovered node
/// set (sorted) and a complete audit trace.
std::pair<std::vector<Index>, DaggerTrace> run_dagger(const ReliabilityGraph& graph,
                                                      const Vector& pvalues, double delta,
                                                      ReshapeKind reshape);

/// FST critical values for arbitrary dependence:
/// delta/k for i <= k, (n-k+1) delta / ((n-i+1) k) for i > k.  (1-based i)
Vector fst_thresholds(Index n_total, const FstConfig& cfg);

/// Fixed sequence testing over `ordered` (most reliable first); stops after k
/// failures; returns the passing hyperparameters among the tested prefix.
std::vector<Index> run_fst(std::span<const Index> ordered, const Vector& pvalues,
                           const FstConfig& cfg);

/// Standard Benjamini-Hochberg step-up at level delta.
std::vector<Index> run_bh(const Vector& pvalues, double delta);

}  // namespace rgpt
