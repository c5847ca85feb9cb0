#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>

#include "rgpt/pareto.hpp"
#include "rgpt/ranking.hpp"
#include "rgpt/testing.hpp"

namespace rgpt {

enum class MethodKind { Rgpt, LttBh, PtFst };

std::string method_name(MethodKind kind);
MethodKind parse_method(const std::string& name);

/// Per-method knobs; zero-valued depth / fst_k resolve to their defaults
/// (ceil(|front|/5) clamped to [2, |front|-1], and ceil(0.1 n)).
struct MethodConfig {
  MethodKind kind = MethodKind::Rgpt;
  Index depth = 0;
  double tau = 0.1;
  double pseudocount = 0.0;
  std::optional<Matrix> prior_eta;  // full |Lambda| x |Lambda|, subset to the front
  Index fst_k = 0;
  ReshapeKind reshape = ReshapeKind::BenjaminiYekutieli;
  std::vector<double> weights;
};

/// Everything a run produced, sufficient to audit every decision.
struct SelectionReport {
  MethodKind method = MethodKind::Rgpt;
  SelectionProblem problem;
  Index n_samples = 0;
  Index n_hyperparams = 0;
  Index n_risks = 0;
  Index n_opt = 0;
  Index n_mht = 0;

  // resolved configuration
  Index depth = 0;
  double tau = 0.0;
  double pseudocount = 0.0;
  Index fst_k = 0;
  ReshapeKind reshape = ReshapeKind::BenjaminiYekutieli;
  std::vector<double> weights;

  std::optional<ParetoFront> front;
  std::optional<BtScores> scores;
  std::optional<ReliabilityGraph> graph;
  std::optional<EffectiveCounts> counts;
  Vector pvalues_opt;   // per front member (split methods)
  Vector pvalues_test;  // per front member, or per hyperparameter for LTT
  std::optional<DaggerTrace> trace;     // rgpt
  std::vector<Index> fst_order;         // pt: global ids, test order
  Vector fst_levels;                    // pt: critical values by position
  double bh_threshold = 0.0;            // ltt: largest rejected p-value level
  std::vector<std::string> labels;      // per hyperparameter

  std::vector<Index> discovered;  // global hyperparameter indices, sorted
  std::vector<Index> final_pick;  // ranked, subset of discovered
};

SelectionReport run_rgpt(const RiskTable& table, const SelectionProblem& problem,
                         const MethodConfig& config);
SelectionReport run_ltt(const RiskTable& table, const SelectionProblem& problem,
                        const MethodConfig& config);
SelectionReport run_pt(const RiskTable& table, const SelectionProblem& problem,
                       const MethodConfig& config);

/// Dispatch on config.kind.
SelectionReport run_method(const RiskTable& table, const SelectionProblem& problem,
                           const MethodConfig& config);

nlohmann::ordered_json report_to_json(const SelectionReport& report);

}  // namespace rgpt
