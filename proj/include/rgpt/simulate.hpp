#pragma once

#include "rgpt/pipeline.hpp"

namespace rgpt {

/// Ground-truth generator spec: Bernoulli losses with known means, optionally
/// coupled across hyperparameters through a shared per-sample uniform.
struct SyntheticSpec {
  Matrix constrained_means;  // H x L_c, entries in [0,1]
  Matrix aux_means;          // H x L_aux (zero columns allowed)
  enum class Correlation { Independent, SharedNoise } correlation = Correlation::Independent;
  double rho = 0.0;  // shared-noise weight in [0,1]
  Index n_samples = 0;
  std::uint64_t seed = 0;

  Index n_hyperparams() const { return constrained_means.rows(); }
};

void validate_spec(const SyntheticSpec& spec);

RiskTable gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

inline RiskTable gen_synthetic(const SyntheticSpec& spec) { return gen_synthetic(spec, spec.seed); }

struct TrialOutcome {
  Index trial = 0;
  Index n_discovered = 0;
  Index n_false = 0;
  double fdp = 0.0;
  double power = 0.0;
};

struct FdrReport {
  Index trials = 0;
  double mean_fdp = 0.0;  // empirical FDR
  double se_fdp = 0.0;
  double mean_power = 0.0;
  double se_power = 0.0;
  double delta = 0.0;
  std::vector<TrialOutcome> records;  // sorted by trial index
};

/// True reliability labels from the spec means: reliable iff every constrained
/// mean is at or below its alpha.
std::vector<bool> true_reliability(const SyntheticSpec& spec, const SelectionProblem& problem);

/// Runs `trials` independent pipeline runs on fresh synthetic tables and
/// aggregates FDP/power against ground truth. `jobs` splits trials across
/// threads; results are identical for any jobs value.
FdrReport run_trials(const SyntheticSpec& spec, const SelectionProblem& problem,
                     const MethodConfig& config, Index trials, Index jobs = 1);

/// run_trials for each depth value, reusing identical synthetic tables
/// (same seeds) across depths.
std::vector<FdrReport> sweep_depth(const SyntheticSpec& spec, const SelectionProblem& problem,
                                   const MethodConfig& config, std::span<const Index> depth_values,
                                   Index trials, Index jobs = 1);

/// Swaps eta_ij and eta_ji independently per unordered pair with probability f.
PriorSpec corrupt_priors(const PriorSpec& prior, double f, std::uint64_t seed);

/// Pairwise prior derived from the true means, in the same orientation as the
/// data-driven probabilities (0 = row item more reliable).
Matrix structured_prior(const SyntheticSpec& spec, const SelectionProblem& problem);

/// Straight-from-definitions re-derivation of the DAG testing procedure,
/// deliberately sharing no code with run_dagger. Limited to 12 nodes.
std::vector<Index> oracle_dagger(const ReliabilityGraph& graph, const Vector& pvalues,
                                 double delta, ReshapeKind reshape);

}  // namespace rgpt
