#pragma once

#include <filesystem>
#include <nlohmann/json_fwd.hpp>
#include <string>

#include "rgpt/pipeline.hpp"
#include "rgpt/simulate.hpp"

namespace rgpt {

/// One constrained or auxiliary risk entry from the manifest.
struct RiskEntry {
  std::string name;
  std::filesystem::path file;
  bool constrained = false;
  double alpha = 0.0;  // required iff constrained
};

/// Parsed manifest: risk CSVs plus optional priors.
struct Manifest {
  std::vector<RiskEntry> risks;  // constrained first, original order otherwise
  std::filesystem::path priors_file;  // empty when absent
  double pseudocount = 0.0;
  bool flip_priors = false;
};

Manifest read_manifest(const std::filesystem::path& path);

/// Loads every risk CSV of a manifest into a RiskTable (constrained risks
/// first) and fills alphas/n_constrained on the problem.
RiskTable load_risk_table(const Manifest& manifest, SelectionProblem& problem);

/// One risk CSV: header row of hyperparameter labels, one row per sample.
Matrix read_risk_csv(const std::filesystem::path& path, std::vector<std::string>& labels);

/// Priors CSV, square (header of labels) or triplet `i,j,eta`; missing pairs
/// default to 0.5. `flip` converts "1 = more reliable" priors into the
/// data-probability orientation by transposing preferences.
Matrix read_priors(const std::filesystem::path& path, const std::vector<std::string>& labels,
                   bool flip);

/// Scenario JSON -> synthetic spec + problem (+ optional structured prior).
struct Scenario {
  SyntheticSpec spec;
  SelectionProblem problem;
  bool use_structured_prior = false;
  double pseudocount = 0.0;
};

Scenario read_scenario(const std::filesystem::path& path);

nlohmann::ordered_json fdr_report_to_json(const FdrReport& report);

/// Flat per-trial CSV (one row per trial) for external plotting.
std::string fdr_report_to_csv(const FdrReport& report);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace rgpt
