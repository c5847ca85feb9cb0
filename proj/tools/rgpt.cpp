// Command-line front end: select (run one method on real risk data),
// validate (Monte Carlo FDR harness), export-graph (re-emit DOT/JSON).

#include <CLI11.hpp>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "rgpt/io.hpp"

using namespace rgpt;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitBadConfig = 2;
constexpr int kExitBadData = 3;

ReshapeKind parse_reshape(const std::string& name) {
  if (name == "by") return ReshapeKind::BenjaminiYekutieli;
  if (name == "identity") return ReshapeKind::Identity;
  throw BadConfig("reshape must be 'by' or 'identity'");
}

std::vector<double> parse_reals(const std::string& csv) {
  std::vector<double> out;
  std::istringstream is(csv);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

std::vector<Index> parse_indices(const std::string& csv) {
  std::vector<Index> out;
  for (double v : parse_reals(csv)) out.push_back(static_cast<Index>(v));
  return out;
}

struct SelectArgs {
  std::string manifest;
  std::string method = "rgpt";
  double delta = 0.1;
  double split = 0.5;
  Index depth = 0;
  double tau = 0.1;
  double pseudocount = -1.0;  // <0: take from manifest
  Index fst_k = 0;
  std::string reshape = "by";
  bool flip_priors = false;
  std::string weights;
  std::uint64_t seed = 0;
  std::string out = "report.json";
  std::string dot;
};

int run_select(const SelectArgs& a) {
  const Manifest manifest = read_manifest(a.manifest);
  SelectionProblem problem;
  const RiskTable table = load_risk_table(manifest, problem);
  problem.delta = a.delta;
  problem.split_fraction = a.split;
  problem.seed = a.seed;

  MethodConfig config;
  config.kind = parse_method(a.method);
  config.depth = a.depth;
  config.tau = a.tau;
  config.fst_k = a.fst_k;
  config.reshape = parse_reshape(a.reshape);
  config.weights = parse_reals(a.weights);
  config.pseudocount = a.pseudocount >= 0.0 ? a.pseudocount : manifest.pseudocount;
  if (!manifest.priors_file.empty() && config.pseudocount > 0.0)
    config.prior_eta =
        read_priors(manifest.priors_file, table.labels, a.flip_priors || manifest.flip_priors);

  const SelectionReport report = run_method(table, problem, config);
  write_text_file(a.out, report_to_json(report).dump(2) + "\n");

  if (!a.dot.empty()) {
    if (!report.graph || !report.counts)
      throw BadData("method '" + a.method + "' produces no graph; cannot write DOT");
    const Vector* scores = report.scores ? &report.scores->s : nullptr;
    write_text_file(a.dot, export_dot(*report.graph, *report.counts, scores,
                                      &report.pvalues_test));
  }
  std::cout << "discovered " << report.discovered.size() << " hyperparameter(s); report written to "
            << a.out << "\n";
  return 0;
}

struct ValidateArgs {
  std::string scenario;
  std::string method = "rgpt";
  Index trials = 500;
  double delta = -1.0;  // <0: take from scenario
  Index depth = 0;
  double tau = 0.1;
  double pseudocount = -1.0;
  Index fst_k = 0;
  std::string reshape = "by";
  std::string sweep_depth_csv;
  std::string corrupt_prior_csv;
  Index jobs = 1;
  std::string out = "validate.json";
  std::string csv;
};

int run_validate(const ValidateArgs& a) {
  const Scenario sc = read_scenario(a.scenario);
  SelectionProblem problem = sc.problem;
  if (a.delta >= 0.0) problem.delta = a.delta;

  MethodConfig config;
  config.kind = parse_method(a.method);
  config.depth = a.depth;
  config.tau = a.tau;
  config.fst_k = a.fst_k;
  config.reshape = parse_reshape(a.reshape);
  config.pseudocount = a.pseudocount >= 0.0 ? a.pseudocount : sc.pseudocount;
  if (sc.use_structured_prior && config.pseudocount > 0.0)
    config.prior_eta = structured_prior(sc.spec, problem);

  ordered_json out_json;
  std::ostringstream csv;

  if (!a.sweep_depth_csv.empty()) {
    const std::vector<Index> depths = parse_indices(a.sweep_depth_csv);
    const std::vector<FdrReport> reports =
        sweep_depth(sc.spec, problem, config, depths, a.trials, a.jobs);
    out_json["sweep"] = "depth";
    ordered_json points = ordered_json::array();
    csv << "depth,trial,n_discovered,n_false,fdp,power\n";
    for (std::size_t i = 0; i < depths.size(); ++i) {
      ordered_json point = fdr_report_to_json(reports[i]);
      point.erase("records");
      point["depth"] = depths[i];
      points.push_back(point);
      std::istringstream body(fdr_report_to_csv(reports[i]));
      std::string line;
      std::getline(body, line);  // drop header
      while (std::getline(body, line)) csv << depths[i] << ',' << line << '\n';
    }
    out_json["points"] = points;
  } else if (!a.corrupt_prior_csv.empty()) {
    if (!config.prior_eta)
      throw BadConfig("prior corruption sweep needs a scenario with a structured prior");
    const std::vector<double> fractions = parse_reals(a.corrupt_prior_csv);
    out_json["sweep"] = "corrupt_prior";
    ordered_json points = ordered_json::array();
    csv << "fraction,trial,n_discovered,n_false,fdp,power\n";
    const PriorSpec base{*config.prior_eta, config.pseudocount};
    for (double f : fractions) {
      MethodConfig c = config;
      c.prior_eta = corrupt_priors(base, f, derive_seed(sc.spec.seed, 0xC0))
                        .eta;
      const FdrReport report = run_trials(sc.spec, problem, c, a.trials, a.jobs);
      ordered_json point = fdr_report_to_json(report);
      point.erase("records");
      point["fraction"] = f;
      points.push_back(point);
      std::istringstream body(fdr_report_to_csv(report));
      std::string line;
      std::getline(body, line);
      while (std::getline(body, line)) csv << f << ',' << line << '\n';
    }
    out_json["points"] = points;
  } else {
    const FdrReport report = run_trials(sc.spec, problem, config, a.trials, a.jobs);
    out_json = fdr_report_to_json(report);
    csv << fdr_report_to_csv(report);
    std::cout << "empirical FDR " << report.mean_fdp << " (target " << problem.delta << "), power "
              << report.mean_power << " over " << report.trials << " trials\n";
  }

  out_json["method"] = a.method;
  write_text_file(a.out, out_json.dump(2) + "\n");
  if (!a.csv.empty()) write_text_file(a.csv, csv.str());
  return 0;
}

struct ExportArgs {
  std::string report;
  std::string dot;
  std::string json;
};

int run_export_graph(const ExportArgs& a) {
  ordered_json j;
  try {
    j = ordered_json::parse(std::ifstream(a.report));
  } catch (const nlohmann::json::parse_error& e) {
    throw BadData(a.report + ": " + std::string(e.what()));
  }
  if (!j.contains("graph")) throw BadData("report contains no graph section");

  const auto& nodes = j["graph"]["nodes"];
  ReliabilityGraph g;
  EffectiveCounts counts;
  const Index n = static_cast<Index>(nodes.size());
  counts.v.resize(n);
  counts.m.resize(n);
  counts.leaf_count = j["graph"]["leaf_count"].get<Index>();
  g.parents.resize(static_cast<std::size_t>(n));
  g.children.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const auto& node = nodes[static_cast<std::size_t>(i)];
    g.node_ids.push_back(node["id"].get<Index>());
    g.node_labels.push_back(node["label"].get<std::string>());
    g.depth_of.push_back(node["depth"].get<Index>());
    g.n_depths = std::max(g.n_depths, g.depth_of.back());
    counts.v[i] = node["v"].get<double>();
    counts.m[i] = node["m"].get<double>();
    for (const auto& p : node["parents"]) {
      g.parents[static_cast<std::size_t>(i)].push_back(p.get<Index>());
      g.children[static_cast<std::size_t>(p.get<Index>())].push_back(i);
    }
  }
  for (auto& c : g.children) std::sort(c.begin(), c.end());

  Vector scores, pvalues;
  const Vector* scores_ptr = nullptr;
  const Vector* pvalues_ptr = nullptr;
  if (j.contains("ranking")) {
    const auto& s = j["ranking"]["scores"];
    scores.resize(static_cast<Index>(s.size()));
    for (Index i = 0; i < scores.size(); ++i) scores[i] = s[static_cast<std::size_t>(i)].get<double>();
    scores_ptr = &scores;
  }
  if (j.contains("pvalues") && j["pvalues"].contains("test")) {
    const auto& p = j["pvalues"]["test"];
    if (static_cast<Index>(p.size()) == n) {
      pvalues.resize(n);
      for (Index i = 0; i < n; ++i) pvalues[i] = p[static_cast<std::size_t>(i)].get<double>();
      pvalues_ptr = &pvalues;
    }
  }

  if (!a.dot.empty()) write_text_file(a.dot, export_dot(g, counts, scores_ptr, pvalues_ptr));
  if (!a.json.empty()) write_text_file(a.json, j["graph"].dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reliability-graph Pareto testing for hyperparameter selection"};
  app.require_subcommand(1);

  SelectArgs sel;
  CLI::App* select = app.add_subcommand("select", "run a selection method on risk data");
  select->add_option("--manifest", sel.manifest, "manifest JSON")->required();
  select->add_option("--method", sel.method, "rgpt | ltt-bh | pt-fst");
  select->add_option("--delta", sel.delta, "FDR level");
  select->add_option("--split", sel.split, "Z_OPT fraction");
  select->add_option("--depth", sel.depth, "RG depth D (0 = default)");
  select->add_option("--tau", sel.tau, "lasso penalty");
  select->add_option("--pseudocount", sel.pseudocount, "prior pseudocount n_p");
  select->add_option("--k", sel.fst_k, "FST stopping budget (0 = default)");
  select->add_option("--reshape", sel.reshape, "by | identity");
  select->add_flag("--flip-priors", sel.flip_priors, "priors use the '1 = more reliable' convention");
  select->add_option("--weights", sel.weights, "scalarization weights, comma separated");
  select->add_option("--seed", sel.seed, "random seed");
  select->add_option("--out", sel.out, "report JSON path");
  select->add_option("--dot", sel.dot, "also write the RG as DOT");

  ValidateArgs val;
  CLI::App* validate = app.add_subcommand("validate", "Monte Carlo FDR validation harness");
  validate->add_option("--scenario", val.scenario, "scenario JSON")->required();
  validate->add_option("--method", val.method, "rgpt | ltt-bh | pt-fst");
  validate->add_option("--trials", val.trials, "trial count");
  validate->add_option("--delta", val.delta, "FDR level override");
  validate->add_option("--depth", val.depth, "RG depth D (0 = default)");
  validate->add_option("--tau", val.tau, "lasso penalty");
  validate->add_option("--pseudocount", val.pseudocount, "prior pseudocount override");
  validate->add_option("--k", val.fst_k, "FST stopping budget (0 = default)");
  validate->add_option("--reshape", val.reshape, "by | identity");
  validate->add_option("--sweep-depth", val.sweep_depth_csv, "comma-separated depth values");
  validate->add_option("--corrupt-prior", val.corrupt_prior_csv, "comma-separated swap fractions");
  validate->add_option("--jobs", val.jobs, "trial-level parallelism");
  validate->add_option("--out", val.out, "report JSON path");
  validate->add_option("--csv", val.csv, "per-trial CSV path");

  ExportArgs exp;
  CLI::App* export_graph = app.add_subcommand("export-graph", "re-emit DOT/JSON from a report");
  export_graph->add_option("--report", exp.report, "report JSON from 'select'")->required();
  export_graph->add_option("--dot", exp.dot, "DOT output path");
  export_graph->add_option("--json", exp.json, "graph JSON output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (select->parsed()) return run_select(sel);
    if (validate->parsed()) return run_validate(val);
    if (export_graph->parsed()) return run_export_graph(exp);
  } catch (const BadConfig& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const BadK& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const BadFraction& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const BadWeights& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const Error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitBadData;
  }
  return 0;
}
