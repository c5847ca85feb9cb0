#include "rgpt/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

#include "rgpt/risk.hpp"

namespace rgpt {

using ordered_json = nlohmann::ordered_json;

std::string method_name(MethodKind kind) {
  switch (kind) {
    case MethodKind::Rgpt: return "rgpt";
    case MethodKind::LttBh: return "ltt-bh";
    case MethodKind::PtFst: return "pt-fst";
  }
  return "rgpt";
}

MethodKind parse_method(const std::string& name) {
  if (name == "rgpt") return MethodKind::Rgpt;
  if (name == "ltt-bh" || name == "ltt") return MethodKind::LttBh;
  if (name == "pt-fst" || name == "pt") return MethodKind::PtFst;
  throw BadConfig("unknown method '" + name + "'");
}

namespace {

Index default_depth(Index front_size) {
  if (front_size < 3) return 1;
  const Index d = static_cast<Index>(std::ceil(static_cast<double>(front_size) / 5.0));
  return std::clamp<Index>(d, 2, front_size - 1);
}

Index default_fst_k(Index n) {
  return std::max<Index>(1, static_cast<Index>(std::ceil(0.1 * static_cast<double>(n))));
}

PriorSpec prior_for_front(const MethodConfig& config, std::span<const Index> members,
                          Index n_hyperparams) {
  const Index m = static_cast<Index>(members.size());
  if (!config.prior_eta || config.pseudocount == 0.0) return PriorSpec::none(m);
  const Matrix& full = *config.prior_eta;
  if (full.rows() != n_hyperparams || full.cols() != n_hyperparams)
    throw PriorShapeMismatch("prior matrix must be |Lambda| x |Lambda|");
  Matrix sub(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      sub(i, j) = full(members[static_cast<std::size_t>(i)], members[static_cast<std::size_t>(j)]);
  PriorSpec prior{std::move(sub), config.pseudocount};
  validate_prior(prior);
  return prior;
}

void fill_common(SelectionReport& rep, const RiskTable& table, const SelectionProblem& problem,
                 const MethodConfig& config) {
  rep.problem = problem;
  rep.n_samples = table.n_samples;
  rep.n_hyperparams = table.n_hyperparams;
  rep.n_risks = table.n_risks();
  rep.tau = config.tau;
  rep.pseudocount = config.pseudocount;
  rep.reshape = config.reshape;
  rep.weights = config.weights;
  for (Index h = 0; h < table.n_hyperparams; ++h) rep.labels.push_back(table.label_of(h));
}

}  // namespace

SelectionReport run_rgpt(const RiskTable& table, const SelectionProblem& problem,
                         const MethodConfig& config) {
  validate_inputs(table, problem);
  SelectionReport rep;
  rep.method = MethodKind::Rgpt;
  fill_common(rep, table, problem, config);

  const DataSplit split = split_data(table.n_samples, problem.split_fraction, problem.seed);
  rep.n_opt = static_cast<Index>(split.opt_indices.size());
  rep.n_mht = static_cast<Index>(split.mht_indices.size());

  ParetoFront front = pareto_front(table, split.opt_indices, problem);
  rep.pvalues_opt = combined_pvalues(table, split.opt_indices, front.members, problem);

  const PriorSpec prior = prior_for_front(config, front.members, table.n_hyperparams);
  const PairwiseCounts wcounts = pairwise_counts(rep.pvalues_opt, prior, rep.n_opt);
  BtScores scores = fit_bt_mm(wcounts);

  rep.depth = config.depth > 0 ? std::min(config.depth, static_cast<Index>(front.members.size()))
                               : default_depth(static_cast<Index>(front.members.size()));
  const DepthAssignment depths = cluster_depths(scores, rep.depth);

  ReliabilityGraph graph = learn_edges(table, split.opt_indices, front.members, depths,
                                       problem.n_constrained, config.tau);
  rep.counts = effective_counts(graph);

  rep.pvalues_test = combined_pvalues(table, split.mht_indices, front.members, problem);
  auto [nodes, trace] = run_dagger(graph, rep.pvalues_test, problem.delta, config.reshape);

  for (Index node : nodes)
    rep.discovered.push_back(graph.node_ids[static_cast<std::size_t>(node)]);
  std::sort(rep.discovered.begin(), rep.discovered.end());
  rep.final_pick =
      final_selection(rep.discovered, table, split.opt_indices, problem, config.weights);

  rep.front = std::move(front);
  rep.scores = std::move(scores);
  rep.graph = std::move(graph);
  rep.trace = std::move(trace);
  return rep;
}

SelectionReport run_ltt(const RiskTable& table, const SelectionProblem& problem,
                        const MethodConfig& config) {
  validate_inputs(table, problem);
  SelectionReport rep;
  rep.method = MethodKind::LttBh;
  fill_common(rep, table, problem, config);
  rep.n_opt = 0;
  rep.n_mht = table.n_samples;

  std::vector<Index> all(static_cast<std::size_t>(table.n_samples));
  std::iota(all.begin(), all.end(), Index{0});
  std::vector<Index> hypers(static_cast<std::size_t>(table.n_hyperparams));
  std::iota(hypers.begin(), hypers.end(), Index{0});

  rep.pvalues_test = combined_pvalues(table, all, hypers, problem);
  rep.discovered = run_bh(rep.pvalues_test, problem.delta);
  rep.bh_threshold = static_cast<double>(rep.discovered.size()) * problem.delta /
                     static_cast<double>(table.n_hyperparams);
  rep.final_pick = final_selection(rep.discovered, table, all, problem, config.weights);
  return rep;
}

SelectionReport run_pt(const RiskTable& table, const SelectionProblem& problem,
                       const MethodConfig& config) {
  validate_inputs(table, problem);
  SelectionReport rep;
  rep.method = MethodKind::PtFst;
  fill_common(rep, table, problem, config);

  const DataSplit split = split_data(table.n_samples, problem.split_fraction, problem.seed);
  rep.n_opt = static_cast<Index>(split.opt_indices.size());
  rep.n_mht = static_cast<Index>(split.mht_indices.size());

  ParetoFront front = pareto_front(table, split.opt_indices, problem);
  rep.pvalues_opt = combined_pvalues(table, split.opt_indices, front.members, problem);
  rep.pvalues_test = combined_pvalues(table, split.mht_indices, front.members, problem);

  // Linear test order: ascending Z_OPT combined p-value, ties by index.
  std::vector<Index> order(front.members.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return rep.pvalues_opt[a] < rep.pvalues_opt[b]; });

  const Index n_front = static_cast<Index>(front.members.size());
  rep.fst_k = config.fst_k > 0 ? std::min(config.fst_k, n_front) : default_fst_k(n_front);
  const FstConfig fst_cfg{rep.fst_k, problem.delta};
  rep.fst_levels = fst_thresholds(n_front, fst_cfg);
  const std::vector<Index> positions = run_fst(order, rep.pvalues_test, fst_cfg);

  for (Index pos : positions)
    rep.discovered.push_back(front.members[static_cast<std::size_t>(pos)]);
  std::sort(rep.discovered.begin(), rep.discovered.end());
  for (Index pos : order) rep.fst_order.push_back(front.members[static_cast<std::size_t>(pos)]);
  rep.final_pick =
      final_selection(rep.discovered, table, split.opt_indices, problem, config.weights);

  rep.front = std::move(front);
  return rep;
}

SelectionReport run_method(const RiskTable& table, const SelectionProblem& problem,
                           const MethodConfig& config) {
  switch (config.kind) {
    case MethodKind::Rgpt: return run_rgpt(table, problem, config);
    case MethodKind::LttBh: return run_ltt(table, problem, config);
    case MethodKind::PtFst: return run_pt(table, problem, config);
  }
  throw BadConfig("unknown method kind");
}

namespace {

ordered_json vec_json(const Vector& v) {
  ordered_json arr = ordered_json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

template <typename T>
ordered_json idx_json(const std::vector<T>& v) {
  ordered_json arr = ordered_json::array();
  for (const T& x : v) arr.push_back(x);
  return arr;
}

}  // namespace

ordered_json report_to_json(const SelectionReport& rep) {
  ordered_json j;
  j["method"] = method_name(rep.method);

  ordered_json cfg;
  cfg["delta"] = rep.problem.delta;
  cfg["n_constrained"] = rep.problem.n_constrained;
  cfg["alphas"] = vec_json(rep.problem.alphas);
  cfg["split_fraction"] = rep.problem.split_fraction;
  cfg["seed"] = rep.problem.seed;
  cfg["depth"] = rep.depth;
  cfg["pseudocount"] = rep.pseudocount;
  cfg["tau"] = rep.tau;
  cfg["fst_k"] = rep.fst_k;
  cfg["reshape"] = rep.reshape == ReshapeKind::Identity ? "identity" : "by";
  cfg["weights"] = idx_json(rep.weights);
  j["config"] = cfg;

  j["n_samples"] = rep.n_samples;
  j["n_hyperparams"] = rep.n_hyperparams;
  j["n_risks"] = rep.n_risks;
  j["split"] = ordered_json{{"n_opt", rep.n_opt}, {"n_mht", rep.n_mht}};

  if (rep.front) {
    ordered_json front;
    front["members"] = idx_json(rep.front->members);
    ordered_json risks = ordered_json::array();
    for (Index i = 0; i < rep.front->risks.rows(); ++i)
      risks.push_back(vec_json(rep.front->risks.row(i)));
    front["risks"] = risks;
    j["pareto_front"] = front;
  }

  if (rep.scores) {
    ordered_json rk;
    rk["scores"] = vec_json(rep.scores->s);
    rk["converged"] = rep.scores->converged;
    rk["iterations"] = rep.scores->iterations;
    j["ranking"] = rk;
  }

  if (rep.graph && rep.counts) {
    const ReliabilityGraph& g = *rep.graph;
    ordered_json nodes = ordered_json::array();
    for (Index i = 0; i < g.size(); ++i) {
      ordered_json node;
      node["id"] = g.node_ids[static_cast<std::size_t>(i)];
      node["label"] = g.node_labels[static_cast<std::size_t>(i)];
      node["depth"] = g.depth_of[static_cast<std::size_t>(i)];
      node["parents"] = idx_json(g.parents[static_cast<std::size_t>(i)]);
      node["v"] = rep.counts->v[i];
      node["m"] = rep.counts->m[i];
      nodes.push_back(node);
    }
    j["graph"] = ordered_json{{"nodes", nodes}, {"leaf_count", rep.counts->leaf_count}};
  }

  ordered_json pv;
  if (rep.pvalues_opt.size() > 0) pv["opt"] = vec_json(rep.pvalues_opt);
  pv["test"] = vec_json(rep.pvalues_test);
  j["pvalues"] = pv;

  if (rep.trace) {
    ordered_json tr;
    ordered_json depths = ordered_json::array();
    for (const DepthRecord& rec : rep.trace->depths) {
      ordered_json d;
      d["depth"] = rec.depth;
      d["candidates"] = idx_json(rec.candidates);
      d["rejections"] = rec.rejections;
      d["cumulative_rejections"] = rec.cumulative_rejections;
      depths.push_back(d);
    }
    tr["depths"] = depths;
    ordered_json decisions = ordered_json::array();
    for (const TestDecision& dec : rep.trace->decisions) {
      ordered_json d;
      d["node"] = dec.node;
      d["tested"] = dec.tested;
      d["threshold"] = dec.threshold ? ordered_json(*dec.threshold) : ordered_json(nullptr);
      d["pvalue"] = dec.pvalue;
      d["reliable"] = dec.reliable;
      decisions.push_back(d);
    }
    tr["decisions"] = decisions;
    j["trace"] = tr;
  } else if (rep.method == MethodKind::PtFst) {
    j["trace"] = ordered_json{{"order", idx_json(rep.fst_order)},
                              {"levels", vec_json(rep.fst_levels)},
                              {"k", rep.fst_k}};
  } else if (rep.method == MethodKind::LttBh) {
    j["trace"] = ordered_json{{"bh_threshold", rep.bh_threshold}};
  }

  j["discovered"] = idx_json(rep.discovered);
  ordered_json dlabels = ordered_json::array();
  for (Index h : rep.discovered) dlabels.push_back(rep.labels[static_cast<std::size_t>(h)]);
  j["discovered_labels"] = dlabels;

  j["final"] = idx_json(rep.final_pick);
  ordered_json flabels = ordered_json::array();
  for (Index h : rep.final_pick) flabels.push_back(rep.labels[static_cast<std::size_t>(h)]);
  j["final_labels"] = flabels;
  return j;
}

}  // namespace rgpt
