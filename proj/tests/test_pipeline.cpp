#include <doctest.h>

#include <nlohmann/json.hpp>
#include <numeric>

#include "rgpt/pipeline.hpp"
#include "rgpt/risk.hpp"
#include "rgpt/simulate.hpp"
#include "rgpt/testing.hpp"

using namespace rgpt;

namespace {

SelectionProblem problem1(double alpha, Index n_hyp = 0) {
  (void)n_hyp;
  SelectionProblem p;
  p.n_constrained = 1;
  p.alphas = Vector::Constant(1, alpha);
  p.delta = 0.1;
  p.seed = 17;
  return p;
}

RiskTable constant_table(Index n_samples, Index n_hyperparams, double fill) {
  RiskTable t;
  t.n_samples = n_samples;
  t.n_hyperparams = n_hyperparams;
  t.values.push_back(Matrix::Constant(n_samples, n_hyperparams, fill));
  return t;
}

SyntheticSpec demo_spec(Index n_hyp, Index n_samples, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.constrained_means = Matrix(n_hyp, 1);
  for (Index h = 0; h < n_hyp; ++h)
    spec.constrained_means(h, 0) = 0.05 + 0.4 * static_cast<double>(h) / static_cast<double>(n_hyp);
  spec.aux_means = Matrix(n_hyp, 1);
  for (Index h = 0; h < n_hyp; ++h)
    spec.aux_means(h, 0) = 0.5 - 0.4 * static_cast<double>(h) / static_cast<double>(n_hyp);
  spec.n_samples = n_samples;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST_CASE("all methods accept an obviously reliable single hyperparameter") {
  const RiskTable t = constant_table(200, 1, 0.0);
  const SelectionProblem p = problem1(0.2);
  for (MethodKind kind : {MethodKind::Rgpt, MethodKind::LttBh, MethodKind::PtFst}) {
    MethodConfig cfg;
    cfg.kind = kind;
    const SelectionReport rep = run_method(t, p, cfg);
    CHECK(rep.discovered == std::vector<Index>{0});
    CHECK(rep.final_pick == std::vector<Index>{0});
  }
}

TEST_CASE("all methods reject hyperparameters with saturated losses") {
  const RiskTable t = constant_table(200, 4, 1.0);
  const SelectionProblem p = problem1(0.2);
  for (MethodKind kind : {MethodKind::Rgpt, MethodKind::LttBh, MethodKind::PtFst}) {
    MethodConfig cfg;
    cfg.kind = kind;
    const SelectionReport rep = run_method(t, p, cfg);
    CHECK(rep.discovered.empty());
    CHECK(rep.final_pick.empty());
  }
}

TEST_CASE("reports are byte-identical across repeated runs") {
  const RiskTable t = gen_synthetic(demo_spec(12, 300, 5));
  SelectionProblem p = problem1(0.3);
  for (MethodKind kind : {MethodKind::Rgpt, MethodKind::LttBh, MethodKind::PtFst}) {
    MethodConfig cfg;
    cfg.kind = kind;
    const std::string a = report_to_json(run_method(t, p, cfg)).dump(2);
    const std::string b = report_to_json(run_method(t, p, cfg)).dump(2);
    CHECK(a == b);
  }
}

TEST_CASE("report JSON round-trips byte-identically") {
  const RiskTable t = gen_synthetic(demo_spec(10, 200, 9));
  const SelectionProblem p = problem1(0.3);
  MethodConfig cfg;
  const std::string once = report_to_json(run_rgpt(t, p, cfg)).dump(2);
  const std::string twice = nlohmann::ordered_json::parse(once).dump(2);
  CHECK(once == twice);
}

TEST_CASE("run_ltt composes combined p-values with the BH step-up") {
  const RiskTable t = gen_synthetic(demo_spec(15, 250, 11));
  const SelectionProblem p = problem1(0.3);
  const SelectionReport rep = run_ltt(t, p, MethodConfig{MethodKind::LttBh});

  std::vector<Index> all(static_cast<std::size_t>(t.n_samples));
  std::iota(all.begin(), all.end(), Index{0});
  std::vector<Index> hypers(static_cast<std::size_t>(t.n_hyperparams));
  std::iota(hypers.begin(), hypers.end(), Index{0});
  const Vector pv = combined_pvalues(t, all, hypers, p);
  CHECK(rep.discovered == run_bh(pv, p.delta));
  for (Index h : rep.discovered) CHECK(pv[h] <= rep.bh_threshold + 1e-15);
}

TEST_CASE("run_pt orders the front by ascending optimization-split p-values") {
  const RiskTable t = gen_synthetic(demo_spec(10, 400, 13));
  const SelectionProblem p = problem1(0.3);
  const SelectionReport rep = run_pt(t, p, MethodConfig{MethodKind::PtFst});
  REQUIRE(rep.front.has_value());
  REQUIRE(rep.fst_order.size() == rep.front->members.size());

  // recompute the opt p-value of each ordered member and check monotonicity
  double prev = -1.0;
  for (Index id : rep.fst_order) {
    const auto it = std::find(rep.front->members.begin(), rep.front->members.end(), id);
    REQUIRE(it != rep.front->members.end());
    const Index pos = static_cast<Index>(it - rep.front->members.begin());
    CHECK(rep.pvalues_opt[pos] >= prev);
    prev = rep.pvalues_opt[pos];
  }

  // every discovery passed its positional threshold
  for (Index h : rep.discovered) {
    const auto ot = std::find(rep.fst_order.begin(), rep.fst_order.end(), h);
    const Index opos = static_cast<Index>(ot - rep.fst_order.begin());
    const auto mt = std::find(rep.front->members.begin(), rep.front->members.end(), h);
    const Index mpos = static_cast<Index>(mt - rep.front->members.begin());
    CHECK(rep.pvalues_test[mpos] <= rep.fst_levels[opos]);
  }
}

TEST_CASE("rgpt with full depth and no prior reproduces the pt test order") {
  const RiskTable t = gen_synthetic(demo_spec(8, 400, 19));
  const SelectionProblem p = problem1(0.3);

  MethodConfig pt_cfg;
  pt_cfg.kind = MethodKind::PtFst;
  const SelectionReport pt = run_pt(t, p, pt_cfg);
  REQUIRE(pt.front.has_value());

  MethodConfig rg_cfg;
  rg_cfg.kind = MethodKind::Rgpt;
  rg_cfg.depth = static_cast<Index>(pt.front->members.size());
  const SelectionReport rg = run_rgpt(t, p, rg_cfg);
  REQUIRE(rg.graph.has_value());

  if (rg.depth == static_cast<Index>(pt.front->members.size())) {
    // distinct scores: each depth holds one node, in pt's test order
    std::vector<Index> chain_order;
    for (Index d = 1; d <= rg.graph->n_depths; ++d)
      for (Index node : rg.graph->nodes_at_depth(d))
        chain_order.push_back(rg.graph->node_ids[static_cast<std::size_t>(node)]);
    CHECK(chain_order == pt.fst_order);
  }
}

TEST_CASE("rgpt trace justifies every discovery") {
  const RiskTable t = gen_synthetic(demo_spec(14, 400, 23));
  const SelectionProblem p = problem1(0.35);
  const SelectionReport rep = run_rgpt(t, p, MethodConfig{});
  REQUIRE(rep.trace.has_value());
  REQUIRE(rep.graph.has_value());
  for (Index h : rep.discovered) {
    const auto it = std::find(rep.graph->node_ids.begin(), rep.graph->node_ids.end(), h);
    REQUIRE(it != rep.graph->node_ids.end());
    const std::size_t node = static_cast<std::size_t>(it - rep.graph->node_ids.begin());
    const TestDecision& dec = rep.trace->decisions[node];
    CHECK(dec.reliable);
    REQUIRE(dec.threshold.has_value());
    CHECK(dec.pvalue <= *dec.threshold);
  }
  // final picks come from the discovered set
  for (Index h : rep.final_pick)
    CHECK(std::find(rep.discovered.begin(), rep.discovered.end(), h) != rep.discovered.end());
}

TEST_CASE("optimization artifacts never read the testing split") {
  RiskTable t = gen_synthetic(demo_spec(10, 300, 29));
  const SelectionProblem p = problem1(0.3);
  const MethodConfig cfg;
  const SelectionReport clean = run_rgpt(t, p, cfg);

  // poison every testing-split sample; Z_OPT artifacts must not move
  const DataSplit split = split_data(t.n_samples, p.split_fraction, p.seed);
  for (Index s : split.mht_indices)
    for (auto& slice : t.values) slice.row(s).setConstant(1.0);
  const SelectionReport poisoned = run_rgpt(t, p, cfg);

  REQUIRE(clean.front.has_value());
  REQUIRE(poisoned.front.has_value());
  CHECK(clean.front->members == poisoned.front->members);
  CHECK(clean.pvalues_opt.isApprox(poisoned.pvalues_opt, 0.0));
  CHECK(clean.scores->s.isApprox(poisoned.scores->s, 0.0));
  CHECK(clean.graph->parents == poisoned.graph->parents);
  // and the poisoned testing split kills every discovery
  CHECK(poisoned.discovered.empty());
}

TEST_CASE("method name parsing") {
  CHECK(parse_method("rgpt") == MethodKind::Rgpt);
  CHECK(parse_method("ltt") == MethodKind::LttBh);
  CHECK(parse_method("ltt-bh") == MethodKind::LttBh);
  CHECK(parse_method("pt") == MethodKind::PtFst);
  CHECK(parse_method("pt-fst") == MethodKind::PtFst);
  CHECK_THROWS_AS(parse_method("bonferroni"), BadConfig);
  for (MethodKind kind : {MethodKind::Rgpt, MethodKind::LttBh, MethodKind::PtFst})
    CHECK(parse_method(method_name(kind)) == kind);
}

TEST_CASE("invalid tables are rejected before any work happens") {
  RiskTable t = constant_table(100, 2, 0.0);
  t.values[0](3, 1) = 2.0;
  CHECK_THROWS_AS(run_method(t, problem1(0.2), MethodConfig{}), OutOfRangeRisk);
}
