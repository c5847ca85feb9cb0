#include "rgpt/testing.hpp"

#include <algorithm>
#include <numeric>

namespace rgpt {

double by_reshape(double x, Index V) {
  double harmonic = 0.0;
  for (Index k = 1; k <= V; ++k) harmonic += 1.0 / static_cast<double>(k);
  return x / harmonic;
}

double dagger_threshold(double v_i, Index V, double m_i, Index r, Index rejections_prev,
                        double delta, const ReshapingFunction& reshape) {
  const double arg = m_i + static_cast<double>(r) + static_cast<double>(rejections_prev) - 1.0;
  return (v_i / static_cast<double>(V)) * delta / reshape(arg);
}

Index dagger_stepup(std::span<const Index> candidates, const Vector& pvalues, Index level_size,
                    Index rejections_prev, const EffectiveCounts& counts, double delta,
                    const ReshapingFunction& reshape, DaggerTrace& trace) {
  auto count_rejections = [&](Index r) {
    Index hits = 0;
    for (Index i : candidates) {
      const double thr = dagger_threshold(counts.v[i], counts.leaf_count, counts.m[i], r,
                                          rejections_prev, delta, reshape);
      if (pvalues[i] <= thr) ++hits;
    }
    return hits;
  };

  Index R = 0;
  for (Index r = level_size; r >= 1; --r) {
    if (count_rejections(r) >= r) {
      R = r;
      break;
    }
  }

  for (Index i : candidates) {
    TestDecision& dec = trace.decisions[static_cast<std::size_t>(i)];
    dec.tested = true;
    dec.pvalue = pvalues[i];
    if (R >= 1) {
      const double thr = dagger_threshold(counts.v[i], counts.leaf_count, counts.m[i], R,
                                          rejections_prev, delta, reshape);
      dec.threshold = thr;
      dec.reliable = pvalues[i] <= thr;
    } else {
      dec.reliable = false;
    }
  }
  return R;
}

std::pair<std::vector<Index>, DaggerTrace> run_dagger(const ReliabilityGraph& graph,
                                                      const Vector& pvalues, double delta,
                                                      ReshapeKind reshape_kind) {
  const Index n = graph.size();
  if (pvalues.size() != n) throw LengthMismatch("one p-value per graph node required");
  const EffectiveCounts counts = effective_counts(graph);
  const ReshapingFunction reshape{reshape_kind, counts.leaf_count};

  DaggerTrace trace;
  trace.decisions.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    trace.decisions[static_cast<std::size_t>(i)].node = i;
    trace.decisions[static_cast<std::size_t>(i)].pvalue = pvalues[i];
  }

  std::vector<bool> reliable(static_cast<std::size_t>(n), false);
  Index cumulative = 0;
  for (Index d = 1; d <= graph.n_depths; ++d) {
    const std::vector<Index> level = graph.nodes_at_depth(d);
    std::vector<Index> candidates;
    for (Index i : level) {
      const auto& par = graph.parents[static_cast<std::size_t>(i)];
      const bool all_ok = std::all_of(par.begin(), par.end(), [&](Index p) {
        return reliable[static_cast<std::size_t>(p)];
      });
      if (all_ok) candidates.push_back(i);
    }

    DepthRecord rec;
    rec.depth = d;
    rec.candidates = candidates;
    if (!candidates.empty()) {
      rec.rejections = dagger_stepup(candidates, pvalues, static_cast<Index>(level.size()),
                                     cumulative, counts, delta, reshape, trace);
      // R_{1:d} counts actual reliable decisions, which can exceed the
      // step-up parameter R when thresholds decrease in r.
      for (Index i : candidates) {
        reliable[static_cast<std::size_t>(i)] =
            trace.decisions[static_cast<std::size_t>(i)].reliable;
        if (reliable[static_cast<std::size_t>(i)]) ++cumulative;
      }
    }
    rec.cumulative_rejections = cumulative;
    trace.depths.push_back(std::move(rec));
  }

  std::vector<Index> discovered;
  for (Index i = 0; i < n; ++i)
    if (reliable[static_cast<std::size_t>(i)]) discovered.push_back(i);
  return {discovered, trace};
}

Vector fst_thresholds(Index n_total, const FstConfig& cfg) {
  if (cfg.k < 1 || cfg.k > n_total) throw BadK("FST stopping budget k must lie in [1, n]");
  Vector out(n_total);
  const double nd = static_cast<double>(n_total);
  const double kd = static_cast<double>(cfg.k);
  for (Index i = 1; i <= n_total; ++i) {
    if (i <= cfg.k)
      out[i - 1] = cfg.delta / kd;
    else
      out[i - 1] = (nd - kd + 1.0) * cfg.delta / ((nd - static_cast<double>(i) + 1.0) * kd);
  }
  return out;
}

std::vector<Index> run_fst(std::span<const Index> ordered, const Vector& pvalues,
                           const FstConfig& cfg) {
  const Index n = static_cast<Index>(ordered.size());
  const Vector thresholds = fst_thresholds(n, cfg);
  std::vector<Index> discovered;
  Index failures = 0;
  for (Index i = 0; i < n; ++i) {
    const Index id = ordered[static_cast<std::size_t>(i)];
    if (pvalues[id] <= thresholds[i]) {
      discovered.push_back(id);
    } else {
      ++failures;
      if (failures >= cfg.k) break;
    }
  }
  return discovered;
}

std::vector<Index> run_bh(const Vector& pvalues, double delta) {
  const Index n = pvalues.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return pvalues[a] < pvalues[b]; });

  Index cutoff = 0;  // number of rejections
  for (Index i = n; i >= 1; --i) {
    if (pvalues[order[static_cast<std::size_t>(i - 1)]] <=
        static_cast<double>(i) * delta / static_cast<double>(n)) {
      cutoff = i;
      break;
    }
  }
  std::vector<Index> discovered(order.begin(), order.begin() + cutoff);
  std::sort(discovered.begin(), discovered.end());
  return discovered;
}

}  // namespace rgpt
