#pragma once

#include <string>
#include <vector>

#include "rgpt/graph.hpp"
#include "rgpt/types.hpp"

namespace rgpt::testutil {

/// Builds a graph from explicit depths (1-based, per node) and edge list.
inline ReliabilityGraph make_graph(const std::vector<Index>& depth_of,
                                   const std::vector<std::pair<Index, Index>>& edges) {
  ReliabilityGraph g;
  const Index n = static_cast<Index>(depth_of.size());
  g.depth_of = depth_of;
  g.n_depths = 0;
  for (Index d : depth_of) g.n_depths = std::max(g.n_depths, d);
  g.parents.assign(static_cast<std::size_t>(n), {});
  g.children.assign(static_cast<std::size_t>(n), {});
  for (Index i = 0; i < n; ++i) {
    g.node_ids.push_back(i);
    g.node_labels.push_back("h" + std::to_string(i));
  }
  for (auto [from, to] : edges) {
    g.children[static_cast<std::size_t>(from)].push_back(to);
    g.parents[static_cast<std::size_t>(to)].push_back(from);
  }
  for (auto& v : g.parents) std::sort(v.begin(), v.end());
  for (auto& v : g.children) std::sort(v.begin(), v.end());
  return g;
}

/// Random layered DAG with <= max_nodes nodes; every non-root node gets at
/// least one parent on the previous layer.
inline ReliabilityGraph random_layered_graph(Rng& rng, Index max_nodes) {
  const Index n = 1 + static_cast<Index>(uniform_below(rng, static_cast<std::uint64_t>(max_nodes)));
  const Index n_depths = 1 + static_cast<Index>(uniform_below(rng, static_cast<std::uint64_t>(n)));

  std::vector<Index> depth_of(static_cast<std::size_t>(n));
  // guarantee each depth is non-empty, assign the rest at random
  for (Index i = 0; i < n_depths; ++i) depth_of[static_cast<std::size_t>(i)] = i + 1;
  for (Index i = n_depths; i < n; ++i)
    depth_of[static_cast<std::size_t>(i)] =
        1 + static_cast<Index>(uniform_below(rng, static_cast<std::uint64_t>(n_depths)));

  std::vector<std::pair<Index, Index>> edges;
  std::vector<std::vector<Index>> by_depth(static_cast<std::size_t>(n_depths));
  for (Index i = 0; i < n; ++i)
    by_depth[static_cast<std::size_t>(depth_of[static_cast<std::size_t>(i)] - 1)].push_back(i);
  for (Index d = 2; d <= n_depths; ++d) {
    const auto& prev = by_depth[static_cast<std::size_t>(d - 2)];
    for (Index child : by_depth[static_cast<std::size_t>(d - 1)]) {
      bool has_parent = false;
      for (Index p : prev) {
        if (uniform01(rng) < 0.5) {
          edges.emplace_back(p, child);
          has_parent = true;
        }
      }
      if (!has_parent)
        edges.emplace_back(prev[uniform_below(rng, prev.size())], child);
    }
  }
  return make_graph(depth_of, edges);
}

}  // namespace rgpt::testutil
