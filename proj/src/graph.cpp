#include "rgpt/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace rgpt {

namespace {
constexpr double kCoordTol = 1e-8;
constexpr Index kMaxSweeps = 10000;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}
}  // namespace

std::vector<Index> ReliabilityGraph::nodes_at_depth(Index d) const {
  std::vector<Index> out;
  for (Index i = 0; i < size(); ++i)
    if (depth_of[static_cast<std::size_t>(i)] == d) out.push_back(i);
  return out;
}

LassoSolution nonneg_lasso(const Matrix& X, const Vector& y, double tau) {
  if (X.cols() == 0) throw NoFeatures("non-negative lasso with no candidate parents");
  if (X.rows() != y.size()) throw DimensionMismatch("lasso design/target row mismatch");
  if (!(tau > 0.0)) throw BadConfig("lasso penalty tau must be positive");
  const Index p = X.cols();

  const Matrix gram = X.transpose() * X;
  const Vector corr = X.transpose() * y;

  LassoSolution sol;
  sol.beta = Vector::Zero(p);
  for (Index sweep = 1; sweep <= kMaxSweeps; ++sweep) {
    double max_change = 0.0;
    for (Index k = 0; k < p; ++k) {
      if (gram(k, k) == 0.0) continue;
      const double partial = corr[k] - gram.row(k).dot(sol.beta) + gram(k, k) * sol.beta[k];
      const double next = std::max(0.0, (partial - tau / 2.0) / gram(k, k));
      max_change = std::max(max_change, std::abs(next - sol.beta[k]));
      sol.beta[k] = next;
    }
    sol.sweeps = sweep;
    if (max_change < kCoordTol) break;
  }

  sol.objective = (y - X * sol.beta).squaredNorm() + tau * sol.beta.sum();
  for (Index k = 0; k < p; ++k)
    if (sol.beta[k] > 0.0) sol.active.push_back(k);
  return sol;
}

static Matrix stack_features(const std::vector<Matrix>& features) {
  const Index p = static_cast<Index>(features.size());
  const Index rows = features.empty() ? 0 : features.front().size();
  Matrix X(rows, p);
  for (Index k = 0; k < p; ++k) {
    const Matrix& f = features[static_cast<std::size_t>(k)];
    X.col(k) = Eigen::Map<const Vector>(f.data(), f.size());
  }
  return X;
}

LassoSolution nonneg_lasso(const Matrix& targets, const std::vector<Matrix>& features, double tau) {
  if (features.empty()) throw NoFeatures("non-negative lasso with no candidate parents");
  const Vector y = Eigen::Map<const Vector>(targets.data(), targets.size());
  return nonneg_lasso(stack_features(features), y, tau);
}

double lasso_kkt_residual(const Matrix& X, const Vector& y, double tau, const Vector& beta) {
  const Vector grad = 2.0 * (X.transpose() * (X * beta - y)) + Vector::Constant(beta.size(), tau);
  double residual = 0.0;
  for (Index k = 0; k < beta.size(); ++k) {
    if (beta[k] > 0.0)
      residual = std::max(residual, std::abs(grad[k]));
    else
      residual = std::max(residual, std::max(0.0, -grad[k]));
  }
  return residual;
}

namespace {

double pearson(const Vector& a, const Vector& b) {
  const double ma = a.mean();
  const double mb = b.mean();
  const Vector da = a.array() - ma;
  const Vector db = b.array() - mb;
  const double na = da.norm();
  const double nb = db.norm();
  if (na == 0.0 || nb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return da.dot(db) / (na * nb);
}

}  // namespace

ReliabilityGraph learn_edges(const RiskTable& table, std::span<const Index> subset,
                             std::span<const Index> front_members, const DepthAssignment& depths,
                             Index n_constrained, double tau) {
  if (!(tau > 0.0)) throw BadConfig("lasso penalty tau must be positive");
  const Index n = static_cast<Index>(front_members.size());
  ReliabilityGraph g;
  g.node_ids.assign(front_members.begin(), front_members.end());
  for (Index id : g.node_ids) g.node_labels.push_back(table.label_of(id));
  g.depth_of = depths.depth_of;
  g.n_depths = depths.depth();
  g.parents.assign(static_cast<std::size_t>(n), {});
  g.children.assign(static_cast<std::size_t>(n), {});

  // Per-node constrained-risk slice over the Z_OPT samples, flattened once.
  const Index ns = static_cast<Index>(subset.size());
  std::vector<Vector> risk_vec(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    Matrix slice(ns, n_constrained);
    for (Index l = 0; l < n_constrained; ++l) {
      const Matrix& full = table.values[static_cast<std::size_t>(l)];
      for (Index s = 0; s < ns; ++s) slice(s, l) = full(subset[static_cast<std::size_t>(s)], front_members[static_cast<std::size_t>(i)]);
    }
    risk_vec[static_cast<std::size_t>(i)] = Eigen::Map<const Vector>(slice.data(), slice.size());
  }

  for (Index d = 2; d <= g.n_depths; ++d) {
    const auto& level = depths.clusters[static_cast<std::size_t>(d - 1)];
    const auto& prev = depths.clusters[static_cast<std::size_t>(d - 2)];
    Matrix X(risk_vec.front().size(), static_cast<Index>(prev.size()));
    for (std::size_t k = 0; k < prev.size(); ++k)
      X.col(static_cast<Index>(k)) = risk_vec[static_cast<std::size_t>(prev[k])];

    for (Index child : level) {
      const Vector& y = risk_vec[static_cast<std::size_t>(child)];
      const LassoSolution sol = nonneg_lasso(X, y, tau);
      auto& par = g.parents[static_cast<std::size_t>(child)];
      for (Index k : sol.active) par.push_back(prev[static_cast<std::size_t>(k)]);
      if (par.empty()) {
        // Orphan fallback: most correlated previous-level node, ties and
        // undefined correlations resolve to the lowest index.
        Index pick = prev.front();
        double best = -std::numeric_limits<double>::infinity();
        for (Index cand : prev) {
          const double c = pearson(risk_vec[static_cast<std::size_t>(cand)], y);
          if (std::isfinite(c) && c > best) {
            best = c;
            pick = cand;
          }
        }
        par.push_back(pick);
      }
      std::sort(par.begin(), par.end());
      for (Index p : par) g.children[static_cast<std::size_t>(p)].push_back(child);
    }
  }
  for (auto& c : g.children) std::sort(c.begin(), c.end());
  return g;
}

EffectiveCounts effective_counts(const ReliabilityGraph& graph) {
  const Index n = graph.size();
  EffectiveCounts out;
  out.v = Vector::Zero(n);
  out.m = Vector::Zero(n);
  out.leaf_count = 0;

  // Children always sit one depth deeper, so descending-depth order is a
  // reverse topological order.
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    const Index da = graph.depth_of[static_cast<std::size_t>(a)];
    const Index db = graph.depth_of[static_cast<std::size_t>(b)];
    if (da != db) return da > db;
    return a < b;
  });

  for (Index i : order) {
    const auto& kids = graph.children[static_cast<std::size_t>(i)];
    if (kids.empty()) {
      out.v[i] = 1.0;
      out.m[i] = 1.0;
      ++out.leaf_count;
      continue;
    }
    double v = 0.0, m = 1.0;
    for (Index j : kids) {
      const double np = static_cast<double>(graph.parents[static_cast<std::size_t>(j)].size());
      v += out.v[j] / np;
      m += out.m[j] / np;
    }
    out.v[i] = v;
    out.m[i] = m;
  }
  return out;
}

std::string export_dot(const ReliabilityGraph& graph, const EffectiveCounts& counts,
                       const Vector* scores, const Vector* pvalues) {
  std::ostringstream os;
  os << "digraph reliability_graph {\n";
  os << "  rankdir=TB;\n";
  os << "  node [shape=box];\n";
  for (Index i = 0; i < graph.size(); ++i) {
    os << "  n" << i << " [label=\"" << graph.node_labels[static_cast<std::size_t>(i)]
       << "\\nd=" << graph.depth_of[static_cast<std::size_t>(i)] << " v=" << fmt(counts.v[i])
       << " m=" << fmt(counts.m[i]);
    if (scores) os << "\\ns=" << fmt((*scores)[i]);
    if (pvalues) os << " p=" << fmt((*pvalues)[i]);
    os << "\"];\n";
  }
  for (Index i = 0; i < graph.size(); ++i)
    for (Index c : graph.children[static_cast<std::size_t>(i)])
      os << "  n" << i << " -> n" << c << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace rgpt
