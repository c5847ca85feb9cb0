#include "rgpt/pareto.hpp"

#include <algorithm>
#include <numeric>

#include "rgpt/risk.hpp"

namespace rgpt {

bool dominates(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw LengthMismatch("risk vectors differ in length");
  bool strict = false;
  for (Index l = 0; l < a.size(); ++l) {
    if (a[l] > b[l]) return false;
    if (a[l] < b[l]) strict = true;
  }
  return strict;
}

ParetoFront pareto_front(const RiskTable& table, std::span<const Index> subset,
                         const SelectionProblem& problem) {
  (void)problem;
  const Index n = table.n_hyperparams;
  const Index L = table.n_risks();
  Matrix risks(n, L);
  for (Index h = 0; h < n; ++h)
    for (Index l = 0; l < L; ++l) risks(h, l) = empirical_risk(table, subset, h, l);

  ParetoFront front;
  for (Index h = 0; h < n; ++h) {
    bool dominated = false;
    const Vector rh = risks.row(h);
    for (Index g = 0; g < n && !dominated; ++g) {
      if (g == h) continue;
      dominated = dominates(risks.row(g), rh);
    }
    if (!dominated) front.members.push_back(h);
  }
  front.risks.resize(static_cast<Index>(front.members.size()), L);
  for (std::size_t i = 0; i < front.members.size(); ++i)
    front.risks.row(static_cast<Index>(i)) = risks.row(front.members[i]);
  return front;
}

std::vector<Index> final_selection(std::span<const Index> discovered, const RiskTable& table,
                                   std::span<const Index> subset, const SelectionProblem& problem,
                                   std::span<const double> weights) {
  if (discovered.empty()) return {};
  const Index L = table.n_risks();
  const Index n_aux = L - problem.n_constrained;
  std::vector<Index> sorted(discovered.begin(), discovered.end());
  std::sort(sorted.begin(), sorted.end());

  if (n_aux <= 0) return sorted;

  if (!weights.empty()) {
    if (static_cast<Index>(weights.size()) != n_aux)
      throw BadWeights("scalarization weights must match the auxiliary risk count");
    for (double w : weights)
      if (w < 0.0) throw BadWeights("scalarization weights must be non-negative");
  }

  Matrix aux(static_cast<Index>(sorted.size()), n_aux);
  for (std::size_t i = 0; i < sorted.size(); ++i)
    for (Index l = 0; l < n_aux; ++l)
      aux(static_cast<Index>(i), l) =
          empirical_risk(table, subset, sorted[i], problem.n_constrained + l);

  if (n_aux == 1) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (aux(static_cast<Index>(i), 0) < aux(static_cast<Index>(best), 0)) best = i;
    return {sorted[best]};
  }

  // Several auxiliary risks: keep the Pareto subset under the auxiliary
  // coordinates, then rank by weighted sum when weights are given.
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    bool dominated = false;
    const Vector ri = aux.row(static_cast<Index>(i));
    for (std::size_t j = 0; j < sorted.size() && !dominated; ++j) {
      if (i == j) continue;
      dominated = dominates(aux.row(static_cast<Index>(j)), ri);
    }
    if (!dominated) keep.push_back(i);
  }

  if (!weights.empty()) {
    Eigen::Map<const Vector> w(weights.data(), n_aux);
    std::stable_sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) {
      const double sa = aux.row(static_cast<Index>(a)).dot(w);
      const double sb = aux.row(static_cast<Index>(b)).dot(w);
      if (sa != sb) return sa < sb;
      return sorted[a] < sorted[b];
    });
  }

  std::vector<Index> out;
  out.reserve(keep.size());
  for (std::size_t i : keep) out.push_back(sorted[i]);
  return out;
}

}  // namespace rgpt
