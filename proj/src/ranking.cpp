#include "rgpt/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rgpt {

namespace {
constexpr double kScoreFloor = 1e-12;
}

void validate_prior(const PriorSpec& prior) {
  const Index n = prior.eta.rows();
  if (prior.eta.cols() != n) throw PriorShapeMismatch("prior matrix must be square");
  if (prior.pseudocount < 0.0) throw BadConfig("pseudocount must be non-negative");
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double a = prior.eta(i, j);
      const double b = prior.eta(j, i);
      if (!(a >= 0.0 && a <= 1.0) || !(b >= 0.0 && b <= 1.0))
        throw BadConfig("prior entries must lie in [0,1]");
      if (std::abs(a + b - 1.0) > 1e-9)
        throw BadConfig("prior must satisfy eta_ji = 1 - eta_ij");
    }
  }
}

double data_prob(double p_i, double p_j) {
  const double sum = p_i + p_j;
  if (sum == 0.0) return 0.5;
  return p_i / sum;
}

PairwiseCounts pairwise_counts(const Vector& pvalues_opt, const PriorSpec& prior, Index n_opt) {
  const Index n = pvalues_opt.size();
  if (prior.eta.rows() != n || prior.eta.cols() != n)
    throw PriorShapeMismatch("prior matrix shape does not match the item count");
  Matrix w = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      w(i, j) = static_cast<double>(n_opt) * data_prob(pvalues_opt[i], pvalues_opt[j]) +
                prior.pseudocount * prior.eta(i, j);
    }
  }
  return PairwiseCounts{std::move(w)};
}

double bt_loglik(const Matrix& w, const Vector& s) {
  double ll = 0.0;
  for (Index i = 0; i < w.rows(); ++i)
    for (Index j = 0; j < w.cols(); ++j) {
      if (i == j || w(i, j) == 0.0) continue;
      ll += w(i, j) * std::log(s[i] / (s[i] + s[j]));
    }
  return ll;
}

BtScores fit_bt_mm(const PairwiseCounts& counts, double tol, Index max_iter) {
  const Matrix& w = counts.w;
  const Index n = w.rows();
  BtScores out;
  out.s = Vector::Constant(n, 1.0 / static_cast<double>(n));
  if (n == 0) return out;

  const Vector wins = w.rowwise().sum();
  const Vector involvement = wins + w.colwise().sum().transpose();
  for (Index i = 0; i < n; ++i)
    if (involvement[i] == 0.0) out.degenerate = true;

  out.loglik_path.push_back(bt_loglik(w, out.s));
  for (Index iter = 1; iter <= max_iter; ++iter) {
    Vector next(n);
    for (Index i = 0; i < n; ++i) {
      if (involvement[i] == 0.0) {
        next[i] = kScoreFloor;
        continue;
      }
      double denom = 0.0;
      for (Index j = 0; j < n; ++j) {
        if (j == i) continue;
        const double pair = w(i, j) + w(j, i);
        if (pair > 0.0) denom += pair / (out.s[i] + out.s[j]);
      }
      next[i] = denom > 0.0 ? std::max(kScoreFloor, wins[i] / denom) : kScoreFloor;
    }
    next /= next.sum();

    double max_rel = 0.0;
    for (Index i = 0; i < n; ++i)
      max_rel = std::max(max_rel, std::abs(next[i] - out.s[i]) / out.s[i]);
    out.s = next;
    out.iterations = iter;
    out.loglik_path.push_back(bt_loglik(w, out.s));
    if (max_rel < tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

DepthAssignment cluster_depths(const BtScores& scores, Index D) {
  const Index n = scores.s.size();
  if (n == 0) return {};
  if (D < 1) throw BadConfig("cluster depth must be at least 1");
  D = std::min(D, n);  // clamp D > n

  std::vector<std::vector<Index>> clusters;
  clusters.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) clusters.push_back({i});

  auto linkage = [&](const std::vector<Index>& a, const std::vector<Index>& b) {
    double sum = 0.0;
    for (Index i : a)
      for (Index j : b) sum += std::abs(scores.s[i] - scores.s[j]);
    return sum / static_cast<double>(a.size() * b.size());
  };

  while (static_cast<Index>(clusters.size()) > D) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bb = 1;
    Index best_lo = 0, best_hi = 0;
    for (std::size_t a = 0; a + 1 < clusters.size(); ++a) {
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        const double d = linkage(clusters[a], clusters[b]);
        const Index lo = std::min(clusters[a].front(), clusters[b].front());
        const Index hi = std::max(clusters[a].front(), clusters[b].front());
        if (d < best || (d == best && (lo < best_lo || (lo == best_lo && hi < best_hi)))) {
          best = d;
          ba = a;
          bb = b;
          best_lo = lo;
          best_hi = hi;
        }
      }
    }
    auto& merged = clusters[ba];
    merged.insert(merged.end(), clusters[bb].begin(), clusters[bb].end());
    std::sort(merged.begin(), merged.end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));
  }

  // Depth 1 holds the lowest scores: lowest p-value, highest expected reliability.
  std::sort(clusters.begin(), clusters.end(), [&](const auto& a, const auto& b) {
    double ma = 0.0, mb = 0.0;
    for (Index i : a) ma += scores.s[i];
    for (Index i : b) mb += scores.s[i];
    ma /= static_cast<double>(a.size());
    mb /= static_cast<double>(b.size());
    if (ma != mb) return ma < mb;
    return a.front() < b.front();
  });

  DepthAssignment out;
  out.clusters = std::move(clusters);
  out.depth_of.assign(static_cast<std::size_t>(n), 0);
  for (std::size_t d = 0; d < out.clusters.size(); ++d)
    for (Index i : out.clusters[d]) out.depth_of[static_cast<std::size_t>(i)] = static_cast<Index>(d) + 1;
  return out;
}

}  // namespace rgpt
