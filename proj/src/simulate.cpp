#include "rgpt/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace rgpt {

void validate_spec(const SyntheticSpec& spec) {
  if (spec.n_samples < 2) throw BadConfig("synthetic spec needs at least two samples");
  if (spec.constrained_means.rows() < 1 || spec.constrained_means.cols() < 1)
    throw BadConfig("constrained means must be non-empty");
  if (spec.aux_means.rows() != 0 && spec.aux_means.rows() != spec.constrained_means.rows())
    throw DimensionMismatch("aux means row count must match constrained means");
  auto in_unit = [](const Matrix& m) {
    return m.size() == 0 || (m.minCoeff() >= 0.0 && m.maxCoeff() <= 1.0);
  };
  if (!in_unit(spec.constrained_means) || !in_unit(spec.aux_means))
    throw BadConfig("synthetic means must lie in [0,1]");
  if (!(spec.rho >= 0.0 && spec.rho <= 1.0)) throw BadConfig("rho must lie in [0,1]");
}

RiskTable gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  validate_spec(spec);
  const Index H = spec.n_hyperparams();
  const Index Lc = spec.constrained_means.cols();
  const Index La = spec.aux_means.cols();

  RiskTable table;
  table.n_samples = spec.n_samples;
  table.n_hyperparams = H;
  Rng rng(seed);
  const bool shared = spec.correlation == SyntheticSpec::Correlation::SharedNoise;

  auto fill_risk = [&](const Matrix& means, Index col) {
    Matrix slice(spec.n_samples, H);
    for (Index s = 0; s < spec.n_samples; ++s) {
      const double u_shared = shared ? uniform01(rng) : 0.0;
      for (Index h = 0; h < H; ++h) {
        const double u_own = uniform01(rng);
        const double u = shared ? (1.0 - spec.rho) * u_own + spec.rho * u_shared : u_own;
        slice(s, h) = u <= means(h, col) ? 1.0 : 0.0;
      }
    }
    table.values.push_back(std::move(slice));
  };

  for (Index l = 0; l < Lc; ++l) fill_risk(spec.constrained_means, l);
  for (Index l = 0; l < La; ++l) fill_risk(spec.aux_means, l);
  return table;
}

std::vector<bool> true_reliability(const SyntheticSpec& spec, const SelectionProblem& problem) {
  const Index H = spec.n_hyperparams();
  if (spec.constrained_means.cols() != problem.n_constrained)
    throw DimensionMismatch("spec constrained risk count does not match the problem");
  std::vector<bool> reliable(static_cast<std::size_t>(H), true);
  for (Index h = 0; h < H; ++h)
    for (Index l = 0; l < problem.n_constrained; ++l)
      if (spec.constrained_means(h, l) > problem.alphas[l])
        reliable[static_cast<std::size_t>(h)] = false;
  return reliable;
}

FdrReport run_trials(const SyntheticSpec& spec, const SelectionProblem& problem,
                     const MethodConfig& config, Index trials, Index jobs) {
  if (trials < 1) throw BadConfig("trial count must be positive");
  const std::vector<bool> reliable = true_reliability(spec, problem);
  const Index n_true =
      static_cast<Index>(std::count(reliable.begin(), reliable.end(), true));

  std::vector<TrialOutcome> records(static_cast<std::size_t>(trials));
  auto worker = [&](Index begin, Index end) {
    for (Index t = begin; t < end; ++t) {
      const RiskTable table = gen_synthetic(spec, derive_seed(spec.seed, static_cast<std::uint64_t>(t)));
      SelectionProblem p = problem;
      p.seed = derive_seed(spec.seed ^ 0xa5a5a5a5ULL, static_cast<std::uint64_t>(t));
      const SelectionReport rep = run_method(table, p, config);

      TrialOutcome out;
      out.trial = t;
      out.n_discovered = static_cast<Index>(rep.discovered.size());
      Index n_true_disc = 0;
      for (Index h : rep.discovered)
        if (reliable[static_cast<std::size_t>(h)]) ++n_true_disc;
      out.n_false = out.n_discovered - n_true_disc;
      out.fdp = static_cast<double>(out.n_false) /
                static_cast<double>(std::max<Index>(out.n_discovered, 1));
      out.power = n_true > 0 ? static_cast<double>(n_true_disc) / static_cast<double>(n_true) : 0.0;
      records[static_cast<std::size_t>(t)] = out;
    }
  };

  jobs = std::clamp<Index>(jobs, 1, trials);
  if (jobs == 1) {
    worker(0, trials);
  } else {
    std::vector<std::thread> pool;
    const Index chunk = (trials + jobs - 1) / jobs;
    for (Index j = 0; j < jobs; ++j) {
      const Index begin = j * chunk;
      const Index end = std::min(trials, begin + chunk);
      if (begin < end) pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  FdrReport report;
  report.trials = trials;
  report.delta = problem.delta;
  double sum_fdp = 0.0, sum_power = 0.0;
  for (const TrialOutcome& r : records) {
    sum_fdp += r.fdp;
    sum_power += r.power;
  }
  report.mean_fdp = sum_fdp / static_cast<double>(trials);
  report.mean_power = sum_power / static_cast<double>(trials);
  double ss_fdp = 0.0, ss_power = 0.0;
  for (const TrialOutcome& r : records) {
    ss_fdp += (r.fdp - report.mean_fdp) * (r.fdp - report.mean_fdp);
    ss_power += (r.power - report.mean_power) * (r.power - report.mean_power);
  }
  if (trials > 1) {
    report.se_fdp = std::sqrt(ss_fdp / static_cast<double>(trials - 1)) /
                    std::sqrt(static_cast<double>(trials));
    report.se_power = std::sqrt(ss_power / static_cast<double>(trials - 1)) /
                      std::sqrt(static_cast<double>(trials));
  }
  report.records = std::move(records);
  return report;
}

std::vector<FdrReport> sweep_depth(const SyntheticSpec& spec, const SelectionProblem& problem,
                                   const MethodConfig& config, std::span<const Index> depth_values,
                                   Index trials, Index jobs) {
  std::vector<FdrReport> out;
  for (Index d : depth_values) {
    MethodConfig c = config;
    c.depth = d;
    out.push_back(run_trials(spec, problem, c, trials, jobs));
  }
  return out;
}

PriorSpec corrupt_priors(const PriorSpec& prior, double f, std::uint64_t seed) {
  if (!(f >= 0.0 && f <= 1.0)) throw BadFraction("swap fraction must lie in [0,1]");
  PriorSpec out = prior;
  Rng rng(seed);
  const Index n = out.eta.rows();
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (uniform01(rng) < f) std::swap(out.eta(i, j), out.eta(j, i));
    }
  }
  return out;
}

Matrix structured_prior(const SyntheticSpec& spec, const SelectionProblem& problem) {
  const Index H = spec.n_hyperparams();
  // Worst-case constraint slack: larger slack = more reliable.
  Vector slack(H);
  for (Index h = 0; h < H; ++h) {
    double s = std::numeric_limits<double>::infinity();
    for (Index l = 0; l < problem.n_constrained; ++l)
      s = std::min(s, problem.alphas[l] - spec.constrained_means(h, l));
    slack[h] = s;
  }
  Matrix eta = Matrix::Constant(H, H, 0.5);
  for (Index i = 0; i < H; ++i)
    for (Index j = 0; j < H; ++j) {
      if (i == j) continue;
      if (slack[i] > slack[j]) eta(i, j) = 0.0;  // i more reliable, Eq-(10) orientation
      else if (slack[i] < slack[j]) eta(i, j) = 1.0;
    }
  return eta;
}

// Independent transcription of the graph testing procedure used as the test
// oracle. Everything below is written directly from the threshold formula,
// the step-up rule, and the leaf/node recursions, on purpose without reuse
// of the testing module.
namespace oracle {

double harmonic(Index V) {
  double h = 0.0;
  for (Index k = 1; k <= V; ++k) h += 1.0 / static_cast<double>(k);
  return h;
}

void compute_vm(const ReliabilityGraph& g, Index node, std::vector<double>& v,
                std::vector<double>& m, std::vector<bool>& done) {
  if (done[static_cast<std::size_t>(node)]) return;
  const auto& kids = g.children[static_cast<std::size_t>(node)];
  if (kids.empty()) {
    v[static_cast<std::size_t>(node)] = 1.0;
    m[static_cast<std::size_t>(node)] = 1.0;
  } else {
    double vi = 0.0;
    double mi = 1.0;
    for (Index j : kids) {
      compute_vm(g, j, v, m, done);
      const double np = static_cast<double>(g.parents[static_cast<std::size_t>(j)].size());
      vi += v[static_cast<std::size_t>(j)] / np;
      mi += m[static_cast<std::size_t>(j)] / np;
    }
    v[static_cast<std::size_t>(node)] = vi;
    m[static_cast<std::size_t>(node)] = mi;
  }
  done[static_cast<std::size_t>(node)] = true;
}

}  // namespace oracle

std::vector<Index> oracle_dagger(const ReliabilityGraph& graph, const Vector& pvalues,
                                 double delta, ReshapeKind reshape) {
  const Index n = graph.size();
  if (n > 12) throw TooLarge("oracle limited to 12 nodes");

  std::vector<double> v(static_cast<std::size_t>(n)), m(static_cast<std::size_t>(n));
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  for (Index i = 0; i < n; ++i) oracle::compute_vm(graph, i, v, m, done);
  Index V = 0;
  for (Index i = 0; i < n; ++i)
    if (graph.children[static_cast<std::size_t>(i)].empty()) ++V;

  auto beta = [&](double x) {
    return reshape == ReshapeKind::Identity ? x : x / oracle::harmonic(V);
  };

  std::vector<bool> is_reliable(static_cast<std::size_t>(n), false);
  Index rejections_so_far = 0;
  for (Index d = 1; d <= graph.n_depths; ++d) {
    std::vector<Index> level;
    for (Index i = 0; i < n; ++i)
      if (graph.depth_of[static_cast<std::size_t>(i)] == d) level.push_back(i);

    std::vector<Index> testable;
    for (Index i : level) {
      bool ok = true;
      for (Index p : graph.parents[static_cast<std::size_t>(i)])
        if (!is_reliable[static_cast<std::size_t>(p)]) ok = false;
      if (ok) testable.push_back(i);
    }
    if (testable.empty()) continue;

    auto threshold = [&](Index i, Index r) {
      const double arg = m[static_cast<std::size_t>(i)] + static_cast<double>(r) +
                         static_cast<double>(rejections_so_far) - 1.0;
      return v[static_cast<std::size_t>(i)] / static_cast<double>(V) * delta / beta(arg);
    };

    Index R = 0;
    for (Index r = 1; r <= static_cast<Index>(level.size()); ++r) {
      Index hits = 0;
      for (Index i : testable)
        if (pvalues[i] <= threshold(i, r)) ++hits;
      if (hits >= r) R = r;
    }
    if (R >= 1) {
      for (Index i : testable)
        if (pvalues[i] <= threshold(i, R)) is_reliable[static_cast<std::size_t>(i)] = true;
      Index rejected = 0;
      for (Index i : testable)
        if (is_reliable[static_cast<std::size_t>(i)]) ++rejected;
      rejections_so_far += rejected;
    }
  }

  std::vector<Index> out;
  for (Index i = 0; i < n; ++i)
    if (is_reliable[static_cast<std::size_t>(i)]) out.push_back(i);
  return out;
}

}  // namespace rgpt
