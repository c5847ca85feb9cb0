#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rgpt {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// ---- error types ----

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OutOfRangeRisk : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct BadConfig : Error {
  using Error::Error;
};
struct TooFewSamples : Error {
  using Error::Error;
};
struct EmptySubset : Error {
  using Error::Error;
};
struct EmptyVector : Error {
  using Error::Error;
};
struct LengthMismatch : Error {
  using Error::Error;
};
struct BadWeights : Error {
  using Error::Error;
};
struct PriorShapeMismatch : Error {
  using Error::Error;
};
struct NoFeatures : Error {
  using Error::Error;
};
struct BadK : Error {
  using Error::Error;
};
struct BadFraction : Error {
  using Error::Error;
};
struct TooLarge : Error {
  using Error::Error;
};
struct BadData : Error {
  using Error::Error;
};

// ---- domain types ----

/// Index into the hyperparameter set, with an optional display label.
struct HyperparamId {
  Index index = 0;
  std::string label;
};

/// Per-sample losses r_l(Z, lambda), one (n_samples x n_hyperparams) matrix
/// per risk function. All values must lie in [0, 1]; constrained risks come
/// first, auxiliary risks after.
struct RiskTable {
  Index n_samples = 0;
  Index n_hyperparams = 0;
  std::vector<Matrix> values;  // values[l](sample, hyperparam)
  std::vector<std::string> labels;

  Index n_risks() const { return static_cast<Index>(values.size()); }

  double value(Index sample, Index hyperparam, Index risk) const {
    return values[static_cast<std::size_t>(risk)](sample, hyperparam);
  }

  std::string label_of(Index h) const {
    if (h < static_cast<Index>(labels.size())) return labels[static_cast<std::size_t>(h)];
    return "h" + std::to_string(h);
  }
};

/// Constraint targets and testing configuration. Constrained risks occupy
/// indices [0, n_constrained); the rest are auxiliary.
struct SelectionProblem {
  Index n_constrained = 1;
  Vector alphas;                // length n_constrained, each in (0,1)
  double delta = 0.1;           // FDR level
  double split_fraction = 0.5;  // |Z_OPT| / |Z|
  std::uint64_t seed = 0;
};

/// Disjoint partition of the sample indices into the optimization split
/// Z_OPT and the testing split Z_MHT.
struct DataSplit {
  std::vector<Index> opt_indices;
  std::vector<Index> mht_indices;
};

// ---- deterministic randomness ----
// mt19937_64 output is fully specified by the standard, so everything built
// on these helpers reproduces bit-for-bit across platforms.

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Per-trial seed derivation, independent of execution order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 1));
}

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, n).
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

}  // namespace rgpt
