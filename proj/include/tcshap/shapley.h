#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tcshap/dataset.h"
#include "tcshap/entropy.h"
#include "tcshap/log_base.h"
#include "tcshap/parallel.h"

namespace tcshap {

enum class ShapleyMethod { kFull, kBounded, kSampled };

// Which estimator to run.
struct ApproxConfig {
  ShapleyMethod method = ShapleyMethod::kFull;
  std::size_t k = 0;       // bounded: largest coalition size |A u X| evaluated
  std::size_t n = 0;       // sampled: number of permutations
  std::uint64_t seed = 0;  // sampled only
  // bounded only: rescale the kept coalition-size classes so their weights
  // sum to one.
  bool renormalize = false;

  static ApproxConfig Full() { return {}; }
  static ApproxConfig Bounded(std::size_t k, bool renormalize = false) {
    return {ShapleyMethod::kBounded, k, 0, 0, renormalize};
  }
  static ApproxConfig Sampled(std::size_t n, std::uint64_t seed) {
    return {ShapleyMethod::kSampled, 0, n, seed, false};
  }
  // "full", "bounded:K" or "sampled:N".
  static ApproxConfig Parse(std::string_view text, std::uint64_t seed = 0);

  std::string MethodName() const;  // "full" | "bounded" | "sampled"
  std::string ToString() const;    // inverse of Parse
  // Throws ConfigError if k or n is zero for the method that needs it.
  void Validate() const;

  bool operator==(const ApproxConfig&) const = default;
};

struct ShapleyScores {
  std::vector<double> values;  // per feature, in entropy units of `base`
  // Sampled only: standard error of each mean (NaN when n == 1).
  std::vector<double> standard_errors;
  ApproxConfig config;
  LogBase base = LogBase::kTwo;
  // Entropy evaluations (full, bounded) or prefix refinements (sampled).
  std::uint64_t n_value_evals = 0;
};

struct ShapleyOptions {
  ParallelOptions parallel;
  // The exact estimator keeps 2^N doubles; it refuses larger N.
  std::size_t max_exact_features = 30;
};

// Exact Shapley values under the total-correlation game: one entropy per
// subset of F, then every score assembled from that table.
ShapleyScores ShapleyFull(const CategoricalDataset& ds,
                          LogBase base = LogBase::kTwo,
                          const ShapleyOptions& options = {});

// The exact sum restricted to coalitions A with |A| <= k - 1, keeping the
// original weights (or renormalized ones, see ApproxConfig).
ShapleyScores ShapleyBounded(const CategoricalDataset& ds, std::size_t k,
                             LogBase base = LogBase::kTwo,
                             const ShapleyOptions& options = {},
                             bool renormalize = false);

// Mean marginal contribution over n uniformly drawn feature orderings.
ShapleyScores ShapleySampled(const CategoricalDataset& ds, std::size_t n,
                             std::uint64_t seed, LogBase base = LogBase::kTwo,
                             const ShapleyOptions& options = {});

// Average over all N! orderings using hash-based entropies. Independent of
// the other estimators; only meant for small N.
ShapleyScores ShapleyOraclePermutations(const CategoricalDataset& ds,
                                        LogBase base = LogBase::kTwo);

ShapleyScores ComputeShapley(const CategoricalDataset& ds,
                             const ApproxConfig& config,
                             LogBase base = LogBase::kTwo,
                             const ShapleyOptions& options = {});

// --- Building blocks of the sampled estimator, exposed for tests. ---

// Uniform integer in [0, bound) from a 64-bit engine (Lemire's method), so
// sampled results do not depend on the standard library's distributions.
std::uint64_t UniformBelow(std::mt19937_64& rng, std::uint64_t bound);

// n orderings of {0..n_features-1}, drawn by Fisher-Yates from one engine
// seeded with seed.
std::vector<std::vector<std::size_t>> SamplePermutations(
    std::size_t n_features, std::size_t n, std::uint64_t seed);

struct PermutationWalk {
  // marginals[x] is the contribution of feature x to the features placed
  // before it in the ordering.
  std::vector<double> marginals;
  // Entropy of the final prefix, i.e. H(F).
  double final_entropy = 0.0;
};

PermutationWalk WalkPermutation(const EntropyEvaluator& evaluator,
                                std::span<const std::size_t> order);

// Order-independent sum of doubles: values are rounded to multiples of
// 2^-90 and added as 128-bit integers. Used wherever bit-exact symmetry of
// scores must not depend on enumeration order.
class FixedPointSum {
 public:
  void Add(double x);
  void Add(const FixedPointSum& other) { acc_ += other.acc_; }
  double Value() const;

 private:
  __int128 acc_ = 0;
};

}  // namespace tcshap
