#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tcshap/entropy.h"
#include "tcshap/parallel.h"
#include "tcshap/shapley.h"

namespace tcshap {

enum class RankingMethod { kSvfs, kSvfr };

std::string ToString(RankingMethod method);
RankingMethod ParseRankingMethod(std::string_view text);

struct StepRecord {
  std::size_t feature = 0;
  double shapley = 0.0;
  // H(X) + H(S) - H(S u X) against the features chosen before this step.
  double penalty = 0.0;
  // SVFR only: shapley - penalty, the score this step maximized.
  std::optional<double> rk;
  // SVFS only: candidates dropped by the pruning pass that followed this
  // selection (their penalty against the grown set exceeded epsilon).
  std::vector<std::size_t> pruned;

  bool operator==(const StepRecord&) const = default;
};

struct RankingConfig {
  RankingMethod method = RankingMethod::kSvfr;
  std::optional<double> epsilon;  // SVFS
  std::optional<std::size_t> cap;  // SVFR
  ApproxConfig approx;
  LogBase base = LogBase::kTwo;

  bool operator==(const RankingConfig&) const = default;
};

struct RankingResult {
  std::vector<std::size_t> order;
  std::vector<StepRecord> steps;
  RankingConfig config;

  bool operator==(const RankingResult&) const = default;
};

// Greedy selection with epsilon pruning. Each round drops every candidate
// whose total correlation with the selected set S exceeds epsilon, then moves
// the remaining candidate with the largest Shapley value into S (ties go to
// the lowest index). Stops when no candidate is left.
RankingResult Svfs(EntropyEvaluator& evaluator, const ShapleyScores& scores,
                   double epsilon, const ParallelOptions& parallel = {});
RankingResult Svfs(const CategoricalDataset& ds, double epsilon,
                   const ShapleyScores& scores);

// Complete ranking: rank 0 is the Shapley argmax; each later rank maximizes
// rk(X) = phi(X) - (H(X) + H(S) - H(S u X)) where S holds every feature
// ranked so far. Stops after `cap` ranks when given.
RankingResult Svfr(EntropyEvaluator& evaluator, const ShapleyScores& scores,
                   std::optional<std::size_t> cap = std::nullopt,
                   const ParallelOptions& parallel = {});
RankingResult Svfr(const CategoricalDataset& ds, const ShapleyScores& scores,
                   std::optional<std::size_t> cap = std::nullopt);

// One SVFS run per epsilon, sharing the scores and the evaluator's cache.
std::vector<RankingResult> SvfsSweep(EntropyEvaluator& evaluator,
                                     const ShapleyScores& scores,
                                     std::span<const double> epsilons,
                                     const ParallelOptions& parallel = {});

// start, start + step, ... up to and including stop (within half a step).
std::vector<double> EpsilonGrid(double start, double stop, double step);

// Feature indices sorted by descending score, ties by ascending index.
std::vector<std::size_t> ArgsortDescending(std::span<const double> scores);

}  // namespace tcshap
