#include "tcshap/ranking.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tcshap/error.h"

namespace tcshap {

std::string ToString(RankingMethod method) {
  return method == RankingMethod::kSvfs ? "svfs" : "svfr";
}

RankingMethod ParseRankingMethod(std::string_view text) {
  if (text == "svfs") return RankingMethod::kSvfs;
  if (text == "svfr") return RankingMethod::kSvfr;
  throw ConfigError("ranking method must be svfs or svfr, got '" +
                    std::string(text) + "'");
}

std::vector<std::size_t> ArgsortDescending(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return scores[a] > scores[b];
                   });
  return order;
}

std::vector<double> EpsilonGrid(double start, double stop, double step) {
  if (!(step > 0.0)) throw ConfigError("sweep step must be positive");
  if (start < 0.0 || stop < start) {
    throw ConfigError("sweep needs 0 <= start <= stop");
  }
  std::vector<double> grid;
  const auto count =
      static_cast<std::size_t>(std::floor((stop - start) / step + 0.5));
  for (std::size_t i = 0; i <= count; ++i) {
    // Round to 12 decimals so 0.1 * 3 prints and compares as 0.3.
    grid.push_back(std::round((start + step * i) * 1e12) / 1e12);
  }
  return grid;
}

namespace {

void CheckScores(const EntropyEvaluator& evaluator,
                 const ShapleyScores& scores) {
  if (scores.values.size() != evaluator.dataset().n_features()) {
    throw ConfigError("Shapley scores have " +
                      std::to_string(scores.values.size()) +
                      " entries for a dataset with " +
                      std::to_string(evaluator.dataset().n_features()) +
                      " features");
  }
  if (scores.base != evaluator.base()) {
    throw ConfigError("Shapley scores were computed in base " +
                      ToString(scores.base) + ", entropies use base " +
                      ToString(evaluator.base()));
  }
}

// Tracks the partition of the selected set and evaluates penalties of
// candidates against it.
class PenaltyTracker {
 public:
  explicit PenaltyTracker(EntropyEvaluator& evaluator)
      : evaluator_(evaluator),
        selected_partition_(
            PartitionState::Whole(evaluator.dataset().n_rows())) {}

  const FeatureSubset& selected() const { return selected_; }

  // Penalty of each candidate against the current selection; computed in
  // parallel, each result lands in its own slot.
  std::vector<double> Penalties(std::span<const std::size_t> candidates,
                                const ParallelOptions& parallel) {
    std::vector<double> out(candidates.size(), 0.0);
    if (selected_.empty()) return out;
    std::vector<double> joint(candidates.size(), 0.0);
    ParallelFor(candidates.size(), parallel, [&](std::size_t t) {
      const std::size_t x = candidates[t];
      Refiner refiner;
      PartitionState refined;
      refiner.Refine(selected_partition_,
                     evaluator_.dataset().column(x), refined);
      joint[t] = evaluator_.EntropyOf(refined);
      if (!refiner.LastWasIndependent(selected_partition_, refined,
                                      evaluator_.CodeCounts(x))) {
        out[t] = std::max(
            0.0, evaluator_.Single(x) + selected_entropy_ - joint[t]);
      }
    });
    for (std::size_t t = 0; t < candidates.size(); ++t) {
      evaluator_.cache().Insert(selected_.With(candidates[t]), joint[t]);
    }
    return out;
  }

  void Select(std::size_t feature) {
    selected_ = selected_.With(feature);
    selected_partition_ = RefinePartition(selected_partition_,
                                          evaluator_.dataset(), feature);
    selected_entropy_ = evaluator_.EntropyOf(selected_partition_);
    evaluator_.cache().Insert(selected_, selected_entropy_);
  }

 private:
  EntropyEvaluator& evaluator_;
  FeatureSubset selected_;
  PartitionState selected_partition_;
  double selected_entropy_ = 0.0;
};

}  // namespace

RankingResult Svfs(EntropyEvaluator& evaluator, const ShapleyScores& scores,
                   double epsilon, const ParallelOptions& parallel) {
  CheckScores(evaluator, scores);
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");

  RankingResult result;
  result.config.method = RankingMethod::kSvfs;
  result.config.epsilon = epsilon;
  result.config.approx = scores.config;
  result.config.base = scores.base;

  PenaltyTracker tracker(evaluator);
  // Candidates in descending Shapley order; the first surviving one is the
  // argmax (ties already resolved by index).
  std::vector<std::size_t> pool = ArgsortDescending(scores.values);
  std::vector<double> pool_penalty(pool.size(), 0.0);

  while (!pool.empty()) {
    StepRecord step;
    step.feature = pool.front();
    step.shapley = scores.values[step.feature];
    step.penalty = pool_penalty.front();
    pool.erase(pool.begin());
    pool_penalty.erase(pool_penalty.begin());
    tracker.Select(step.feature);

    const std::vector<double> penalty = tracker.Penalties(pool, parallel);
    std::vector<std::size_t> kept;
    std::vector<double> kept_penalty;
    for (std::size_t t = 0; t < pool.size(); ++t) {
      if (penalty[t] > epsilon) {
        step.pruned.push_back(pool[t]);
      } else {
        kept.push_back(pool[t]);
        kept_penalty.push_back(penalty[t]);
      }
    }
    std::sort(step.pruned.begin(), step.pruned.end());
    pool = std::move(kept);
    pool_penalty = std::move(kept_penalty);
    result.order.push_back(step.feature);
    result.steps.push_back(std::move(step));
  }
  return result;
}

RankingResult Svfs(const CategoricalDataset& ds, double epsilon,
                   const ShapleyScores& scores) {
  EntropyEvaluator evaluator(ds, scores.base);
  return Svfs(evaluator, scores, epsilon);
}

RankingResult Svfr(EntropyEvaluator& evaluator, const ShapleyScores& scores,
                   std::optional<std::size_t> cap,
                   const ParallelOptions& parallel) {
  CheckScores(evaluator, scores);
  const std::size_t n = scores.values.size();
  if (cap && *cap == 0) throw ConfigError("cap must be >= 1");
  const std::size_t limit = cap ? std::min(*cap, n) : n;

  RankingResult result;
  result.config.method = RankingMethod::kSvfr;
  result.config.cap = cap;
  result.config.approx = scores.config;
  result.config.base = scores.base;

  PenaltyTracker tracker(evaluator);
  std::vector<std::size_t> remaining(n);
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});

  while (result.order.size() < limit) {
    const std::vector<double> penalty = tracker.Penalties(remaining, parallel);
    std::size_t best = 0;
    double best_rk = 0.0;
    for (std::size_t t = 0; t < remaining.size(); ++t) {
      const double rk = scores.values[remaining[t]] - penalty[t];
      // remaining is ascending, so strict > keeps the lowest index on ties.
      if (t == 0 || rk > best_rk) {
        best = t;
        best_rk = rk;
      }
    }
    StepRecord step;
    step.feature = remaining[best];
    step.shapley = scores.values[step.feature];
    step.penalty = penalty[best];
    step.rk = best_rk;
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
    tracker.Select(step.feature);
    result.order.push_back(step.feature);
    result.steps.push_back(std::move(step));
  }
  return result;
}

RankingResult Svfr(const CategoricalDataset& ds, const ShapleyScores& scores,
                   std::optional<std::size_t> cap) {
  EntropyEvaluator evaluator(ds, scores.base);
  return Svfr(evaluator, scores, cap);
}

std::vector<RankingResult> SvfsSweep(EntropyEvaluator& evaluator,
                                     const ShapleyScores& scores,
                                     std::span<const double> epsilons,
                                     const ParallelOptions& parallel) {
  std::vector<RankingResult> runs;
  runs.reserve(epsilons.size());
  for (double eps : epsilons) {
    runs.push_back(Svfs(evaluator, scores, eps, parallel));
  }
  return runs;
}

}  // namespace tcshap
