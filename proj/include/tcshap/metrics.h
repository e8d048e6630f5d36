#pragma once

#include <span>
#include <vector>

#include "tcshap/dataset.h"
#include "tcshap/feature_subset.h"
#include "tcshap/ranking.h"

namespace tcshap {

// |Pearson correlation| of the integer codes; 0 when either column is
// constant. Throws ConfigError on a length mismatch.
double PearsonAbs(const FeatureColumn& a, const FeatureColumn& b);

struct PairCorrelation {
  std::size_t i = 0;
  std::size_t j = 0;
  double rho = 0.0;
};

struct RedundancyReport {
  // sum over ordered pairs X != Y of rho, divided by 2 m (m - 1)
  double raw = 0.0;
  // plain mean over the m (m - 1) / 2 unordered pairs
  double mean_abs_pairwise = 0.0;
  // 100 * mean_abs_pairwise / normalizer, 0 when the normalizer is 0
  double scaled_0_100 = 0.0;
  // largest |rho| over all feature pairs of the dataset
  double normalizer = 0.0;
  std::vector<PairCorrelation> pairs;
};

// Largest pairwise |rho| across every pair of features in ds.
double MaxPairwiseCorrelation(const CategoricalDataset& ds);

// Needs at least two selected features.
RedundancyReport RedundancyRate(const CategoricalDataset& ds,
                                const FeatureSubset& selected);
// Same, with a precomputed normalizer.
RedundancyReport RedundancyRate(const CategoricalDataset& ds,
                                const FeatureSubset& selected,
                                double normalizer);

// |top_k(reference) n top_k(candidate)| / k.
double RecallAtK(std::span<const std::size_t> reference,
                 std::span<const std::size_t> candidate, std::size_t k);
double RecallAtK(const RankingResult& reference,
                 const RankingResult& candidate, std::size_t k);

}  // namespace tcshap
