#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "tcshap/dataset.h"
#include "tcshap/feature_subset.h"
#include "tcshap/log_base.h"

namespace tcshap {

// Entropy of an empirical distribution given its cell counts (zeros are
// ignored). The sum runs over distinct count values in ascending order, so
// the result depends only on the multiset of counts: any two routes that
// produce the same partition of the rows produce bit-identical entropies.
class EntropyTable {
 public:
  EntropyTable(std::size_t n_rows, LogBase base);

  double FromCounts(std::span<const std::uint32_t> counts) const;
  // Contribution -(c/D) log(c/D) of a single cell, in the table's unit.
  double Term(std::uint32_t count) const { return term_[count]; }
  std::size_t n_rows() const { return term_.size() - 1; }
  LogBase base() const { return base_; }

 private:
  LogBase base_;
  std::vector<double> term_;
};

// Rows grouped by their code tuple over some prefix of features.
struct PartitionState {
  std::vector<std::uint32_t> group_ids;  // per row, dense in [0, n_groups)
  std::vector<std::uint32_t> counts;     // per group
  std::uint32_t n_groups = 0;

  // The partition of the empty prefix: a single group holding every row.
  static PartitionState Whole(std::size_t n_rows);
};

// Splits every group of state by the codes of one feature. Group ids of the
// result follow first appearance in row order.
PartitionState RefinePartition(const PartitionState& state,
                               const CategoricalDataset& ds,
                               std::size_t feature);
double EntropyOfPartition(const PartitionState& state, LogBase base);

// Number of partition refinements performed by this process so far. Lets
// callers measure the work an estimator actually did.
std::uint64_t RefinementCount();

// Reusable refinement workspace for hot loops.
class Refiner {
 public:
  // Writes the refinement of `in` by `col` into `out` (which may not alias
  // `in`).
  void Refine(const PartitionState& in, const FeatureColumn& col,
              PartitionState& out);

  // True when the last Refine split the rows into a product partition, i.e.
  // the feature is empirically independent of the prefix. Uses exact integer
  // arithmetic; col_counts are the per-code counts of the refined column.
  bool LastWasIndependent(const PartitionState& in,
                          const PartitionState& out,
                          std::span<const std::uint32_t> col_counts) const;

 private:
  std::vector<std::int32_t> table_;
  std::vector<std::uint64_t> touched_;
  std::unordered_map<std::uint64_t, std::uint32_t> sparse_;
  std::vector<std::uint32_t> parent_group_;
  std::vector<std::uint32_t> parent_code_;
};

// H(A) computed by hashing the code tuples of each row. H(empty) = 0.
double JointEntropy(const CategoricalDataset& ds, const FeatureSubset& subset,
                    LogBase base = LogBase::kTwo);
// C(A) = sum of H(X) over X in A minus H(A).
double TotalCorrelation(const CategoricalDataset& ds,
                        const FeatureSubset& subset,
                        LogBase base = LogBase::kTwo);
// H(A) + H(X) - H(A u X), clamped at zero against rounding. Throws
// ConfigError when feature is already in subset.
double MarginalContribution(const CategoricalDataset& ds,
                            const FeatureSubset& subset, std::size_t feature,
                            LogBase base = LogBase::kTwo);

// Memo of subset entropies for one (dataset, base). Safe for concurrent
// lookups and inserts; concurrent inserts of the same key store equal values.
class EntropyCache {
 public:
  std::optional<double> Find(const FeatureSubset& subset) const;
  void Insert(const FeatureSubset& subset, double value);

  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }
  std::size_t size() const;

 private:
  mutable std::shared_mutex mu_;
  std::unordered_map<std::uint64_t, double> by_mask_;
  std::unordered_map<FeatureSubset, double, FeatureSubsetHash> by_indices_;
  mutable std::atomic<std::uint64_t> hits_{0};
  mutable std::atomic<std::uint64_t> misses_{0};
};

// Entropy queries bound to one dataset and base, backed by an EntropyCache.
// The dataset must outlive the evaluator.
class EntropyEvaluator {
 public:
  EntropyEvaluator(const CategoricalDataset& ds, LogBase base);

  const CategoricalDataset& dataset() const { return ds_; }
  LogBase base() const { return base_; }
  const EntropyTable& table() const { return table_; }
  EntropyCache& cache() { return cache_; }
  const EntropyCache& cache() const { return cache_; }

  double Single(std::size_t feature) const { return singles_.at(feature); }
  std::span<const double> singles() const { return singles_; }
  std::span<const std::uint32_t> CodeCounts(std::size_t feature) const {
    return code_counts_.at(feature);
  }

  double Entropy(const FeatureSubset& subset);
  double TotalCorrelation(const FeatureSubset& subset);
  // H(A) + H(X) - H(A u X), zero when X is exactly independent of A.
  double MarginalContribution(const FeatureSubset& subset,
                              std::size_t feature);

  PartitionState Partition(const FeatureSubset& subset) const;
  double EntropyOf(const PartitionState& state) const;

 private:
  const CategoricalDataset& ds_;
  LogBase base_;
  EntropyTable table_;
  std::vector<double> singles_;
  std::vector<std::vector<std::uint32_t>> code_counts_;
  EntropyCache cache_;
};

}  // namespace tcshap
