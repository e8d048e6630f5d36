#include "tcshap/entropy.h"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "tcshap/error.h"

namespace tcshap {

LogBase ParseLogBase(std::string_view text) {
  if (text == "2") return LogBase::kTwo;
  if (text == "e") return LogBase::kE;
  if (text == "10") return LogBase::kTen;
  throw ConfigError("log base must be 2, e or 10, got '" + std::string(text) +
                    "'");
}

std::string ToString(LogBase base) {
  switch (base) {
    case LogBase::kTwo:
      return "2";
    case LogBase::kE:
      return "e";
    case LogBase::kTen:
      return "10";
  }
  return "?";
}

double LnOfBase(LogBase base) {
  switch (base) {
    case LogBase::kTwo:
      return std::log(2.0);
    case LogBase::kE:
      return 1.0;
    case LogBase::kTen:
      return std::log(10.0);
  }
  return 1.0;
}

// ---------------------------------------------------------------------------
// EntropyTable

EntropyTable::EntropyTable(std::size_t n_rows, LogBase base)
    : base_(base), term_(n_rows + 1, 0.0) {
  const double d = static_cast<double>(n_rows);
  const double ln_base = LnOfBase(base);
  for (std::size_t c = 1; c <= n_rows; ++c) {
    const double p = static_cast<double>(c) / d;
    term_[c] = -p * std::log(p) / ln_base;
  }
}

double EntropyTable::FromCounts(std::span<const std::uint32_t> counts) const {
  const std::size_t d = n_rows();
  double h = 0.0;
  // Two equivalent ways to walk the distinct counts in ascending order; both
  // perform the same floating-point operations in the same sequence.
  if (counts.size() * 16 < d) {
    thread_local std::vector<std::uint32_t> sorted;
    sorted.clear();
    for (std::uint32_t c : counts) {
      if (c != 0) sorted.push_back(c);
    }
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      h += static_cast<double>(j - i) * term_[sorted[i]];
      i = j;
    }
  } else {
    thread_local std::vector<std::uint32_t> hist;
    hist.assign(d + 1, 0);
    std::uint32_t max_c = 0;
    for (std::uint32_t c : counts) {
      ++hist[c];
      max_c = std::max(max_c, c);
    }
    for (std::uint32_t c = 1; c <= max_c; ++c) {
      if (hist[c] != 0) h += static_cast<double>(hist[c]) * term_[c];
    }
  }
  return h;
}

// ---------------------------------------------------------------------------
// Partitions

namespace {
std::atomic<std::uint64_t> g_refinements{0};
}  // namespace

std::uint64_t RefinementCount() {
  return g_refinements.load(std::memory_order_relaxed);
}

PartitionState PartitionState::Whole(std::size_t n_rows) {
  PartitionState s;
  s.group_ids.assign(n_rows, 0);
  s.counts.assign(1, static_cast<std::uint32_t>(n_rows));
  s.n_groups = 1;
  return s;
}

void Refiner::Refine(const PartitionState& in, const FeatureColumn& col,
                     PartitionState& out) {
  g_refinements.fetch_add(1, std::memory_order_relaxed);
  const std::size_t n_rows = in.group_ids.size();
  const std::uint64_t arity = col.arity;
  const std::uint64_t cells = static_cast<std::uint64_t>(in.n_groups) * arity;

  out.group_ids.resize(n_rows);
  out.counts.clear();
  parent_group_.clear();
  parent_code_.clear();

  auto emit = [&](std::uint32_t g, Code code) {
    parent_group_.push_back(g);
    parent_code_.push_back(code);
    out.counts.push_back(0);
    return static_cast<std::uint32_t>(out.counts.size() - 1);
  };

  const std::uint64_t dense_limit =
      std::max<std::uint64_t>(std::uint64_t{1} << 16, 8 * n_rows);
  if (cells <= dense_limit) {
    if (table_.size() < cells) table_.resize(cells, -1);
    touched_.clear();
    for (std::size_t r = 0; r < n_rows; ++r) {
      const std::uint32_t g = in.group_ids[r];
      const Code code = col.codes[r];
      const std::uint64_t key = g * arity + code;
      std::int32_t id = table_[key];
      if (id < 0) {
        id = static_cast<std::int32_t>(emit(g, code));
        table_[key] = id;
        touched_.push_back(key);
      }
      out.group_ids[r] = static_cast<std::uint32_t>(id);
      ++out.counts[id];
    }
    for (std::uint64_t key : touched_) table_[key] = -1;
  } else {
    sparse_.clear();
    for (std::size_t r = 0; r < n_rows; ++r) {
      const std::uint32_t g = in.group_ids[r];
      const Code code = col.codes[r];
      auto [it, inserted] = sparse_.try_emplace(g * arity + code, 0);
      if (inserted) it->second = emit(g, code);
      out.group_ids[r] = it->second;
      ++out.counts[it->second];
    }
  }
  out.n_groups = static_cast<std::uint32_t>(out.counts.size());
}

bool Refiner::LastWasIndependent(
    const PartitionState& in, const PartitionState& out,
    std::span<const std::uint32_t> col_counts) const {
  std::size_t present_codes = 0;
  for (std::uint32_t c : col_counts) present_codes += c != 0;
  if (static_cast<std::uint64_t>(out.n_groups) !=
      static_cast<std::uint64_t>(in.n_groups) * present_codes) {
    return false;
  }
  const std::uint64_t d = in.group_ids.size();
  for (std::uint32_t k = 0; k < out.n_groups; ++k) {
    const std::uint64_t joint = out.counts[k];
    const std::uint64_t lhs = joint * d;
    const std::uint64_t rhs = static_cast<std::uint64_t>(
                                  in.counts[parent_group_[k]]) *
                              col_counts[parent_code_[k]];
    if (lhs != rhs) return false;
  }
  return true;
}

PartitionState RefinePartition(const PartitionState& state,
                               const CategoricalDataset& ds,
                               std::size_t feature) {
  if (state.group_ids.size() != ds.n_rows()) {
    throw ConfigError("partition does not match the dataset's row count");
  }
  Refiner refiner;
  PartitionState out;
  refiner.Refine(state, ds.column(feature), out);
  return out;
}

double EntropyOfPartition(const PartitionState& state, LogBase base) {
  return EntropyTable(state.group_ids.size(), base).FromCounts(state.counts);
}

// ---------------------------------------------------------------------------
// Direct (hash-based) entropies

double JointEntropy(const CategoricalDataset& ds, const FeatureSubset& subset,
                    LogBase base) {
  if (subset.empty()) return 0.0;
  if (subset.bound() > ds.n_features()) {
    throw ConfigError("subset " + subset.ToString() + " out of range");
  }
  const std::size_t n_rows = ds.n_rows();

  // Mixed-radix key when the product of arities fits in 64 bits, otherwise
  // the raw code bytes.
  bool fits = true;
  std::uint64_t radix_product = 1;
  for (std::size_t j : subset.indices()) {
    const std::uint64_t a = ds.column(j).arity;
    if (radix_product > UINT64_MAX / a) {
      fits = false;
      break;
    }
    radix_product *= a;
  }

  std::vector<std::uint32_t> counts;
  if (fits) {
    std::unordered_map<std::uint64_t, std::uint32_t> cells;
    for (std::size_t r = 0; r < n_rows; ++r) {
      std::uint64_t key = 0;
      for (std::size_t j : subset.indices()) {
        key = key * ds.column(j).arity + ds.column(j).codes[r];
      }
      ++cells[key];
    }
    counts.reserve(cells.size());
    for (const auto& [key, c] : cells) counts.push_back(c);
  } else {
    std::unordered_map<std::string, std::uint32_t> cells;
    std::string key;
    for (std::size_t r = 0; r < n_rows; ++r) {
      key.clear();
      for (std::size_t j : subset.indices()) {
        const Code c = ds.column(j).codes[r];
        key.append(reinterpret_cast<const char*>(&c), sizeof c);
      }
      ++cells[key];
    }
    counts.reserve(cells.size());
    for (const auto& [k, c] : cells) counts.push_back(c);
  }
  return EntropyTable(n_rows, base).FromCounts(counts);
}

double TotalCorrelation(const CategoricalDataset& ds,
                        const FeatureSubset& subset, LogBase base) {
  if (subset.size() <= 1) return 0.0;
  double sum = 0.0;
  for (std::size_t j : subset.indices()) {
    sum += JointEntropy(ds, FeatureSubset{j}, base);
  }
  return std::max(0.0, sum - JointEntropy(ds, subset, base));
}

double MarginalContribution(const CategoricalDataset& ds,
                            const FeatureSubset& subset, std::size_t feature,
                            LogBase base) {
  if (subset.contains(feature)) {
    throw ConfigError("feature " + std::to_string(feature) +
                      " is already in " + subset.ToString());
  }
  if (subset.empty()) return 0.0;
  const double m = JointEntropy(ds, subset, base) +
                   JointEntropy(ds, FeatureSubset{feature}, base) -
                   JointEntropy(ds, subset.With(feature), base);
  return std::max(0.0, m);
}

// ---------------------------------------------------------------------------
// EntropyCache

std::optional<double> EntropyCache::Find(const FeatureSubset& subset) const {
  std::shared_lock lock(mu_);
  if (auto mask = subset.mask()) {
    if (auto it = by_mask_.find(*mask); it != by_mask_.end()) {
      ++hits_;
      return it->second;
    }
  } else if (auto it = by_indices_.find(subset); it != by_indices_.end()) {
    ++hits_;
    return it->second;
  }
  ++misses_;
  return std::nullopt;
}

void EntropyCache::Insert(const FeatureSubset& subset, double value) {
  std::unique_lock lock(mu_);
  if (auto mask = subset.mask()) {
    by_mask_[*mask] = value;
  } else {
    by_indices_[subset] = value;
  }
}

std::size_t EntropyCache::size() const {
  std::shared_lock lock(mu_);
  return by_mask_.size() + by_indices_.size();
}

// ---------------------------------------------------------------------------
// EntropyEvaluator

EntropyEvaluator::EntropyEvaluator(const CategoricalDataset& ds, LogBase base)
    : ds_(ds), base_(base), table_(ds.n_rows(), base) {
  singles_.reserve(ds.n_features());
  code_counts_.reserve(ds.n_features());
  for (const FeatureColumn& col : ds.columns()) {
    std::vector<std::uint32_t> counts(col.arity, 0);
    for (Code c : col.codes) ++counts[c];
    singles_.push_back(table_.FromCounts(counts));
    code_counts_.push_back(std::move(counts));
  }
}

PartitionState EntropyEvaluator::Partition(const FeatureSubset& subset) const {
  if (subset.bound() > ds_.n_features()) {
    throw ConfigError("subset " + subset.ToString() + " out of range");
  }
  PartitionState state = PartitionState::Whole(ds_.n_rows());
  PartitionState next;
  Refiner refiner;
  for (std::size_t j : subset.indices()) {
    refiner.Refine(state, ds_.column(j), next);
    std::swap(state, next);
  }
  return state;
}

double EntropyEvaluator::EntropyOf(const PartitionState& state) const {
  return table_.FromCounts(state.counts);
}

double EntropyEvaluator::Entropy(const FeatureSubset& subset) {
  if (subset.empty()) return 0.0;
  if (subset.size() == 1) return Single(subset.indices().front());
  if (auto hit = cache_.Find(subset)) return *hit;
  const double h = EntropyOf(Partition(subset));
  cache_.Insert(subset, h);
  return h;
}

double EntropyEvaluator::TotalCorrelation(const FeatureSubset& subset) {
  if (subset.size() <= 1) return 0.0;
  double sum = 0.0;
  for (std::size_t j : subset.indices()) sum += Single(j);
  return std::max(0.0, sum - Entropy(subset));
}

double EntropyEvaluator::MarginalContribution(const FeatureSubset& subset,
                                              std::size_t feature) {
  if (subset.contains(feature)) {
    throw ConfigError("feature " + std::to_string(feature) +
                      " is already in " + subset.ToString());
  }
  if (subset.empty()) return 0.0;
  if (feature >= ds_.n_features()) {
    throw ConfigError("feature " + std::to_string(feature) + " out of range");
  }
  const PartitionState prefix = Partition(subset);
  PartitionState joined;
  Refiner refiner;
  refiner.Refine(prefix, ds_.column(feature), joined);
  const double h_joined = EntropyOf(joined);
  cache_.Insert(subset.With(feature), h_joined);
  if (refiner.LastWasIndependent(prefix, joined, CodeCounts(feature))) {
    return 0.0;
  }
  return std::max(0.0, Entropy(subset) + Single(feature) - h_joined);
}

}  // namespace tcshap
