#include "tcshap/shapley.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "tcshap/error.h"

namespace tcshap {

// ---------------------------------------------------------------------------
// ApproxConfig

namespace {

std::size_t ParseCount(std::string_view text, std::string_view what) {
  std::size_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value == 0) {
    throw ConfigError(std::string(what) + " must be a positive integer, got '" +
                      std::string(text) + "'");
  }
  return value;
}

}  // namespace

ApproxConfig ApproxConfig::Parse(std::string_view text, std::uint64_t seed) {
  if (text == "full") return Full();
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view tail =
      colon == std::string_view::npos ? "" : text.substr(colon + 1);
  if (head == "bounded") return Bounded(ParseCount(tail, "bounded:K"));
  if (head == "sampled") return Sampled(ParseCount(tail, "sampled:N"), seed);
  throw ConfigError("approximation must be full, bounded:K or sampled:N, got '" +
                    std::string(text) + "'");
}

std::string ApproxConfig::MethodName() const {
  switch (method) {
    case ShapleyMethod::kFull:
      return "full";
    case ShapleyMethod::kBounded:
      return "bounded";
    case ShapleyMethod::kSampled:
      return "sampled";
  }
  return "?";
}

std::string ApproxConfig::ToString() const {
  switch (method) {
    case ShapleyMethod::kFull:
      return "full";
    case ShapleyMethod::kBounded:
      return "bounded:" + std::to_string(k);
    case ShapleyMethod::kSampled:
      return "sampled:" + std::to_string(n);
  }
  return "?";
}

void ApproxConfig::Validate() const {
  if (method == ShapleyMethod::kBounded && k == 0) {
    throw ConfigError("bounded estimator needs k >= 1");
  }
  if (method == ShapleyMethod::kSampled && n == 0) {
    throw ConfigError("sampled estimator needs n >= 1");
  }
}

// ---------------------------------------------------------------------------
// FixedPointSum

namespace {
constexpr int kFixedPointBits = 90;
}

void FixedPointSum::Add(double x) {
  acc_ += static_cast<__int128>(std::nearbyint(std::ldexp(x, kFixedPointBits)));
}

double FixedPointSum::Value() const {
  return std::ldexp(static_cast<double>(acc_), -kFixedPointBits);
}

// ---------------------------------------------------------------------------
// Helpers

namespace {

// 1 / (N * binom(N-1, s)) for s = 0..N-1.
std::vector<double> ShapleyWeights(std::size_t n) {
  std::vector<double> w(n);
  double binom = 1.0;  // binom(n-1, s)
  for (std::size_t s = 0; s < n; ++s) {
    w[s] = 1.0 / (static_cast<double>(n) * binom);
    binom = binom * static_cast<double>(n - 1 - s) / static_cast<double>(s + 1);
  }
  return w;
}

double Marginal(double h_prefix, double h_feature, double h_union) {
  return std::max(0.0, h_prefix + h_feature - h_union);
}

ShapleyScores MakeScores(std::size_t n_features, const ApproxConfig& config,
                         LogBase base) {
  ShapleyScores scores;
  scores.values.assign(n_features, 0.0);
  scores.config = config;
  scores.base = base;
  return scores;
}

// Depth-first enumeration of subsets, one refinement per visited subset.
// Reuses one partition per depth.
class SubsetWalker {
 public:
  SubsetWalker(const CategoricalDataset& ds, const EntropyTable& table,
               std::size_t max_depth)
      : ds_(ds), table_(table), stack_(max_depth + 1) {}

  PartitionState& at(std::size_t depth) { return stack_[depth]; }

  // Refines level depth by feature into level depth + 1 and returns the
  // entropy of the result.
  double Extend(std::size_t depth, std::size_t feature) {
    refiner_.Refine(stack_[depth], ds_.column(feature), stack_[depth + 1]);
    return table_.FromCounts(stack_[depth + 1].counts);
  }

 private:
  const CategoricalDataset& ds_;
  const EntropyTable& table_;
  std::vector<PartitionState> stack_;
  Refiner refiner_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Full

ShapleyScores ShapleyFull(const CategoricalDataset& ds, LogBase base,
                          const ShapleyOptions& options) {
  const std::size_t n = ds.n_features();
  const std::size_t limit = std::min<std::size_t>(options.max_exact_features, 62);
  if (n > limit) {
    throw ConfigError("exact Shapley values need 2^" + std::to_string(n) +
                      " entropies; the limit is N = " + std::to_string(limit) +
                      ". Use bounded:K or sampled:N instead");
  }
  const std::uint64_t n_subsets = std::uint64_t{1} << n;
  const EntropyTable table(ds.n_rows(), base);
  std::vector<double> entropy(n_subsets, 0.0);

  // Split the lattice by the values of the top `high` features; each task
  // enumerates the 2^(n - high) subsets of the remaining low features.
  const std::size_t high = std::min<std::size_t>(n, 6);
  const std::size_t low = n - high;
  ParallelFor(std::size_t{1} << high, options.parallel, [&](std::size_t task) {
    SubsetWalker walker(ds, table, n);
    const std::uint64_t base_mask = static_cast<std::uint64_t>(task) << low;
    walker.at(0) = PartitionState::Whole(ds.n_rows());
    std::size_t depth = 0;
    double h = 0.0;
    for (std::size_t j = low; j < n; ++j) {
      if ((base_mask >> j) & 1u) h = walker.Extend(depth++, j);
    }
    entropy[base_mask] = h;

    auto dfs = [&](auto&& self, std::size_t d, std::uint64_t mask,
                   std::size_t start) -> void {
      for (std::size_t j = start; j < low; ++j) {
        const std::uint64_t child = mask | (std::uint64_t{1} << j);
        entropy[child] = walker.Extend(d, j);
        self(self, d + 1, child, j + 1);
      }
    };
    dfs(dfs, depth, base_mask, 0);
  });

  const std::vector<double> weight = ShapleyWeights(n);
  ShapleyScores scores = MakeScores(n, ApproxConfig::Full(), base);
  scores.n_value_evals = n_subsets;
  ParallelFor(n, options.parallel, [&](std::size_t i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    const std::uint64_t below = bit - 1;
    const double h_i = entropy[bit];
    FixedPointSum sum;
    for (std::uint64_t r = 0; r < n_subsets / 2; ++r) {
      const std::uint64_t mask = ((r & ~below) << 1) | (r & below);
      sum.Add(weight[PopCount(mask)] *
              Marginal(entropy[mask], h_i, entropy[mask | bit]));
    }
    scores.values[i] = sum.Value();
  });
  return scores;
}

// ---------------------------------------------------------------------------
// Bounded

namespace {

// Colex ranking of k-subsets of {0..n-1}, with one flat index space for all
// sizes 0..max_size.
class SubsetIndex {
 public:
  SubsetIndex(std::size_t n, std::size_t max_size)
      : binom_(n + 1, std::vector<std::uint64_t>(max_size + 2, 0)),
        offset_(max_size + 2, 0) {
    constexpr std::uint64_t kCap = std::uint64_t{1} << 62;
    for (std::size_t a = 0; a <= n; ++a) {
      binom_[a][0] = 1;
      for (std::size_t s = 1; s <= max_size + 1 && s <= a; ++s) {
        binom_[a][s] = std::min(kCap, binom_[a - 1][s - 1] + binom_[a - 1][s]);
      }
    }
    for (std::size_t s = 0; s <= max_size; ++s) {
      offset_[s + 1] = std::min(kCap, offset_[s] + binom_[n][s]);
    }
  }

  std::uint64_t total() const { return offset_.back(); }
  std::uint64_t Binom(std::size_t a, std::size_t s) const {
    return s < binom_[a].size() ? binom_[a][s] : 0;
  }

  // Index of the sorted subset `items`.
  std::uint64_t Index(std::span<const std::size_t> items) const {
    std::uint64_t rank = offset_[items.size()];
    for (std::size_t t = 0; t < items.size(); ++t) {
      rank += binom_[items[t]][t + 1];
    }
    return rank;
  }

  // Index of items u {extra}, extra not in items.
  std::uint64_t IndexWith(std::span<const std::size_t> items,
                          std::size_t extra) const {
    std::uint64_t rank = offset_[items.size() + 1];
    std::size_t t = 0;
    bool placed = false;
    for (std::size_t item : items) {
      if (!placed && extra < item) {
        rank += binom_[extra][t + 1];
        ++t;
        placed = true;
      }
      rank += binom_[item][t + 1];
      ++t;
    }
    if (!placed) rank += binom_[extra][t + 1];
    return rank;
  }

 private:
  std::vector<std::vector<std::uint64_t>> binom_;
  std::vector<std::uint64_t> offset_;
};

}  // namespace

ShapleyScores ShapleyBounded(const CategoricalDataset& ds, std::size_t k,
                             LogBase base, const ShapleyOptions& options,
                             bool renormalize) {
  const std::size_t n = ds.n_features();
  if (k < 1 || k > n) {
    throw ConfigError("bounded estimator needs 1 <= k <= N (k = " +
                      std::to_string(k) + ", N = " + std::to_string(n) + ")");
  }
  const SubsetIndex index(n, k);
  if (index.total() > (std::uint64_t{1} << 31)) {
    throw ConfigError("bounded:" + std::to_string(k) + " needs " +
                      std::to_string(index.total()) +
                      " subset entropies; lower k or use sampled:N");
  }
  const EntropyTable table(ds.n_rows(), base);
  std::vector<double> entropy(index.total(), 0.0);

  // Task t enumerates the subsets whose smallest feature is t, up to size k.
  ParallelFor(n, options.parallel, [&](std::size_t first) {
    SubsetWalker walker(ds, table, k);
    walker.at(0) = PartitionState::Whole(ds.n_rows());
    std::vector<std::size_t> items{first};
    entropy[index.Index(items)] = walker.Extend(0, first);
    auto dfs = [&](auto&& self, std::size_t depth) -> void {
      if (items.size() == k) return;
      for (std::size_t j = items.back() + 1; j < n; ++j) {
        items.push_back(j);
        entropy[index.Index(items)] = walker.Extend(depth, j);
        self(self, depth + 1);
        items.pop_back();
      }
    };
    dfs(dfs, 1);
  });

  std::vector<double> weight = ShapleyWeights(n);
  if (renormalize) {
    for (double& w : weight) {
      w *= static_cast<double>(n) / static_cast<double>(k);
    }
  }

  // Assembly: coalitions A with |A| <= k - 1, grouped by smallest element
  // (task n holds A = empty set). Integer partial sums merge exactly.
  std::vector<std::vector<FixedPointSum>> partial(
      n + 1, std::vector<FixedPointSum>(n));
  ParallelFor(n + 1, options.parallel, [&](std::size_t task) {
    std::vector<FixedPointSum>& acc = partial[task];
    std::vector<std::size_t> items;
    auto add_terms = [&] {
      const double h_a = entropy[index.Index(items)];
      const double w = weight[items.size()];
      for (std::size_t i = 0; i < n; ++i) {
        if (std::binary_search(items.begin(), items.end(), i)) continue;
        const std::size_t single[1] = {i};
        const double h_i = entropy[index.Index(single)];
        acc[i].Add(w * Marginal(h_a, h_i, entropy[index.IndexWith(items, i)]));
      }
    };
    if (task == n) {
      add_terms();
      return;
    }
    if (k < 2) return;
    items.push_back(task);
    add_terms();
    auto dfs = [&](auto&& self) -> void {
      if (items.size() + 1 >= k) return;
      for (std::size_t j = items.back() + 1; j < n; ++j) {
        items.push_back(j);
        add_terms();
        self(self);
        items.pop_back();
      }
    };
    dfs(dfs);
  });

  ShapleyScores scores =
      MakeScores(n, ApproxConfig::Bounded(k, renormalize), base);
  scores.n_value_evals = index.total();
  for (std::size_t i = 0; i < n; ++i) {
    FixedPointSum sum;
    for (const auto& acc : partial) sum.Add(acc[i]);
    scores.values[i] = sum.Value();
  }
  return scores;
}

// ---------------------------------------------------------------------------
// Sampled

std::uint64_t UniformBelow(std::mt19937_64& rng, std::uint64_t bound) {
  // Lemire, "Fast Random Integer Generation in an Interval" (2019).
  unsigned __int128 m = static_cast<unsigned __int128>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(rng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::vector<std::vector<std::size_t>> SamplePermutations(
    std::size_t n_features, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> perms(n);
  for (auto& p : perms) {
    p.resize(n_features);
    std::iota(p.begin(), p.end(), std::size_t{0});
    for (std::size_t i = n_features; i > 1; --i) {
      std::swap(p[i - 1], p[UniformBelow(rng, i)]);
    }
  }
  return perms;
}

PermutationWalk WalkPermutation(const EntropyEvaluator& evaluator,
                                std::span<const std::size_t> order) {
  const CategoricalDataset& ds = evaluator.dataset();
  PermutationWalk walk;
  walk.marginals.assign(ds.n_features(), 0.0);
  PartitionState prefix = PartitionState::Whole(ds.n_rows());
  PartitionState next;
  Refiner refiner;
  double h_prefix = 0.0;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t x = order[pos];
    refiner.Refine(prefix, ds.column(x), next);
    const double h_next = evaluator.EntropyOf(next);
    if (pos > 0 &&
        !refiner.LastWasIndependent(prefix, next, evaluator.CodeCounts(x))) {
      walk.marginals[x] = Marginal(h_prefix, evaluator.Single(x), h_next);
    }
    std::swap(prefix, next);
    h_prefix = h_next;
  }
  walk.final_entropy = h_prefix;
  return walk;
}

ShapleyScores ShapleySampled(const CategoricalDataset& ds, std::size_t n,
                             std::uint64_t seed, LogBase base,
                             const ShapleyOptions& options) {
  if (n == 0) throw ConfigError("sampled estimator needs n >= 1");
  const std::size_t n_features = ds.n_features();
  const EntropyEvaluator evaluator(ds, base);
  const auto perms = SamplePermutations(n_features, n, seed);

  std::vector<double> sum(n_features, 0.0);
  std::vector<double> sum_sq(n_features, 0.0);
  constexpr std::size_t kBlock = 256;
  std::vector<std::vector<double>> block(kBlock);
  for (std::size_t start = 0; start < n; start += kBlock) {
    const std::size_t len = std::min(kBlock, n - start);
    ParallelFor(len, options.parallel, [&](std::size_t t) {
      block[t] = WalkPermutation(evaluator, perms[start + t]).marginals;
    });
    // Fixed reduction order: permutation index, then feature.
    for (std::size_t t = 0; t < len; ++t) {
      for (std::size_t i = 0; i < n_features; ++i) {
        sum[i] += block[t][i];
        sum_sq[i] += block[t][i] * block[t][i];
      }
    }
  }

  ShapleyScores scores =
      MakeScores(n_features, ApproxConfig::Sampled(n, seed), base);
  scores.n_value_evals = static_cast<std::uint64_t>(n) * n_features;
  scores.standard_errors.assign(n_features, std::nan(""));
  const double count = static_cast<double>(n);
  for (std::size_t i = 0; i < n_features; ++i) {
    const double mean = sum[i] / count;
    scores.values[i] = mean;
    if (n > 1) {
      const double var =
          std::max(0.0, (sum_sq[i] - count * mean * mean) / (count - 1.0));
      scores.standard_errors[i] = std::sqrt(var / count);
    }
  }
  return scores;
}

// ---------------------------------------------------------------------------
// Oracle

ShapleyScores ShapleyOraclePermutations(const CategoricalDataset& ds,
                                        LogBase base) {
  const std::size_t n = ds.n_features();
  if (n > 8) {
    throw ConfigError("the permutation oracle enumerates N! orderings; N <= 8");
  }
  std::unordered_map<std::uint64_t, double> memo;
  auto h = [&](std::uint64_t mask) {
    auto it = memo.find(mask);
    if (it != memo.end()) return it->second;
    const double v = JointEntropy(ds, FeatureSubset::FromMask(mask), base);
    memo.emplace(mask, v);
    return v;
  };

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> total(n, 0.0);
  std::uint64_t n_orders = 0;
  do {
    std::uint64_t prefix = 0;
    for (std::size_t x : order) {
      const std::uint64_t bit = std::uint64_t{1} << x;
      total[x] += Marginal(h(prefix), h(bit), h(prefix | bit));
      prefix |= bit;
    }
    ++n_orders;
  } while (std::next_permutation(order.begin(), order.end()));

  ShapleyScores scores = MakeScores(n, ApproxConfig::Full(), base);
  for (std::size_t i = 0; i < n; ++i) {
    scores.values[i] = total[i] / static_cast<double>(n_orders);
  }
  scores.n_value_evals = memo.size();
  return scores;
}

ShapleyScores ComputeShapley(const CategoricalDataset& ds,
                             const ApproxConfig& config, LogBase base,
                             const ShapleyOptions& options) {
  config.Validate();
  switch (config.method) {
    case ShapleyMethod::kFull:
      return ShapleyFull(ds, base, options);
    case ShapleyMethod::kBounded:
      return ShapleyBounded(ds, config.k, base, options, config.renormalize);
    case ShapleyMethod::kSampled:
      return ShapleySampled(ds, config.n, config.seed, base, options);
  }
  throw ConfigError("unknown estimator");
}

}  // namespace tcshap
