#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tcshap {

// Set of feature indices, kept strictly increasing. Also carries a bitmask
// when every index is below 64, which is what the exact estimators and the
// entropy cache key on.
class FeatureSubset {
 public:
  FeatureSubset() = default;
  // Sorts the indices; throws ConfigError on duplicates.
  explicit FeatureSubset(std::vector<std::size_t> indices);
  FeatureSubset(std::initializer_list<std::size_t> indices)
      : FeatureSubset(std::vector<std::size_t>(indices)) {}

  static FeatureSubset FromMask(std::uint64_t mask);
  // {0, 1, ..., n - 1}
  static FeatureSubset All(std::size_t n);

  std::span<const std::size_t> indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool contains(std::size_t feature) const;
  // Largest index + 1, or 0 when empty.
  std::size_t bound() const { return empty() ? 0 : indices_.back() + 1; }

  // Bitmask form; nullopt when some index is >= 64.
  std::optional<std::uint64_t> mask() const;

  FeatureSubset With(std::size_t feature) const;
  FeatureSubset Without(std::size_t feature) const;

  std::string ToString() const;

  bool operator==(const FeatureSubset&) const = default;

 private:
  std::vector<std::size_t> indices_;
};

struct FeatureSubsetHash {
  std::size_t operator()(const FeatureSubset& s) const noexcept;
};

inline int PopCount(std::uint64_t mask) { return __builtin_popcountll(mask); }

}  // namespace tcshap
