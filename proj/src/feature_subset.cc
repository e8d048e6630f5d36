#include "tcshap/feature_subset.h"

#include <algorithm>
#include <sstream>

#include "tcshap/error.h"

namespace tcshap {

FeatureSubset::FeatureSubset(std::vector<std::size_t> indices)
    : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw ConfigError("feature subset contains a duplicate index");
  }
}

FeatureSubset FeatureSubset::FromMask(std::uint64_t mask) {
  FeatureSubset s;
  s.indices_.reserve(PopCount(mask));
  while (mask != 0) {
    s.indices_.push_back(static_cast<std::size_t>(__builtin_ctzll(mask)));
    mask &= mask - 1;
  }
  return s;
}

FeatureSubset FeatureSubset::All(std::size_t n) {
  FeatureSubset s;
  s.indices_.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.indices_[i] = i;
  return s;
}

bool FeatureSubset::contains(std::size_t feature) const {
  return std::binary_search(indices_.begin(), indices_.end(), feature);
}

std::optional<std::uint64_t> FeatureSubset::mask() const {
  if (bound() > 64) return std::nullopt;
  std::uint64_t m = 0;
  for (std::size_t i : indices_) m |= std::uint64_t{1} << i;
  return m;
}

FeatureSubset FeatureSubset::With(std::size_t feature) const {
  FeatureSubset s = *this;
  auto it = std::lower_bound(s.indices_.begin(), s.indices_.end(), feature);
  if (it == s.indices_.end() || *it != feature) s.indices_.insert(it, feature);
  return s;
}

FeatureSubset FeatureSubset::Without(std::size_t feature) const {
  FeatureSubset s = *this;
  auto it = std::lower_bound(s.indices_.begin(), s.indices_.end(), feature);
  if (it != s.indices_.end() && *it == feature) s.indices_.erase(it);
  return s;
}

std::string FeatureSubset::ToString() const {
  std::ostringstream out;
  out << '{';
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (k) out << ',';
    out << indices_[k];
  }
  out << '}';
  return out.str();
}

std::size_t FeatureSubsetHash::operator()(
    const FeatureSubset& s) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (std::size_t i : s.indices()) {
    h ^= i + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

}  // namespace tcshap
