#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tcshap/dataset.h"

namespace tcshap::testing {

// Builds a dataset from raw code columns; codes are re-encoded by first
// appearance so any small integers will do.
inline CategoricalDataset FromCodes(
    const std::vector<std::vector<int>>& cols, std::string name = "t") {
  std::vector<FeatureColumn> out;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    std::vector<std::string> raw;
    for (int v : cols[j]) raw.push_back(std::to_string(v));
    out.push_back(FeatureColumn::FromStrings("x" + std::to_string(j), raw));
  }
  return CategoricalDataset(std::move(name), std::move(out));
}

// Random dataset with a mix of copied, noisy and independent columns.
inline CategoricalDataset RandomDataset(std::mt19937_64& rng,
                                        std::size_t n_features,
                                        std::size_t n_rows) {
  std::uniform_int_distribution<int> arity_dist(1, 4);
  std::vector<std::vector<int>> cols;
  for (std::size_t j = 0; j < n_features; ++j) {
    const int arity = arity_dist(rng);
    std::vector<int> c(n_rows);
    const bool derive = j > 0 && rng() % 2 == 0;
    const std::size_t parent = derive ? rng() % j : 0;
    for (std::size_t r = 0; r < n_rows; ++r) {
      if (derive && rng() % 4 != 0) {
        c[r] = cols[parent][r] % arity;
      } else {
        c[r] = static_cast<int>(rng() % arity);
      }
    }
    cols.push_back(std::move(c));
  }
  return FromCodes(cols, "random");
}

}  // namespace tcshap::testing
