#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tcshap/feature_subset.h"

namespace tcshap {

using Code = std::uint32_t;

// One categorical column. Codes are dense: every value in [0, arity) occurs.
struct FeatureColumn {
  std::string name;
  std::vector<Code> codes;
  std::uint32_t arity = 0;
  // labels[c] is the source string that was encoded as c.
  std::vector<std::string> labels;

  // Encodes raw strings by first appearance.
  static FeatureColumn FromStrings(std::string name,
                                   std::span<const std::string> raw);

  const std::string& Decode(Code code) const { return labels.at(code); }
  bool operator==(const FeatureColumn&) const = default;
};

// Column-major categorical table. Immutable once built; safe to share across
// threads.
class CategoricalDataset {
 public:
  // Validates the invariants (equal lengths, dense codes, unique names) and
  // throws DataError on violation.
  CategoricalDataset(std::string name, std::vector<FeatureColumn> columns);

  const std::string& name() const { return name_; }
  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_features() const { return columns_.size(); }
  const FeatureColumn& column(std::size_t j) const { return columns_.at(j); }
  const std::vector<FeatureColumn>& columns() const { return columns_; }
  std::vector<std::string> feature_names() const;
  // Index of the named feature; throws ConfigError if absent.
  std::size_t FeatureIndex(const std::string& name) const;

  // 64-bit FNV-1a hash over shape and codes. Used to refuse comparisons of
  // reports computed on different data.
  std::uint64_t Fingerprint() const;

  bool operator==(const CategoricalDataset&) const = default;

 private:
  std::string name_;
  std::vector<FeatureColumn> columns_;
  std::size_t n_rows_ = 0;
};

struct IngestOptions {
  std::vector<std::string> drop_columns;
  std::string missing_token;  // empty cells by default
  bool drop_missing_rows = false;
  std::map<std::string, std::uint32_t> bins;  // column -> number of bins
  std::size_t max_rows = 0;                   // 0 keeps every row
};

// Reads an RFC-4180 CSV with a header row. Distinct strings of each column
// get codes in order of first appearance; the missing token is a category
// of its own unless drop_missing_rows is set.
CategoricalDataset LoadCsv(const std::filesystem::path& path,
                           const IngestOptions& options = {});
CategoricalDataset ParseCsv(std::string_view text, std::string name,
                            const IngestOptions& options = {});

// Writes the decoded labels back out as CSV.
void WriteCsv(const CategoricalDataset& ds, const std::filesystem::path& path);

// Equal-width discretization over [min, max]. A value exactly on an inner
// edge goes to the lower bin; the maximum goes to the last bin. Bins that
// receive no value are dropped, so the result is densely coded.
FeatureColumn BinNumeric(std::string name, std::span<const double> values,
                         std::uint32_t n_bins);

// Restricts ds to the features in subset, preserving row order.
CategoricalDataset Project(const CategoricalDataset& ds,
                           const FeatureSubset& subset);

}  // namespace tcshap
