#include "tcshap/dataset.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "tcshap/csv.h"
#include "tcshap/error.h"

namespace tcshap {

FeatureColumn FeatureColumn::FromStrings(std::string name,
                                         std::span<const std::string> raw) {
  FeatureColumn col;
  col.name = std::move(name);
  col.codes.reserve(raw.size());
  std::unordered_map<std::string, Code> seen;
  for (const std::string& value : raw) {
    auto [it, inserted] = seen.try_emplace(value, col.arity);
    if (inserted) {
      col.labels.push_back(value);
      ++col.arity;
    }
    col.codes.push_back(it->second);
  }
  return col;
}

CategoricalDataset::CategoricalDataset(std::string name,
                                       std::vector<FeatureColumn> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {
  if (columns_.empty()) throw DataError("dataset has no features");
  n_rows_ = columns_.front().codes.size();
  if (n_rows_ == 0) throw DataError("dataset has no rows");

  std::set<std::string> names;
  for (const FeatureColumn& col : columns_) {
    if (col.name.empty()) throw DataError("empty feature name");
    if (!names.insert(col.name).second) {
      throw DataError("duplicate feature name '" + col.name + "'");
    }
    if (col.codes.size() != n_rows_) {
      throw DataError("column '" + col.name + "' has " +
                      std::to_string(col.codes.size()) + " rows, expected " +
                      std::to_string(n_rows_));
    }
    if (col.arity == 0 || col.labels.size() != col.arity) {
      throw DataError("column '" + col.name + "' has inconsistent arity");
    }
    std::vector<bool> present(col.arity, false);
    for (Code c : col.codes) {
      if (c >= col.arity) {
        throw DataError("column '" + col.name + "' has code out of range");
      }
      present[c] = true;
    }
    if (std::find(present.begin(), present.end(), false) != present.end()) {
      throw DataError("column '" + col.name + "' is not densely coded");
    }
  }
}

std::vector<std::string> CategoricalDataset::feature_names() const {
  std::vector<std::string> names;
  names.reserve(columns_.size());
  for (const auto& c : columns_) names.push_back(c.name);
  return names;
}

std::size_t CategoricalDataset::FeatureIndex(const std::string& name) const {
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].name == name) return j;
  }
  throw ConfigError("unknown feature '" + name + "'");
}

std::uint64_t CategoricalDataset::Fingerprint() const {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  mix(n_rows_);
  mix(columns_.size());
  for (const auto& col : columns_) {
    mix(col.arity);
    for (Code c : col.codes) mix(c);
  }
  return h;
}

namespace {

std::vector<double> ParseNumbers(const std::string& column,
                                 std::span<const std::string> raw) {
  std::vector<double> values;
  values.reserve(raw.size());
  for (std::size_t r = 0; r < raw.size(); ++r) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(raw[r], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != raw[r].size()) {
      throw DataError("column '" + column + "', data row " +
                      std::to_string(r + 1) + ": '" + raw[r] +
                      "' is not a number");
    }
    values.push_back(v);
  }
  return values;
}

}  // namespace

CategoricalDataset ParseCsv(std::string_view text, std::string name,
                            const IngestOptions& options) {
  std::vector<csv::Record> records = csv::Parse(text);
  if (records.empty()) throw DataError("empty CSV: no header row");

  const std::vector<std::string>& header = records.front().fields;
  {
    std::set<std::string> seen;
    for (const auto& h : header) {
      if (h.empty()) throw DataError("empty column name in header");
      if (!seen.insert(h).second) {
        throw DataError("duplicate column name '" + h + "' in header");
      }
    }
  }
  for (const auto& dropped : options.drop_columns) {
    if (std::find(header.begin(), header.end(), dropped) == header.end()) {
      throw ConfigError("cannot drop unknown column '" + dropped + "'");
    }
  }
  for (const auto& [col, k] : options.bins) {
    if (std::find(header.begin(), header.end(), col) == header.end()) {
      throw ConfigError("cannot bin unknown column '" + col + "'");
    }
  }

  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < header.size(); ++j) {
    const auto& d = options.drop_columns;
    if (std::find(d.begin(), d.end(), header[j]) == d.end()) kept.push_back(j);
  }
  if (kept.empty()) throw ConfigError("every column was dropped");

  std::vector<std::vector<std::string>> raw(kept.size());
  for (std::size_t r = 1; r < records.size(); ++r) {
    const csv::Record& rec = records[r];
    if (rec.fields.size() != header.size()) {
      throw DataError("row " + std::to_string(r) + " (line " +
                      std::to_string(rec.line) + ") has " +
                      std::to_string(rec.fields.size()) + " fields, header has " +
                      std::to_string(header.size()));
    }
    if (options.drop_missing_rows) {
      bool missing = false;
      for (std::size_t j : kept) {
        missing = missing || rec.fields[j] == options.missing_token;
      }
      if (missing) continue;
    }
    if (options.max_rows != 0 && raw.front().size() >= options.max_rows) break;
    for (std::size_t k = 0; k < kept.size(); ++k) {
      raw[k].push_back(rec.fields[kept[k]]);
    }
  }
  if (raw.front().empty()) throw DataError("CSV has a header but no data rows");

  std::vector<FeatureColumn> columns;
  columns.reserve(kept.size());
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const std::string& col_name = header[kept[k]];
    auto bin = options.bins.find(col_name);
    if (bin != options.bins.end()) {
      columns.push_back(
          BinNumeric(col_name, ParseNumbers(col_name, raw[k]), bin->second));
    } else {
      columns.push_back(FeatureColumn::FromStrings(col_name, raw[k]));
    }
  }
  return CategoricalDataset(std::move(name), std::move(columns));
}

CategoricalDataset LoadCsv(const std::filesystem::path& path,
                           const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ParseCsv(buf.str(), path.stem().string(), options);
}

void WriteCsv(const CategoricalDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  csv::WriteRow(out, ds.feature_names());
  std::vector<std::string> row(ds.n_features());
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    for (std::size_t j = 0; j < ds.n_features(); ++j) {
      const FeatureColumn& col = ds.column(j);
      row[j] = col.Decode(col.codes[r]);
    }
    csv::WriteRow(out, row);
  }
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

FeatureColumn BinNumeric(std::string name, std::span<const double> values,
                         std::uint32_t n_bins) {
  if (n_bins == 0) throw ConfigError("n_bins must be >= 1");
  if (values.empty()) throw DataError("cannot bin an empty column");
  for (double v : values) {
    if (std::isnan(v)) throw DataError("NaN in column '" + name + "'");
    if (!std::isfinite(v)) {
      throw DataError("non-finite value in column '" + name + "'");
    }
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;

  // Inner edges; bin b covers (edge[b-1], edge[b]], the first bin also
  // includes lo itself.
  std::vector<double> edges;
  for (std::uint32_t b = 1; b < n_bins; ++b) {
    edges.push_back(lo + (hi - lo) * b / n_bins);
  }
  std::vector<std::uint32_t> bin_of(values.size());
  for (std::size_t r = 0; r < values.size(); ++r) {
    if (lo == hi) {
      bin_of[r] = 0;
      continue;
    }
    const auto it = std::lower_bound(edges.begin(), edges.end(), values[r]);
    bin_of[r] = static_cast<std::uint32_t>(it - edges.begin());
  }

  // Drop empty bins, keeping bin order.
  std::vector<std::int64_t> dense(n_bins, -1);
  for (std::uint32_t b : bin_of) dense[b] = 0;
  FeatureColumn col;
  col.name = std::move(name);
  auto fmt = [](double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
  };
  for (std::uint32_t b = 0; b < n_bins; ++b) {
    if (dense[b] < 0) continue;
    dense[b] = col.arity++;
    if (lo == hi) {
      col.labels.push_back("[" + fmt(lo) + "," + fmt(hi) + "]");
    } else {
      const double left = b == 0 ? lo : edges[b - 1];
      const double right = b + 1 == n_bins ? hi : edges[b];
      col.labels.push_back((b == 0 ? "[" : "(") + fmt(left) + "," +
                           fmt(right) + "]");
    }
  }
  col.codes.reserve(values.size());
  for (std::uint32_t b : bin_of) col.codes.push_back(static_cast<Code>(dense[b]));
  return col;
}

CategoricalDataset Project(const CategoricalDataset& ds,
                           const FeatureSubset& subset) {
  if (subset.empty()) throw ConfigError("cannot project onto an empty subset");
  if (subset.bound() > ds.n_features()) {
    throw ConfigError("subset " + subset.ToString() + " exceeds " +
                      std::to_string(ds.n_features()) + " features");
  }
  std::vector<FeatureColumn> cols;
  cols.reserve(subset.size());
  for (std::size_t j : subset.indices()) cols.push_back(ds.column(j));
  return CategoricalDataset(ds.name(), std::move(cols));
}

}  // namespace tcshap
