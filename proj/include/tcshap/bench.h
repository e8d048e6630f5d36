#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "tcshap/dataset.h"
#include "tcshap/shapley.h"

namespace tcshap {

struct BenchRow {
  std::string method;  // ApproxConfig::ToString()
  std::size_t n_features = 0;
  std::size_t n_rows = 0;
  double median_seconds = 0.0;
  std::uint64_t evals = 0;
};

struct BenchReport {
  std::string x_axis;  // "N" or "D"
  std::vector<BenchRow> rows;
  // Least-squares slope of log(median_seconds) against log(x).
  double loglog_slope = 0.0;
};

// Builds the dataset for one point of a sweep.
using DatasetFamily =
    std::function<CategoricalDataset(std::size_t n_features,
                                     std::size_t n_rows)>;

// Block-correlated synthetic data: groups of four features (noise 0.2,
// arity 4), leftover features independent.
DatasetFamily SyntheticFamily(std::uint64_t seed);

struct BenchOptions {
  std::size_t reps = 3;
  ShapleyOptions shapley;
  LogBase base = LogBase::kTwo;
};

// Times the Shapley estimator for each N at fixed D.
BenchReport BenchFeatures(const DatasetFamily& family,
                          const std::vector<std::size_t>& feature_counts,
                          std::size_t n_rows, const ApproxConfig& config,
                          const BenchOptions& options = {});

// Times the Shapley estimator for each D at fixed N.
BenchReport BenchRows(const DatasetFamily& family,
                      const std::vector<std::size_t>& row_counts,
                      std::size_t n_features, const ApproxConfig& config,
                      const BenchOptions& options = {});

double LogLogSlope(const std::vector<double>& x, const std::vector<double>& y);

// "method,N,D,median_seconds,evals" with a header line.
void WriteBenchCsv(const BenchReport& report, std::ostream& out);
// Whitespace-separated "x median_seconds evals" lines, '#' comment header.
void WriteGnuplotData(const BenchReport& report, std::ostream& out);

}  // namespace tcshap
