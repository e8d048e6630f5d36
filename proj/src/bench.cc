#include "tcshap/bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>

#include "tcshap/error.h"
#include "tcshap/synth.h"

namespace tcshap {

DatasetFamily SyntheticFamily(std::uint64_t seed) {
  return [seed](std::size_t n_features, std::size_t n_rows) {
    SynthSpec spec;
    for (std::size_t left = n_features; left >= 4; left -= 4) {
      spec.groups.push_back({4, 0.2});
    }
    spec.n_independent = n_features % 4;
    spec.arity = 4;
    spec.n_rows = n_rows;
    spec.seed = seed;
    return GenerateRaw(spec);
  };
}

double LogLogSlope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ConfigError("slope needs at least two points");
  }
  double mx = 0.0, my = 0.0;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw ConfigError("log-log slope needs positive values");
    }
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
    mx += lx.back();
    my += ly.back();
  }
  mx /= lx.size();
  my /= ly.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw ConfigError("slope needs distinct x values");
  return sxy / sxx;
}

namespace {

BenchRow TimeOne(const CategoricalDataset& ds, const ApproxConfig& config,
                 const BenchOptions& options) {
  if (options.reps == 0) throw ConfigError("reps must be >= 1");
  std::vector<double> seconds;
  std::uint64_t evals = 0;
  for (std::size_t r = 0; r < options.reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    const ShapleyScores scores =
        ComputeShapley(ds, config, options.base, options.shapley);
    const auto stop = std::chrono::steady_clock::now();
    seconds.push_back(std::chrono::duration<double>(stop - start).count());
    evals = scores.n_value_evals;
  }
  std::sort(seconds.begin(), seconds.end());
  const std::size_t m = seconds.size();
  const double median =
      m % 2 ? seconds[m / 2] : 0.5 * (seconds[m / 2 - 1] + seconds[m / 2]);
  return {config.ToString(), ds.n_features(), ds.n_rows(), median, evals};
}

void FitSlope(BenchReport& report) {
  if (report.rows.size() < 2) return;
  std::vector<double> x, y;
  for (const BenchRow& row : report.rows) {
    x.push_back(static_cast<double>(report.x_axis == "N" ? row.n_features
                                                         : row.n_rows));
    // Guard against a zero timer reading on tiny inputs.
    y.push_back(std::max(row.median_seconds, 1e-9));
  }
  report.loglog_slope = LogLogSlope(x, y);
}

}  // namespace

BenchReport BenchFeatures(const DatasetFamily& family,
                          const std::vector<std::size_t>& feature_counts,
                          std::size_t n_rows, const ApproxConfig& config,
                          const BenchOptions& options) {
  config.Validate();
  BenchReport report;
  report.x_axis = "N";
  for (std::size_t n : feature_counts) {
    report.rows.push_back(TimeOne(family(n, n_rows), config, options));
  }
  FitSlope(report);
  return report;
}

BenchReport BenchRows(const DatasetFamily& family,
                      const std::vector<std::size_t>& row_counts,
                      std::size_t n_features, const ApproxConfig& config,
                      const BenchOptions& options) {
  config.Validate();
  BenchReport report;
  report.x_axis = "D";
  for (std::size_t d : row_counts) {
    report.rows.push_back(TimeOne(family(n_features, d), config, options));
  }
  FitSlope(report);
  return report;
}

void WriteBenchCsv(const BenchReport& report, std::ostream& out) {
  out << "method,N,D,median_seconds,evals\n";
  for (const BenchRow& row : report.rows) {
    out << row.method << ',' << row.n_features << ',' << row.n_rows << ','
        << std::setprecision(9) << row.median_seconds << ',' << row.evals
        << '\n';
  }
}

void WriteGnuplotData(const BenchReport& report, std::ostream& out) {
  out << "# " << report.x_axis << " median_seconds evals\n";
  out << "# loglog_slope " << std::setprecision(6) << report.loglog_slope
      << '\n';
  for (const BenchRow& row : report.rows) {
    out << (report.x_axis == "N" ? row.n_features : row.n_rows) << ' '
        << std::setprecision(9) << row.median_seconds << ' ' << row.evals
        << '\n';
  }
}

}  // namespace tcshap
