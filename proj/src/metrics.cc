#include "tcshap/metrics.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "tcshap/error.h"

namespace tcshap {

double PearsonAbs(const FeatureColumn& a, const FeatureColumn& b) {
  if (a.codes.size() != b.codes.size()) {
    throw ConfigError("cannot correlate columns of lengths " +
                      std::to_string(a.codes.size()) + " and " +
                      std::to_string(b.codes.size()));
  }
  // Integer moments are exact; only the final ratio rounds.
  __int128 sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t r = 0; r < a.codes.size(); ++r) {
    const __int128 x = a.codes[r];
    const __int128 y = b.codes[r];
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  const __int128 d = static_cast<__int128>(a.codes.size());
  const __int128 var_x = d * sxx - sx * sx;
  const __int128 var_y = d * syy - sy * sy;
  if (var_x == 0 || var_y == 0) return 0.0;
  __int128 cov = d * sxy - sx * sy;
  if (cov < 0) cov = -cov;
  if (var_x == var_y && cov == var_x) return 1.0;
  const double rho = static_cast<double>(cov) /
                     (std::sqrt(static_cast<double>(var_x)) *
                      std::sqrt(static_cast<double>(var_y)));
  return std::clamp(rho, 0.0, 1.0);
}

double MaxPairwiseCorrelation(const CategoricalDataset& ds) {
  double best = 0.0;
  for (std::size_t i = 0; i < ds.n_features(); ++i) {
    for (std::size_t j = i + 1; j < ds.n_features(); ++j) {
      best = std::max(best, PearsonAbs(ds.column(i), ds.column(j)));
    }
  }
  return best;
}

RedundancyReport RedundancyRate(const CategoricalDataset& ds,
                                const FeatureSubset& selected,
                                double normalizer) {
  const std::size_t m = selected.size();
  if (m < 2) {
    throw ConfigError("redundancy rate needs at least two features, got " +
                      std::to_string(m));
  }
  if (selected.bound() > ds.n_features()) {
    throw ConfigError("selection " + selected.ToString() + " out of range");
  }
  RedundancyReport report;
  report.normalizer = normalizer;
  double unordered_sum = 0.0;
  const auto idx = selected.indices();
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      const double rho = PearsonAbs(ds.column(idx[a]), ds.column(idx[b]));
      report.pairs.push_back({idx[a], idx[b], rho});
      unordered_sum += rho;
    }
  }
  const double md = static_cast<double>(m);
  // Each unordered pair appears twice among ordered pairs.
  report.raw = 2.0 * unordered_sum / (2.0 * md * (md - 1.0));
  report.mean_abs_pairwise = unordered_sum / (md * (md - 1.0) / 2.0);
  report.scaled_0_100 =
      normalizer > 0.0 ? 100.0 * report.mean_abs_pairwise / normalizer : 0.0;
  return report;
}

RedundancyReport RedundancyRate(const CategoricalDataset& ds,
                                const FeatureSubset& selected) {
  return RedundancyRate(ds, selected, MaxPairwiseCorrelation(ds));
}

double RecallAtK(std::span<const std::size_t> reference,
                 std::span<const std::size_t> candidate, std::size_t k) {
  if (k == 0) throw ConfigError("recall@k needs k >= 1");
  if (k > reference.size() || k > candidate.size()) {
    throw ConfigError("recall@" + std::to_string(k) +
                      " exceeds a ranking of length " +
                      std::to_string(std::min(reference.size(),
                                              candidate.size())));
  }
  const std::set<std::size_t> top(reference.begin(), reference.begin() + k);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < k; ++t) hits += top.count(candidate[t]);
  return static_cast<double>(hits) / static_cast<double>(k);
}

double RecallAtK(const RankingResult& reference,
                 const RankingResult& candidate, std::size_t k) {
  return RecallAtK(reference.order, candidate.order, k);
}

}  // namespace tcshap
