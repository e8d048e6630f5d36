#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "tcshap/dataset.h"
#include "tcshap/metrics.h"
#include "tcshap/ranking.h"
#include "tcshap/shapley.h"
#include "tcshap/synth.h"

namespace tcshap {

// Report schema (stable field names):
//   config.{method, epsilon, cap, approx, estimator, k, n, seed, base,
//           renormalize}
//   dataset.{name, fingerprint, n_rows, n_features, features}
//   shapley.{values, standard_errors, n_value_evals}
//   order, steps[].{feature, name, shapley, penalty, rk, pruned}
// Nothing thread- or time-dependent is written, so identical inputs give
// byte-identical output.

std::string FormatFingerprint(std::uint64_t fingerprint);
std::uint64_t ParseFingerprint(const std::string& text);

nlohmann::json DatasetJson(const CategoricalDataset& ds);
nlohmann::json ScoresJson(const ShapleyScores& scores);
nlohmann::json RankingJson(const RankingResult& result,
                           const ShapleyScores& scores,
                           const CategoricalDataset& ds);
nlohmann::json RedundancyJson(const RedundancyReport& report,
                              const CategoricalDataset& ds);
nlohmann::json SynthSidecarJson(const SynthDataset& synth);

struct LoadedRanking {
  RankingResult result;
  std::uint64_t fingerprint = 0;
};
// Reads what RankingJson wrote. Throws DataError on schema violations.
LoadedRanking RankingFromJson(const nlohmann::json& doc);

}  // namespace tcshap
