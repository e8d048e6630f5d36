#include "tcshap/json_io.h"

#include <cmath>
#include <cstdio>

#include "tcshap/error.h"

namespace tcshap {

using nlohmann::json;

std::string FormatFingerprint(std::uint64_t fingerprint) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx",
                static_cast<unsigned long long>(fingerprint));
  return buf;
}

std::uint64_t ParseFingerprint(const std::string& text) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used, 16);
    if (used != text.size()) throw DataError("");
    return v;
  } catch (const std::exception&) {
    throw DataError("bad dataset fingerprint '" + text + "'");
  }
}

json DatasetJson(const CategoricalDataset& ds) {
  return {{"name", ds.name()},
          {"fingerprint", FormatFingerprint(ds.Fingerprint())},
          {"n_rows", ds.n_rows()},
          {"n_features", ds.n_features()},
          {"features", ds.feature_names()}};
}

json ScoresJson(const ShapleyScores& scores) {
  json se = nullptr;
  if (!scores.standard_errors.empty()) {
    se = json::array();
    for (double v : scores.standard_errors) {
      se.push_back(std::isfinite(v) ? json(v) : json(nullptr));
    }
  }
  return {{"values", scores.values},
          {"standard_errors", se},
          {"n_value_evals", scores.n_value_evals}};
}

namespace {

json ConfigJson(const RankingConfig& config) {
  const ApproxConfig& a = config.approx;
  const bool bounded = a.method == ShapleyMethod::kBounded;
  const bool sampled = a.method == ShapleyMethod::kSampled;
  return {{"method", ToString(config.method)},
          {"epsilon", config.epsilon ? json(*config.epsilon) : json(nullptr)},
          {"cap", config.cap ? json(*config.cap) : json(nullptr)},
          {"approx", a.ToString()},
          {"estimator", a.MethodName()},
          {"k", bounded ? json(a.k) : json(nullptr)},
          {"n", sampled ? json(a.n) : json(nullptr)},
          {"seed", sampled ? json(a.seed) : json(nullptr)},
          {"base", ToString(config.base)},
          {"renormalize", a.renormalize}};
}

}  // namespace

json RankingJson(const RankingResult& result, const ShapleyScores& scores,
                 const CategoricalDataset& ds) {
  json steps = json::array();
  for (const StepRecord& s : result.steps) {
    json step = {{"feature", s.feature},
                 {"name", ds.column(s.feature).name},
                 {"shapley", s.shapley},
                 {"penalty", s.penalty}};
    if (s.rk) step["rk"] = *s.rk;
    if (result.config.method == RankingMethod::kSvfs) step["pruned"] = s.pruned;
    steps.push_back(std::move(step));
  }
  return {{"config", ConfigJson(result.config)},
          {"dataset", DatasetJson(ds)},
          {"shapley", ScoresJson(scores)},
          {"order", result.order},
          {"steps", std::move(steps)}};
}

json RedundancyJson(const RedundancyReport& report,
                    const CategoricalDataset& ds) {
  json pairs = json::array();
  for (const auto& p : report.pairs) {
    pairs.push_back({{"i", p.i}, {"j", p.j}, {"rho", p.rho}});
  }
  return {{"dataset", DatasetJson(ds)},
          {"raw", report.raw},
          {"mean_abs_pairwise", report.mean_abs_pairwise},
          {"scaled_0_100", report.scaled_0_100},
          {"normalizer", report.normalizer},
          {"pairs", std::move(pairs)}};
}

json SynthSidecarJson(const SynthDataset& synth) {
  return {{"groups", synth.groups},
          {"independent", synth.independent},
          {"seed", synth.seed},
          {"requested_seed", synth.requested_seed},
          {"structure_verified", synth.structure_verified},
          {"fingerprint", FormatFingerprint(synth.dataset.Fingerprint())}};
}

LoadedRanking RankingFromJson(const json& doc) {
  try {
    LoadedRanking out;
    const json& config = doc.at("config");
    RankingConfig& c = out.result.config;
    c.method = ParseRankingMethod(config.at("method").get<std::string>());
    if (!config.at("epsilon").is_null()) {
      c.epsilon = config.at("epsilon").get<double>();
    }
    if (!config.at("cap").is_null()) c.cap = config.at("cap").get<std::size_t>();
    const std::uint64_t seed =
        config.at("seed").is_null() ? 0 : config.at("seed").get<std::uint64_t>();
    c.approx = ApproxConfig::Parse(config.at("approx").get<std::string>(), seed);
    c.approx.renormalize = config.value("renormalize", false);
    c.base = ParseLogBase(config.at("base").get<std::string>());

    out.result.order = doc.at("order").get<std::vector<std::size_t>>();
    for (const json& s : doc.at("steps")) {
      StepRecord step;
      step.feature = s.at("feature").get<std::size_t>();
      step.shapley = s.at("shapley").get<double>();
      step.penalty = s.at("penalty").get<double>();
      if (s.contains("rk")) step.rk = s.at("rk").get<double>();
      if (s.contains("pruned")) {
        step.pruned = s.at("pruned").get<std::vector<std::size_t>>();
      }
      out.result.steps.push_back(std::move(step));
    }
    out.fingerprint =
        ParseFingerprint(doc.at("dataset").at("fingerprint").get<std::string>());
    return out;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed ranking report: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("malformed ranking report: ") + e.what());
  }
}

}  // namespace tcshap
