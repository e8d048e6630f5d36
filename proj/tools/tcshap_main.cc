// tcshap command line: gen, rank, select, eval, bench.
//
// Exit codes: 0 success, 1 I/O or data errors, 2 invalid configuration.
// Errors are printed to stderr as {"error": {"kind": ..., "message": ...}}.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tcshap/bench.h"
#include "tcshap/dataset.h"
#include "tcshap/entropy.h"
#include "tcshap/error.h"
#include "tcshap/json_io.h"
#include "tcshap/metrics.h"
#include "tcshap/parallel.h"
#include "tcshap/ranking.h"
#include "tcshap/shapley.h"
#include "tcshap/synth.h"

namespace {

using nlohmann::json;
using namespace tcshap;

struct IngestFlags {
  std::string input;
  std::vector<std::string> drop_columns;
  std::optional<std::string> missing_token;
  bool drop_missing_rows = false;
  std::vector<std::string> bins;  // COL:K
  std::size_t max_rows = 0;

  void Add(CLI::App* app) {
    app->add_option("--input", input, "categorical CSV with a header row")
        ->required();
    app->add_option("--drop-columns", drop_columns, "columns to ignore")
        ->delimiter(',');
    app->add_option("--missing-token", missing_token,
                    "cell value treated as missing (default: empty)");
    app->add_flag("--drop-missing-rows", drop_missing_rows,
                  "drop rows containing the missing token");
    app->add_option("--bin", bins, "equal-width binning, COL:K")
        ->delimiter(',');
    app->add_option("--max-rows", max_rows, "read at most K data rows");
  }

  CategoricalDataset Load() const {
    IngestOptions opts;
    opts.drop_columns = drop_columns;
    if (missing_token) opts.missing_token = *missing_token;
    opts.drop_missing_rows = drop_missing_rows;
    opts.max_rows = max_rows;
    for (const std::string& spec : bins) {
      const auto colon = spec.rfind(':');
      if (colon == std::string::npos || colon == 0) {
        throw ConfigError("--bin expects COL:K, got '" + spec + "'");
      }
      std::uint32_t k = 0;
      try {
        std::size_t used = 0;
        const unsigned long v = std::stoul(spec.substr(colon + 1), &used);
        if (used != spec.size() - colon - 1 || v == 0 || v > UINT32_MAX) {
          throw std::invalid_argument("");
        }
        k = static_cast<std::uint32_t>(v);
      } catch (const std::exception&) {
        throw ConfigError("--bin expects COL:K with K >= 1, got '" + spec +
                          "'");
      }
      opts.bins[spec.substr(0, colon)] = k;
    }
    return LoadCsv(input, opts);
  }
};

struct ScoreFlags {
  std::string approx = "full";
  std::uint64_t seed = 0;
  std::string base = "2";
  bool renormalize = false;
  unsigned threads = DefaultThreadCount();

  void Add(CLI::App* app) {
    app->add_option("--approx", approx, "full | bounded:K | sampled:N")
        ->capture_default_str();
    app->add_option("--seed", seed, "seed of the sampled estimator")
        ->capture_default_str();
    app->add_option("--base", base, "entropy log base: 2 | e | 10")
        ->capture_default_str();
    app->add_flag("--renormalize", renormalize,
                  "bounded only: rescale kept coalition sizes");
    app->add_option("--threads", threads, "worker threads")
        ->check(CLI::PositiveNumber);
  }

  ApproxConfig Config() const {
    ApproxConfig c = ApproxConfig::Parse(approx, seed);
    if (renormalize) {
      if (c.method != ShapleyMethod::kBounded) {
        throw ConfigError("--renormalize only applies to bounded:K");
      }
      c.renormalize = true;
    }
    c.Validate();
    return c;
  }
  LogBase Base() const { return ParseLogBase(base); }
  ShapleyOptions Options() const {
    ShapleyOptions o;
    o.parallel.threads = threads;
    return o;
  }
};

void Emit(const json& doc, const std::string& output) {
  const std::string text = doc.dump(2) + "\n";
  if (output.empty() || output == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw IoError("cannot write '" + output + "'");
  out << text;
  if (!out) throw IoError("error writing '" + output + "'");
}

json ReadJson(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::vector<double> ParseSweep(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ConfigError("--sweep expects E1:E2:STEP, got '" + text + "'");
    }
  }
  if (parts.size() != 3) {
    throw ConfigError("--sweep expects E1:E2:STEP, got '" + text + "'");
  }
  return EpsilonGrid(parts[0], parts[1], parts[2]);
}

// --- rank ---------------------------------------------------------------

struct RankCmd {
  IngestFlags ingest;
  ScoreFlags score;
  std::string method = "svfr";
  std::optional<std::size_t> cap;
  std::optional<double> epsilon;
  std::string output;

  void Add(CLI::App* app) {
    ingest.Add(app);
    score.Add(app);
    app->add_option("--method", method, "svfr | svfs")->capture_default_str();
    app->add_option("--cap", cap, "svfr: stop after K ranks");
    app->add_option("--epsilon", epsilon, "svfs: pruning threshold");
    app->add_option("--output", output, "report path (default: stdout)");
  }

  void Run() const {
    const RankingMethod m = ParseRankingMethod(method);
    if (m == RankingMethod::kSvfs && !epsilon) {
      throw ConfigError("--method svfs needs --epsilon");
    }
    if (m == RankingMethod::kSvfr && epsilon) {
      throw ConfigError("--epsilon only applies to --method svfs");
    }
    const ApproxConfig config = score.Config();
    const LogBase base = score.Base();
    const CategoricalDataset ds = ingest.Load();
    const ShapleyScores scores =
        ComputeShapley(ds, config, base, score.Options());
    EntropyEvaluator evaluator(ds, base);
    const ParallelOptions par = score.Options().parallel;
    const RankingResult result =
        m == RankingMethod::kSvfr ? Svfr(evaluator, scores, cap, par)
                                  : Svfs(evaluator, scores, *epsilon, par);
    Emit(RankingJson(result, scores, ds), output);
  }
};

// --- select -------------------------------------------------------------

struct SelectCmd {
  IngestFlags ingest;
  ScoreFlags score;
  std::optional<double> epsilon;
  std::optional<std::string> sweep;
  std::string output;

  void Add(CLI::App* app) {
    ingest.Add(app);
    score.Add(app);
    auto* e = app->add_option("--epsilon", epsilon, "pruning threshold");
    auto* s = app->add_option("--sweep", sweep, "E1:E2:STEP, one run each");
    e->excludes(s);
    app->add_option("--output", output, "report path (default: stdout)");
  }

  void Run() const {
    if (!epsilon && !sweep) throw ConfigError("need --epsilon or --sweep");
    const std::vector<double> grid =
        sweep ? ParseSweep(*sweep) : std::vector<double>{*epsilon};
    const ApproxConfig config = score.Config();
    const LogBase base = score.Base();
    const CategoricalDataset ds = ingest.Load();
    const ShapleyScores scores =
        ComputeShapley(ds, config, base, score.Options());
    EntropyEvaluator evaluator(ds, base);
    const auto runs =
        SvfsSweep(evaluator, scores, grid, score.Options().parallel);
    if (!sweep) {
      Emit(RankingJson(runs.front(), scores, ds), output);
      return;
    }
    json doc = {{"dataset", DatasetJson(ds)},
                {"shapley", ScoresJson(scores)},
                {"runs", json::array()}};
    for (const RankingResult& r : runs) {
      json one = RankingJson(r, scores, ds);
      one.erase("dataset");
      one.erase("shapley");
      doc["runs"].push_back(std::move(one));
    }
    Emit(doc, output);
  }
};

// --- eval ---------------------------------------------------------------

struct RedundancyCmd {
  IngestFlags ingest;
  std::vector<std::string> features;
  std::string output;

  void Add(CLI::App* app) {
    ingest.Add(app);
    app->add_option("--features", features,
                    "selected features by index or name")
        ->delimiter(',')
        ->required();
    app->add_option("--output", output, "report path (default: stdout)");
  }

  void Run() const {
    const CategoricalDataset ds = ingest.Load();
    std::vector<std::size_t> idx;
    for (const std::string& f : features) {
      const bool numeric =
          !f.empty() && f.find_first_not_of("0123456789") == std::string::npos;
      if (numeric) {
        const std::size_t j = std::stoull(f);
        if (j >= ds.n_features()) {
          throw ConfigError("feature index " + f + " out of range");
        }
        idx.push_back(j);
      } else {
        idx.push_back(ds.FeatureIndex(f));
      }
    }
    const RedundancyReport report = RedundancyRate(ds, FeatureSubset(idx));
    json doc = RedundancyJson(report, ds);
    doc["features"] = idx;
    Emit(doc, output);
  }
};

struct RecallCmd {
  std::string reference;
  std::string candidate;
  std::vector<std::size_t> ks;
  std::string output;

  void Add(CLI::App* app) {
    app->add_option("--reference", reference, "ranking report (ground truth)")
        ->required();
    app->add_option("--candidate", candidate, "ranking report to score")
        ->required();
    app->add_option("--k", ks, "cutoffs, e.g. 1,3,5")
        ->delimiter(',')
        ->required();
    app->add_option("--output", output, "report path (default: stdout)");
  }

  void Run() const {
    const LoadedRanking ref = RankingFromJson(ReadJson(reference));
    const LoadedRanking cand = RankingFromJson(ReadJson(candidate));
    if (ref.fingerprint != cand.fingerprint) {
      throw DataError("reports were computed on different datasets (" +
                      FormatFingerprint(ref.fingerprint) + " vs " +
                      FormatFingerprint(cand.fingerprint) + ")");
    }
    json rows = json::array();
    for (std::size_t k : ks) {
      rows.push_back({{"k", k}, {"recall", RecallAtK(ref.result, cand.result, k)}});
    }
    const auto describe = [](const LoadedRanking& r) {
      return json{{"method", ToString(r.result.config.method)},
                  {"approx", r.result.config.approx.ToString()},
                  {"base", ToString(r.result.config.base)}};
    };
    Emit({{"fingerprint", FormatFingerprint(ref.fingerprint)},
          {"reference", describe(ref)},
          {"candidate", describe(cand)},
          {"recall", std::move(rows)}},
         output);
  }
};

// --- gen ----------------------------------------------------------------

struct GenCmd {
  std::vector<std::size_t> groups{4, 4, 3};
  std::vector<double> noise{0.1};
  std::size_t independent = 1;
  std::uint32_t arity = 4;
  std::size_t rows = 10000;
  std::uint64_t seed = 0;
  std::string output;

  void Add(CLI::App* app) {
    app->add_option("--groups", groups, "group sizes")
        ->delimiter(',')
        ->capture_default_str();
    app->add_option("--noise", noise, "one value, or one per group")
        ->delimiter(',')
        ->capture_default_str();
    app->add_option("--independent", independent, "independent features")
        ->capture_default_str();
    app->add_option("--arity", arity, "categories per feature")
        ->capture_default_str();
    app->add_option("--rows", rows, "rows")->capture_default_str();
    app->add_option("--seed", seed, "generator seed")->capture_default_str();
    app->add_option("--output", output, "CSV path; the sidecar gets .json")
        ->required();
  }

  void Run() const {
    if (noise.size() != 1 && noise.size() != groups.size()) {
      throw ConfigError("--noise needs one value or one per group");
    }
    SynthSpec spec;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      spec.groups.push_back({groups[g], noise.size() == 1 ? noise[0] : noise[g]});
    }
    spec.n_independent = independent;
    spec.arity = arity;
    spec.n_rows = rows;
    spec.seed = seed;
    const SynthDataset synth = Generate(spec);
    WriteCsv(synth.dataset, output);
    std::filesystem::path sidecar(output);
    sidecar.replace_extension(".json");
    Emit(SynthSidecarJson(synth), sidecar.string());
  }
};

// --- bench --------------------------------------------------------------

struct BenchCmd {
  std::string axis;
  std::string method = "sampled:100";
  std::size_t reps = 3;
  std::vector<std::size_t> sizes;
  std::size_t fixed = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string output;
  std::string gnuplot;

  void Add(CLI::App* app) {
    app->add_option("axis", axis, "features | rows")
        ->required()
        ->check(CLI::IsMember({"features", "rows"}));
    app->add_option("--method", method, "full | bounded:K | sampled:N")
        ->capture_default_str();
    app->add_option("--reps", reps, "repetitions per point")
        ->capture_default_str();
    app->add_option("--sizes", sizes, "N values (features) or D values (rows)")
        ->delimiter(',');
    app->add_option("--fixed", fixed,
                    "rows when sweeping features, features when sweeping rows");
    app->add_option("--seed", seed, "seed of data and sampler")
        ->capture_default_str();
    app->add_option("--threads", threads, "worker threads (default 1)")
        ->check(CLI::PositiveNumber);
    app->add_option("--output", output, "CSV path (default: stdout)");
    app->add_option("--gnuplot", gnuplot, "also write a gnuplot data file");
  }

  void Run() const {
    const ApproxConfig config = ApproxConfig::Parse(method, seed);
    config.Validate();
    BenchOptions opts;
    opts.reps = reps;
    opts.shapley.parallel.threads = threads;
    const DatasetFamily family = SyntheticFamily(seed);

    BenchReport report;
    if (axis == "features") {
      std::vector<std::size_t> ns = sizes;
      if (ns.empty()) {
        switch (config.method) {
          case ShapleyMethod::kFull:
            ns = {10, 11, 12, 13, 14, 15, 16};
            break;
          case ShapleyMethod::kBounded:
            ns = {10, 15, 20, 25, 30, 35, 40};
            break;
          case ShapleyMethod::kSampled:
            ns = {10, 20, 30, 40, 50, 60};
            break;
        }
      }
      report = BenchFeatures(family, ns, fixed ? fixed : 1000, config, opts);
    } else {
      std::vector<std::size_t> ds = sizes;
      if (ds.empty()) ds = {1000, 2000, 4000, 8000, 16000};
      report = BenchRows(family, ds, fixed ? fixed : 10, config, opts);
    }

    std::ostringstream csv;
    WriteBenchCsv(report, csv);
    if (output.empty() || output == "-") {
      std::cout << csv.str();
    } else {
      std::ofstream out(output, std::ios::binary);
      if (!out) throw IoError("cannot write '" + output + "'");
      out << csv.str();
    }
    if (!gnuplot.empty()) {
      std::ofstream out(gnuplot, std::ios::binary);
      if (!out) throw IoError("cannot write '" + gnuplot + "'");
      WriteGnuplotData(report, out);
    }
    std::cerr << "loglog_slope " << report.loglog_slope << "\n";
  }
};

int ReportError(const char* kind, const std::string& message, int code) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}}.dump()
            << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised feature ranking with Shapley values of total "
               "correlation"};
  app.require_subcommand(1);

  RankCmd rank;
  rank.Add(app.add_subcommand("rank", "Shapley scores and a full ranking"));
  SelectCmd select;
  select.Add(app.add_subcommand("select", "epsilon-pruned greedy selection"));
  auto* eval = app.add_subcommand("eval", "evaluate selections and rankings");
  eval->require_subcommand(1);
  RedundancyCmd redundancy;
  redundancy.Add(eval->add_subcommand("redundancy", "redundancy rate"));
  RecallCmd recall;
  recall.Add(eval->add_subcommand("recall", "recall@k between two reports"));
  GenCmd gen;
  gen.Add(app.add_subcommand("gen", "synthetic grouped data"));
  BenchCmd bench;
  bench.Add(app.add_subcommand("bench", "runtime scaling"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return ReportError("usage", e.what(), 2);
  }

  try {
    if (app.got_subcommand("rank")) rank.Run();
    else if (app.got_subcommand("select")) select.Run();
    else if (eval->got_subcommand("redundancy")) redundancy.Run();
    else if (eval->got_subcommand("recall")) recall.Run();
    else if (app.got_subcommand("gen")) gen.Run();
    else if (app.got_subcommand("bench")) bench.Run();
  } catch (const ConfigError& e) {
    return ReportError("config", e.what(), 2);
  } catch (const IoError& e) {
    return ReportError("io", e.what(), 1);
  } catch (const DataError& e) {
    return ReportError("data", e.what(), 1);
  } catch (const std::exception& e) {
    return ReportError("internal", e.what(), 1);
  }
  return 0;
}
