#include "tcshap/synth.h"

#include <algorithm>
#include <limits>
#include <random>
#include <string>

#include "tcshap/entropy.h"
#include "tcshap/error.h"
#include "tcshap/shapley.h"

namespace tcshap {

std::size_t SynthSpec::n_features() const {
  std::size_t n = n_independent;
  for (const auto& g : groups) n += g.size;
  return n;
}

void SynthSpec::Validate() const {
  for (const auto& g : groups) {
    if (g.size == 0) throw ConfigError("group size must be >= 1");
    if (!(g.noise >= 0.0 && g.noise <= 1.0)) {
      throw ConfigError("noise must lie in [0, 1]");
    }
  }
  if (n_features() == 0) throw ConfigError("synthetic layout has no features");
  if (arity == 0) throw ConfigError("arity must be >= 1");
  if (n_rows == 0) throw ConfigError("n_rows must be >= 1");
}

SynthSpec DefaultSynthSpec(std::uint64_t seed) {
  SynthSpec spec;
  spec.groups = {{4, 0.1}, {4, 0.1}, {3, 0.1}};
  spec.n_independent = 1;
  spec.arity = 4;
  spec.n_rows = 10000;
  spec.seed = seed;
  return spec;
}

int SynthDataset::GroupOf(std::size_t feature) const {
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (std::find(groups[g].begin(), groups[g].end(), feature) !=
        groups[g].end()) {
      return static_cast<int>(g);
    }
  }
  return -1;
}

CategoricalDataset GenerateRaw(const SynthSpec& spec) {
  spec.Validate();
  const std::size_t n_features = spec.n_features();
  std::vector<std::vector<std::string>> raw(n_features);
  for (auto& col : raw) col.reserve(spec.n_rows);

  std::mt19937_64 rng(spec.seed);
  auto unit = [&rng] {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  for (std::size_t r = 0; r < spec.n_rows; ++r) {
    std::size_t j = 0;
    for (const GroupSpec& g : spec.groups) {
      const std::uint64_t latent = UniformBelow(rng, spec.arity);
      for (std::size_t m = 0; m < g.size; ++m, ++j) {
        // Draw the coin first so the stream layout does not depend on noise.
        const bool resample = unit() < g.noise;
        const std::uint64_t own = UniformBelow(rng, spec.arity);
        raw[j].push_back(std::to_string(resample ? own : latent));
      }
    }
    for (std::size_t m = 0; m < spec.n_independent; ++m, ++j) {
      raw[j].push_back(std::to_string(UniformBelow(rng, spec.arity)));
    }
  }

  std::vector<FeatureColumn> columns;
  columns.reserve(n_features);
  for (std::size_t j = 0; j < n_features; ++j) {
    columns.push_back(FeatureColumn::FromStrings("f" + std::to_string(j), raw[j]));
  }
  return CategoricalDataset("synthetic", std::move(columns));
}

bool PlantedStructureHolds(const SynthDataset& synth) {
  const CategoricalDataset& ds = synth.dataset;
  EntropyEvaluator evaluator(ds, LogBase::kTwo);
  double within_min = std::numeric_limits<double>::infinity();
  double cross_max = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < ds.n_features(); ++a) {
    for (std::size_t b = a + 1; b < ds.n_features(); ++b) {
      const double mi = evaluator.MarginalContribution(FeatureSubset{a}, b);
      const int ga = synth.GroupOf(a);
      if (ga >= 0 && ga == synth.GroupOf(b)) {
        within_min = std::min(within_min, mi);
      } else {
        cross_max = std::max(cross_max, mi);
      }
    }
  }
  return within_min > cross_max;
}

SynthDataset Generate(const SynthSpec& spec) {
  spec.Validate();
  const bool check =
      spec.n_rows >= 5000 &&
      std::all_of(spec.groups.begin(), spec.groups.end(),
                  [](const GroupSpec& g) { return g.noise <= 0.1; });
  constexpr int kMaxRetries = 5;

  SynthSpec attempt = spec;
  for (int retry = 0;; ++retry) {
    SynthDataset out{GenerateRaw(attempt), {}, {}, spec.seed, attempt.seed,
                     false};
    std::size_t j = 0;
    for (const GroupSpec& g : spec.groups) {
      std::vector<std::size_t> members(g.size);
      for (auto& m : members) m = j++;
      out.groups.push_back(std::move(members));
    }
    for (std::size_t m = 0; m < spec.n_independent; ++m) {
      out.independent.push_back(j++);
    }
    if (!check) return out;
    if (PlantedStructureHolds(out)) {
      out.structure_verified = true;
      return out;
    }
    if (retry == kMaxRetries) {
      throw DataError("planted group structure not recovered after " +
                      std::to_string(kMaxRetries) + " retries from seed " +
                      std::to_string(spec.seed));
    }
    ++attempt.seed;
  }
}

}  // namespace tcshap
