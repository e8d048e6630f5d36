#pragma once

#include <cstdint>
#include <vector>

#include "tcshap/dataset.h"

namespace tcshap {

struct GroupSpec {
  std::size_t size = 0;
  double noise = 0.0;  // probability that a member ignores the latent value
};

// Block-correlated categorical data. Features are numbered group by group,
// independent features last.
struct SynthSpec {
  std::vector<GroupSpec> groups;
  std::size_t n_independent = 0;
  std::uint32_t arity = 4;
  std::size_t n_rows = 1000;
  std::uint64_t seed = 0;

  std::size_t n_features() const;
  // Throws ConfigError on noise outside [0, 1], zero arity/rows/features.
  void Validate() const;
};

// 3 groups of sizes 4, 4, 3 plus one independent feature; arity 4,
// 10000 rows, noise 0.1.
SynthSpec DefaultSynthSpec(std::uint64_t seed = 0);

struct SynthDataset {
  CategoricalDataset dataset;
  std::vector<std::vector<std::size_t>> groups;  // ground-truth membership
  std::vector<std::size_t> independent;
  std::uint64_t requested_seed = 0;
  std::uint64_t seed = 0;  // seed actually used after retries
  // Whether the planted-structure check applied (noise <= 0.1, rows >= 5000)
  // and passed.
  bool structure_verified = false;

  // Group index of a feature, or -1 for independent features.
  int GroupOf(std::size_t feature) const;
};

// For each row and group, draws a uniform latent value; every member copies
// it, except with probability `noise` it draws its own uniform value.
// Independent features are i.i.d. uniform. When every group has noise <= 0.1
// and there are at least 5000 rows, the result is checked so that every
// within-group pair shares more information than any other pair; failing
// draws are retried with seed + 1 up to five times.
SynthDataset Generate(const SynthSpec& spec);

// The raw generator, without the planted-structure check.
CategoricalDataset GenerateRaw(const SynthSpec& spec);

// Pairwise mutual information check described at Generate.
bool PlantedStructureHolds(const SynthDataset& synth);

}  // namespace tcshap
