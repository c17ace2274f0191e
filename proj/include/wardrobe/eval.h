// Copyright 2026 The Wardrobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef WARDROBE_EVAL_H_
#define WARDROBE_EVAL_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "wardrobe/baselines.h"
#include "wardrobe/catalog.h"
#include "wardrobe/objective.h"
#include "wardrobe/optimizer.h"
#include "wardrobe/style_model.h"
#include "wardrobe/synth.h"

namespace wardrobe {

// Outfit lists on disk: {"outfits": [{"garments": [ids], "meta": {...}}]}.
// A bare array of id arrays is accepted as well.
std::vector<MetaOutfit> OutfitsFromJson(const nlohmann::json& j,
                                        const Catalog& catalog);
std::vector<MetaOutfit> LoadOutfits(const std::filesystem::path& path,
                                    const Catalog& catalog);
nlohmann::json OutfitsToJson(std::span<const MetaOutfit> outfits,
                             const Catalog& catalog);

// Mutually exclusive labels, each written "dim=value".
using ExclusivePairs = std::vector<std::pair<std::string, std::string>>;
ExclusivePairs ExclusivePairsFromJson(const nlohmann::json& j);
nlohmann::json ExclusivePairsToJson(const ExclusivePairs& pairs);

struct Provenance {
  std::size_t source = 0;  // index into positives
  int layer = 0;
  GarmentIndex removed = 0;
  GarmentIndex added = 0;
  std::size_t donor = 0;   // index into positives
  std::string source_label;
  std::string donor_label;
};

struct LabeledOutfitSet {
  std::vector<MetaOutfit> positives;
  std::vector<std::vector<GarmentIndex>> negatives;
  std::vector<Provenance> provenance;  // parallel to negatives
};

inline constexpr int kDefaultNegativeRatio = 5;

// `ratio` negatives per positive, each made by swapping one piece for the
// same-layer piece of an outfit carrying an exclusive label. Negatives never
// equal a positive. Throws ValidationError when some positive has no donor.
LabeledOutfitSet GenerateNegatives(const Catalog& catalog,
                                   std::vector<MetaOutfit> positives,
                                   const ExclusivePairs& pairs, int ratio,
                                   std::uint64_t seed);

// Human-readable problems found in `set`; empty when the audit passes.
std::vector<std::string> AuditNegatives(const Catalog& catalog,
                                        const LabeledOutfitSet& set,
                                        const ExclusivePairs& pairs);

nlohmann::json LabeledToJson(const LabeledOutfitSet& set,
                             const Catalog& catalog);
LabeledOutfitSet LabeledFromJson(const nlohmann::json& j,
                                 const Catalog& catalog);

struct PrPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

struct PrCurve {
  std::vector<PrPoint> points;  // one per distinct score, descending
  double average_precision = 0.0;
};

// Precision/recall over the ranking by descending score. Tied scores share
// one operating point. AP = sum_n (R_n - R_{n-1}) P_n. Throws if either
// class is empty.
PrCurve ComputePrCurve(std::span<const double> scores,
                       std::span<const int> labels);

struct CompatReport {
  PrCurve curve;
  std::vector<double> positive_scores;
  std::vector<double> negative_scores;
};

// Ranks the labeled outfits by raw per-token log-likelihood.
CompatReport EvaluateCompat(const Catalog& catalog, const StyleModel& model,
                            const LabeledOutfitSet& set,
                            const InferenceConfig& inference,
                            std::uint64_t seed, int threads = 1);

struct CapsuleScore {
  double compatibility_distance = 0.0;
  double versatility_distance = 0.0;
  std::vector<double> nearest;  // per capsule outfit, unnormalized
  double compatibility_sigma = 0.0;
  double versatility_sigma = 0.0;
};

// Distances of a capsule to a gold set. An outfit's feature is the
// concatenation of its members' features, one block per layer and zeros
// for absent layers. Compatibility sums the nearest-gold distance of every
// capsule outfit; versatility sums within-layer pairwise distances of the
// selected pieces. They are divided by the standard deviation of all gold
// pairwise outfit distances and of all within-layer catalog distances
// respectively (left as is when that deviation is 0).
CapsuleScore GoldScore(const Catalog& catalog, const Capsule& capsule,
                       const std::vector<std::vector<GarmentIndex>>& gold,
                       const FeatureTable& features);

struct BenchConfig {
  std::vector<int> sizes{6};
  int t = 2;
  std::vector<std::uint64_t> seeds{0};
  int num_layers = 3;
  bool include_optimal = true;
  double budget = kDefaultEnumerationBudget;
  double epsilon = 0.5;
  int max_sweeps = 100;
  int threads = 1;
  // Evaluation-count slope vs T, measured on one instance.
  std::vector<int> slope_ts{2, 3, 4, 5};
  int slope_layers = 4;
  int slope_size = 20;
  SynthConfig synth;
  InferenceConfig inference;
};

struct SolverRun {
  std::string solver;
  bool ok = true;
  double objective = 0.0;
  std::optional<double> ratio;
  std::uint64_t evaluations = 0;
  int sweeps = 0;
  double wall_seconds = 0.0;
  double required = 0.0;  // enumeration count when the budget was exceeded
};

struct BenchInstance {
  int size = 0;
  std::uint64_t seed = 0;
  std::vector<SolverRun> runs;
};

struct SlopePoint {
  int t = 0;
  std::uint64_t naive = 0;
  std::uint64_t iterative_sweep = 0;
};

struct BenchReport {
  std::vector<BenchInstance> instances;
  std::vector<SlopePoint> slope_points;
  double naive_slope = 0.0;
  double iterative_sweep_slope = 0.0;
};

// Least-squares slope of log(y) against log(x).
double LogLogSlope(std::span<const double> x, std::span<const double> y);

// Synthetic instance used by the benchmark: a planted world with
// `garments_per_layer` = size over `num_layers` layers.
SynthData BenchInstanceData(const BenchConfig& config, int num_layers,
                            int size, std::uint64_t seed);

BenchReport BenchSolvers(const BenchConfig& config);

// Wall times are left out unless `timings` is set, so the default output is
// reproducible byte for byte.
nlohmann::json BenchToJson(const BenchReport& report, bool timings = false);

}  // namespace wardrobe

#endif  // WARDROBE_EVAL_H_
