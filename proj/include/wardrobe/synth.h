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

#ifndef WARDROBE_SYNTH_H_
#define WARDROBE_SYNTH_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wardrobe/catalog.h"
#include "wardrobe/style_model.h"

namespace wardrobe {

// Planted correlated-topic world. Topics come in groups whose members are
// strongly correlated under the logistic-normal prior; every garment and
// labeled outfit belongs to the group of its dominant topic.
struct SynthConfig {
  int num_layers = 3;
  int garments_per_layer = 10;
  int num_groups = 3;
  int topics_per_group = 2;
  int attributes_per_layer = 12;
  int attributes_per_garment = 3;
  double correlation = 0.9;
  double topic_scale = 2.0;
  // Mass of each topic on its own attribute block within every layer.
  double block_mass = 0.9;
  int corpus_size = 500;
  int num_labeled = 60;
  int num_gold = 10;
  int num_user = 10;
  int user_group = 0;
  // Random catalog outfits used to place the step threshold at their median.
  int calibration_outfits = 200;
  std::uint64_t seed = 0;
};

struct SynthData {
  Catalog catalog;
  StyleModel model;  // the planted CTM
  std::vector<int> garment_groups;
  std::vector<AttributeBag> corpus;
  std::vector<MetaOutfit> labeled;
  std::vector<std::vector<GarmentIndex>> gold;
  std::vector<std::vector<GarmentIndex>> user;
  // Pairs of mutually exclusive "dim=value" labels.
  std::vector<std::pair<std::string, std::string>> exclusive_pairs;
  double threshold = kDefaultThreshold;
};

SynthData Synthesize(const SynthConfig& config);

// Block-structured topics over `vocab_size` attributes: topic k puts
// `block_mass` uniformly on its own contiguous block and the rest uniformly
// on everything. Prior: mu = 0, Sigma = scale^2 * ((1 - rho) I + rho J)
// within groups of `topics_per_group`.
StyleModel PlantedModel(int num_topics, int vocab_size, double block_mass,
                        int topics_per_group, double correlation,
                        double scale);

// Documents drawn from a CTM: eta ~ N(mu, Sigma), then `length` tokens
// from softmax(eta)' phi.
std::vector<AttributeBag> SampleDocuments(const StyleModel& model, int count,
                                          int length, std::uint64_t seed);

// Median per-token log-likelihood of `outfits` under `model`.
double MedianLogLikelihood(const StyleModel& model, const Catalog& catalog,
                           const std::vector<std::vector<GarmentIndex>>& outfits,
                           const InferenceConfig& inference,
                           std::uint64_t seed);

// Uniformly random full outfits (one garment per non-empty layer).
std::vector<std::vector<GarmentIndex>> RandomOutfits(const Catalog& catalog,
                                                     int count,
                                                     std::uint64_t seed);

}  // namespace wardrobe

#endif  // WARDROBE_SYNTH_H_
