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

#include "wardrobe/objective.h"

#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <thread>

#include <gtest/gtest.h>

#include "wardrobe/error.h"
#include "wardrobe/synth.h"

namespace wardrobe {
namespace {

// Deterministic pseudo-random scores keyed by outfit members.
OutfitScore TableScore(std::span<const GarmentIndex> members, int k_count) {
  std::uint64_t h = 1469598103934665603ULL;
  for (GarmentIndex g : members) h = (h ^ g) * 1099511628211ULL;
  std::mt19937_64 rng(h);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  OutfitScore s;
  s.log_likelihood = -u(rng) * 5;
  s.compat = s.log_likelihood > -2.5 ? 1.0 : 0.0;
  double total = 0.0;
  for (int k = 0; k < k_count; ++k) {
    s.theta.push_back(u(rng) + 0.01);
    total += s.theta.back();
  }
  for (double& t : s.theta) t /= total;
  return s;
}

FunctionScorer Table(int k_count, std::atomic<int>* calls = nullptr) {
  return FunctionScorer(k_count, [=](std::span<const GarmentIndex> m) {
    if (calls) ++*calls;
    return TableScore(m, k_count);
  });
}

std::vector<OutfitMembers> SomeOutfits() {
  return {{0, 3, 6}, {0, 4, 6}, {1, 4, 7}, {2, 5, 8}};
}

TEST(ObjectiveTest, ValueIsCompatibilityPlusWeightedCoverage) {
  const FunctionScorer scorer = Table(3);
  const auto outfits = SomeOutfits();
  double c = 0.0;
  std::vector<double> uncovered(3, 1.0);
  for (const auto& o : outfits) {
    const OutfitScore s = TableScore(o, 3);
    c += s.compat;
    for (int k = 0; k < 3; ++k) uncovered[k] *= 1.0 - s.theta[k];
  }
  double v = 0.0;
  for (double u : uncovered) v += 1.0 - u;

  const Objective plain(scorer, {.weights = std::nullopt, .cv_weight = 0.7});
  EXPECT_DOUBLE_EQ(plain.Compatibility(outfits), c);
  EXPECT_NEAR(plain.Coverage(outfits), v, 1e-14);
  EXPECT_NEAR(plain.Value(outfits), c + 0.7 * v, 1e-14);
  EXPECT_THROW(plain.PersonalizedCoverage(outfits), ValidationError);

  const std::vector<double> w = {0.5, 0.3, 0.2};
  const Objective personal(scorer, {.weights = w, .cv_weight = 1.0});
  double vw = 0.0;
  for (int k = 0; k < 3; ++k) vw += w[k] * (1.0 - uncovered[k]);
  EXPECT_NEAR(personal.PersonalizedCoverage(outfits), vw, 1e-14);
  EXPECT_NEAR(personal.Value(outfits), c + vw, 1e-14);
}

TEST(ObjectiveTest, EmptySetScoresZero) {
  const FunctionScorer scorer = Table(2);
  const Objective objective(scorer);
  EXPECT_EQ(objective.Value({}), 0.0);
  EXPECT_EQ(objective.StyleCoverage({}), std::vector<double>(2, 0.0));
}

TEST(ObjectiveTest, CoverageIsBoundedMonotoneAndSubmodular) {
  const FunctionScorer scorer = Table(4);
  const Objective objective(scorer);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<GarmentIndex> pick(0, 9);
  std::vector<OutfitMembers> pool;
  for (int i = 0; i < 12; ++i) pool.push_back({pick(rng), pick(rng)});
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<OutfitMembers> small, large;
    for (const auto& o : pool) {
      const int r = static_cast<int>(rng() % 3);
      if (r == 0) small.push_back(o);
      if (r <= 1) large.push_back(o);
    }
    const OutfitMembers extra = {pick(rng), pick(rng)};
    const double vs = objective.Coverage(small);
    const double vl = objective.Coverage(large);
    EXPECT_GE(vs, 0.0);
    EXPECT_LE(vl, 4.0);
    EXPECT_LE(vs, vl + 1e-12);
    auto small_plus = small;
    small_plus.push_back(extra);
    auto large_plus = large;
    large_plus.push_back(extra);
    EXPECT_GE(objective.Coverage(small_plus) - vs,
              objective.Coverage(large_plus) - vl - 1e-12);
  }
}

TEST(ObjectiveTest, AddingOneOutfitAddsCompatPlusCoverageGains) {
  const FunctionScorer scorer = Table(4);
  const Objective objective(scorer);
  std::vector<OutfitMembers> current;
  for (const auto& o : SomeOutfits()) {
    const std::vector<double> before = objective.StyleCoverage(current);
    const double value_before = objective.Value(current);
    current.push_back(o);
    const std::vector<double> after = objective.StyleCoverage(current);
    double gains = 0.0;
    for (int k = 0; k < 4; ++k) {
      EXPECT_GE(after[k] - before[k], 0.0);
      gains += after[k] - before[k];
    }
    EXPECT_NEAR(objective.Value(current) - value_before,
                TableScore(o, 4).compat + gains, 1e-12);
  }
}

TEST(ObjectiveTest, MemoizesScoresAndCountsLookups) {
  std::atomic<int> calls = 0;
  const FunctionScorer scorer = Table(2, &calls);
  const Objective objective(scorer);
  const OutfitMembers o = {1, 2, 3};
  const OutfitScore& first = objective.Lookup(o);
  const OutfitScore& second = objective.Lookup(o);
  EXPECT_EQ(&first, &second);
  EXPECT_EQ(calls.load(), 1);
  EXPECT_EQ(objective.evaluations(), 2u);
  EXPECT_EQ(objective.cache_misses(), 1u);
  objective.ResetCounters();
  EXPECT_EQ(objective.evaluations(), 0u);
}

TEST(ObjectiveTest, ConcurrentLookupsAgree) {
  std::atomic<int> calls = 0;
  const FunctionScorer scorer = Table(3, &calls);
  const Objective objective(scorer);
  std::vector<std::thread> threads;
  std::atomic<int> mismatches = 0;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (GarmentIndex g = 0; g < 200; ++g) {
        const OutfitMembers o = {g, g + 1};
        if (objective.Lookup(o).theta != TableScore(o, 3).theta) ++mismatches;
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(mismatches.load(), 0);
  EXPECT_EQ(objective.cache_misses(), 200u);
  EXPECT_EQ(objective.evaluations(), 1600u);
}

TEST(ObjectiveTest, RejectsMalformedWeights) {
  const FunctionScorer scorer = Table(3);
  using W = std::vector<double>;
  EXPECT_THROW(Objective(scorer, {.weights = W{0.5, 0.5}}), ValidationError);
  EXPECT_THROW(Objective(scorer, {.weights = W{1.2, -0.1, -0.1}}),
               ValidationError);
  EXPECT_THROW(Objective(scorer, {.weights = W{0.2, 0.2, 0.2}}),
               ValidationError);
  EXPECT_THROW(Objective(scorer, {.weights = std::nullopt, .cv_weight = -1}),
               ValidationError);
  EXPECT_NO_THROW(Objective(scorer, {.weights = W{1.0, 0.0, 0.0}}));
}

TEST(CoverageStateTest, GainMatchesValueDifference) {
  const FunctionScorer scorer = Table(3);
  for (const bool personal : {false, true}) {
    ObjectiveOptions options;
    if (personal) options.weights = std::vector<double>{0.6, 0.1, 0.3};
    options.cv_weight = 0.8;
    const Objective objective(scorer, options);
    CoverageState state(objective);
    std::vector<OutfitMembers> current;
    const auto outfits = SomeOutfits();
    for (std::size_t i = 0; i < outfits.size(); ++i) {
      // Summarize outfits i.. as one block and compare with the direct delta.
      double block_compat = 0.0;
      std::vector<double> product(3, 1.0);
      for (std::size_t j = i; j < outfits.size(); ++j) {
        const OutfitScore& s = objective.Lookup(outfits[j]);
        block_compat += s.compat;
        for (int k = 0; k < 3; ++k) product[k] *= 1.0 - s.theta[k];
      }
      auto extended = current;
      extended.insert(extended.end(), outfits.begin() + i, outfits.end());
      EXPECT_NEAR(state.Gain(block_compat, product),
                  objective.Value(extended) - objective.Value(current), 1e-12);
      state.Add(objective.Lookup(outfits[i]));
      current.push_back(outfits[i]);
      EXPECT_NEAR(state.value(), objective.Value(current), 1e-12);
    }
  }
}

class ModelScorerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    SynthConfig config;
    config.garments_per_layer = 4;
    config.corpus_size = 20;
    config.num_labeled = 4;
    config.num_gold = 2;
    config.num_user = 2;
    config.calibration_outfits = 20;
    config.seed = 9;
    data_ = Synthesize(config);
  }
  SynthData data_;
};

TEST_F(ModelScorerTest, StepThresholdAndOrderIndependence) {
  const Catalog& catalog = data_.catalog;
  const OutfitMembers a = {catalog.layer(0)[0], catalog.layer(1)[1],
                           catalog.layer(2)[2]};
  const OutfitMembers b = {catalog.layer(0)[3], catalog.layer(1)[0],
                           catalog.layer(2)[1]};
  const InferenceConfig inference;
  const double ll = OutfitLogLikelihood(catalog, data_.model, a, inference, 4);
  const ModelScorer at(catalog, data_.model, ll, inference, 4);
  const ModelScorer above(catalog, data_.model, ll + 1e-9, inference, 4);
  EXPECT_EQ(at.Score(a).log_likelihood, ll);
  EXPECT_EQ(at.Score(a).compat, 1.0);
  EXPECT_EQ(above.Score(a).compat, 0.0);

  // Scores depend on the outfit, not on what was scored before it.
  const ModelScorer fresh(catalog, data_.model, -4.0, inference, 4);
  const OutfitScore b_first = fresh.Score(b);
  fresh.Score(a);
  EXPECT_EQ(fresh.Score(b).log_likelihood, b_first.log_likelihood);
  EXPECT_EQ(fresh.Score(b).theta, b_first.theta);
  double sum = 0.0;
  for (double t : b_first.theta) sum += t;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST_F(ModelScorerTest, RejectsVocabularyMismatch) {
  const StyleModel other = PlantedModel(2, 5, 0.9, 1, 0.0, 1.0);
  EXPECT_THROW(ModelScorer(data_.catalog, other, -4.0, {}, 0), ValidationError);
}

TEST(LoadWeightsTest, AcceptsBothLayouts) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto bare = dir / "wardrobe_weights_bare.json";
  const auto wrapped = dir / "wardrobe_weights_wrapped.json";
  std::ofstream(bare) << "[0.25, 0.75]";
  std::ofstream(wrapped) << R"({"weights": [0.5, 0.5]})";
  EXPECT_EQ(LoadWeights(bare), (std::vector<double>{0.25, 0.75}));
  EXPECT_EQ(LoadWeights(wrapped), (std::vector<double>{0.5, 0.5}));
  std::ofstream(bare) << R"({"w": 1})";
  EXPECT_THROW(LoadWeights(bare), ValidationError);
  std::filesystem::remove(bare);
  std::filesystem::remove(wrapped);
}

}  // namespace
}  // namespace wardrobe
