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

#include "wardrobe/optimizer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <atomic>
#include <random>
#include <thread>

#include <gtest/gtest.h>

#include "wardrobe/error.h"
#include "wardrobe/eval.h"

namespace wardrobe {
namespace {

// Catalog with sizes[i] garments in layer i, ids "l<i>-<jj>".
Catalog Grid(const std::vector<int>& sizes) {
  std::vector<Garment> garments;
  for (int layer = 0; layer < static_cast<int>(sizes.size()); ++layer) {
    for (int j = 0; j < sizes[layer]; ++j) {
      char id[32];
      std::snprintf(id, sizeof(id), "l%d-%02d", layer, j);
      garments.push_back({id, layer, {0}, {}});
    }
  }
  return Catalog(AttributeVocab({"a"}), static_cast<int>(sizes.size()),
                 std::move(garments));
}

// Hash-keyed random scores: compat in {0, 1} or [0, 1], theta on the simplex.
FunctionScorer RandomScorer(int k_count, std::uint64_t salt,
                            bool binary = true) {
  return FunctionScorer(k_count, [=](std::span<const GarmentIndex> members) {
    std::uint64_t h = 1469598103934665603ULL ^ salt;
    for (GarmentIndex g : members) h = (h ^ (g + 1)) * 1099511628211ULL;
    std::mt19937_64 rng(h);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    OutfitScore s;
    s.compat = binary ? (u(rng) < 0.5 ? 1.0 : 0.0) : u(rng);
    double total = 0.0;
    for (int k = 0; k < k_count; ++k) {
      s.theta.push_back(std::pow(u(rng), 3.0) + 1e-3);
      total += s.theta.back();
    }
    for (double& t : s.theta) t /= total;
    return s;
  });
}

FunctionScorer ConstantScorer(int k_count) {
  return FunctionScorer(k_count, [=](std::span<const GarmentIndex>) {
    OutfitScore s;
    s.compat = 1.0;
    s.theta.assign(k_count, 1.0 / k_count);
    return s;
  });
}

GreedyConfig Counts(std::vector<int> counts) {
  GreedyConfig config;
  config.counts = std::move(counts);
  return config;
}

std::vector<GarmentIndex> Sorted(std::span<const GarmentIndex> s) {
  std::vector<GarmentIndex> v(s.begin(), s.end());
  std::sort(v.begin(), v.end());
  return v;
}

TEST(OptimizerTest, FullCountsSelectWholeCatalog) {
  const Catalog catalog = Grid({3, 4, 2});
  const FunctionScorer scorer = RandomScorer(3, 1);
  const Objective objective(scorer);
  const std::vector<int> counts = {3, 4, 2};
  const SolveResult iterative =
      IterativeGreedy(catalog, objective, Counts(counts));
  const SolveResult naive = NaiveGreedy(catalog, objective, Counts(counts));
  const OptimalResult optimal = ExhaustiveOptimal(catalog, objective, counts);
  EXPECT_EQ(optimal.enumerated, 1.0);
  for (const Capsule* c : {&iterative.capsule, &naive.capsule, &optimal.capsule}) {
    for (int layer = 0; layer < 3; ++layer) {
      const auto all = catalog.layer(layer);
      EXPECT_EQ(Sorted(c->selection(layer)),
                std::vector<GarmentIndex>(all.begin(), all.end()));
    }
  }
  EXPECT_NEAR(iterative.objective, optimal.objective, 1e-9);
  EXPECT_NEAR(naive.objective, optimal.objective, 1e-9);
}

TEST(OptimizerTest, TwoByTwoEnumeratesFourCapsules) {
  const Catalog catalog = Grid({2, 2});
  const FunctionScorer scorer = RandomScorer(2, 2, /*binary=*/false);
  const Objective objective(scorer);
  const std::vector<int> counts = {1, 1};
  const OptimalResult optimal = ExhaustiveOptimal(catalog, objective, counts);
  EXPECT_EQ(optimal.enumerated, 4.0);
  double best = -1.0;
  for (GarmentIndex a : catalog.layer(0)) {
    for (GarmentIndex b : catalog.layer(1)) {
      const std::vector<OutfitMembers> one = {{a, b}};
      best = std::max(best, objective.Value(one));
    }
  }
  EXPECT_DOUBLE_EQ(optimal.objective, best);
  EXPECT_DOUBLE_EQ(CapsuleObjective(objective, optimal.capsule), best);
}

TEST(OptimizerTest, EnumerationCountAndBudget) {
  const Catalog catalog = Grid({6, 6});
  const std::vector<int> counts = {3, 3};
  EXPECT_EQ(EnumerationCount(catalog, counts), 400.0);
  const std::vector<GarmentIndex> pin = {catalog.layer(0)[2]};
  EXPECT_EQ(EnumerationCount(catalog, counts, pin), 200.0);
  const FunctionScorer scorer = RandomScorer(2, 3);
  const Objective objective(scorer);
  EXPECT_THROW(ExhaustiveOptimal(catalog, objective, counts, 399.0),
               BudgetExceededError);
  EXPECT_EQ(ExhaustiveOptimal(catalog, objective, counts, 400.0).enumerated,
            400.0);
}

TEST(OptimizerTest, RejectsInvalidProblems) {
  const Catalog catalog = Grid({3, 3});
  const FunctionScorer scorer = RandomScorer(2, 4);
  const Objective objective(scorer);
  EXPECT_THROW(IterativeGreedy(catalog, objective, Counts({1})),
               ValidationError);
  EXPECT_THROW(IterativeGreedy(catalog, objective, Counts({4, 1})),
               ValidationError);
  EXPECT_THROW(NaiveGreedy(catalog, objective, Counts({0, 0})),
               ValidationError);
  EXPECT_THROW(NaiveGreedy(catalog, objective, Counts({-1, 2})),
               ValidationError);
  GreedyConfig pinned = Counts({1, 1});
  pinned.pinned = {catalog.layer(0)[0], catalog.layer(0)[1]};
  EXPECT_THROW(IterativeGreedy(catalog, objective, pinned), ValidationError);
  pinned.pinned = {catalog.layer(0)[0], catalog.layer(0)[0]};
  EXPECT_THROW(IterativeGreedy(catalog, objective, pinned), ValidationError);
  pinned.pinned = {99};
  EXPECT_THROW(IterativeGreedy(catalog, objective, pinned), ValidationError);
}

TEST(OptimizerTest, IncrementalGainsMatchRecomputation) {
  const Catalog catalog = Grid({6, 6, 6});
  for (std::uint64_t salt = 0; salt < 5; ++salt) {
    const FunctionScorer scorer = RandomScorer(4, salt, salt % 2 == 0);
    const Objective objective(scorer, {.weights = std::nullopt, .cv_weight = 1.3});
    GreedyConfig config = Counts({2, 3, 2});
    config.verify_gains = true;
    config.epsilon = 1e-9;
    const SolveResult result = IterativeGreedy(catalog, objective, config);
    EXPECT_LE(result.trace.max_gain_discrepancy, 1e-9);
    EXPECT_NEAR(result.objective, CapsuleObjective(objective, result.capsule),
                1e-9);
  }
}

TEST(OptimizerTest, PinnedPiecesStayAndCountTowardTargets) {
  const Catalog catalog = Grid({5, 5, 5});
  const FunctionScorer scorer = RandomScorer(3, 5);
  const Objective objective(scorer);
  GreedyConfig config = Counts({2, 2, 2});
  config.pinned = {catalog.layer(0)[4], catalog.layer(2)[3]};
  for (const SolveResult& r : {IterativeGreedy(catalog, objective, config),
                               NaiveGreedy(catalog, objective, config)}) {
    EXPECT_EQ(r.capsule.num_pieces(), 6u);
    for (GarmentIndex g : config.pinned) EXPECT_TRUE(r.capsule.Contains(g));
  }
  const OptimalResult optimal =
      ExhaustiveOptimal(catalog, objective, config.counts,
                        kDefaultEnumerationBudget, config.pinned);
  for (GarmentIndex g : config.pinned) EXPECT_TRUE(optimal.capsule.Contains(g));
  EXPECT_EQ(optimal.enumerated, 4.0 * 10.0 * 4.0);
}

TEST(OptimizerTest, TiesGoToSmallestIds) {
  const Catalog catalog = Grid({4, 4, 4});
  const FunctionScorer scorer = ConstantScorer(2);
  const Objective objective(scorer);
  const std::vector<int> counts = {2, 1, 3};
  const SolveResult iterative = IterativeGreedy(catalog, objective, Counts(counts));
  const SolveResult naive = NaiveGreedy(catalog, objective, Counts(counts));
  const OptimalResult optimal = ExhaustiveOptimal(catalog, objective, counts);
  for (const Capsule* c : {&iterative.capsule, &naive.capsule, &optimal.capsule}) {
    for (int layer = 0; layer < 3; ++layer) {
      const auto all = catalog.layer(layer);
      EXPECT_EQ(Sorted(c->selection(layer)),
                std::vector<GarmentIndex>(all.begin(), all.begin() + counts[layer]));
    }
  }
}

TEST(OptimizerTest, GreedyNeverBeatsOptimum) {
  const Catalog catalog = Grid({5, 5, 5});
  const std::vector<int> counts = {2, 2, 2};
  for (std::uint64_t salt = 10; salt < 20; ++salt) {
    const FunctionScorer scorer = RandomScorer(3, salt);
    const Objective objective(scorer);
    const double opt = ExhaustiveOptimal(catalog, objective, counts).objective;
    EXPECT_LE(IterativeGreedy(catalog, objective, Counts(counts)).objective,
              opt + 1e-9);
    EXPECT_LE(NaiveGreedy(catalog, objective, Counts(counts)).objective,
              opt + 1e-9);
  }
}

// With a single active layer outfits are single garments, the objective is
// monotone submodular and one greedy pass carries the (1 - 1/e) guarantee.
TEST(OptimizerTest, SingleLayerGreedyMeetsSubmodularBound) {
  const Catalog catalog = Grid({10, 3});
  const std::vector<int> counts = {4, 0};
  for (std::uint64_t salt = 0; salt < 30; ++salt) {
    const FunctionScorer scorer = RandomScorer(5, salt, /*binary=*/false);
    const Objective objective(scorer);
    const double opt = ExhaustiveOptimal(catalog, objective, counts).objective;
    const SolveResult greedy = IterativeGreedy(catalog, objective, Counts(counts));
    EXPECT_GE(greedy.objective, (1.0 - std::exp(-1.0)) * opt - 1e-12);
    EXPECT_EQ(greedy.capsule.count(1), 0u);
  }
}

TEST(OptimizerTest, ResultsDoNotDependOnThreadCount) {
  const Catalog catalog = Grid({7, 7, 7});
  const FunctionScorer scorer = RandomScorer(4, 77);
  GreedyConfig config = Counts({3, 3, 3});
  config.epsilon = 1e-9;
  const Objective one_obj(scorer);
  const SolveResult one = IterativeGreedy(catalog, one_obj, config);
  config.threads = 4;
  const Objective four_obj(scorer);
  const SolveResult four = IterativeGreedy(catalog, four_obj, config);
  EXPECT_EQ(one.capsule, four.capsule);
  EXPECT_EQ(one.objective, four.objective);
  EXPECT_EQ(one.trace.sweep_objectives, four.trace.sweep_objectives);
  EXPECT_EQ(one.trace.sweep_evaluations, four.trace.sweep_evaluations);
  ASSERT_EQ(one.trace.steps.size(), four.trace.steps.size());
  for (std::size_t i = 0; i < one.trace.steps.size(); ++i) {
    EXPECT_EQ(one.trace.steps[i].garment, four.trace.steps[i].garment);
    EXPECT_EQ(one.trace.steps[i].gain, four.trace.steps[i].gain);
  }
}

TEST(OptimizerTest, TraceIsConsistent) {
  const Catalog catalog = Grid({6, 6, 6});
  const FunctionScorer scorer = RandomScorer(3, 8);
  const Objective objective(scorer);
  GreedyConfig config = Counts({2, 2, 2});
  config.epsilon = 1e-9;
  const SolveResult r = IterativeGreedy(catalog, objective, config);
  const RunTrace& trace = r.trace;
  EXPECT_TRUE(trace.converged);
  EXPECT_EQ(static_cast<int>(trace.sweep_objectives.size()), trace.sweeps);
  EXPECT_EQ(trace.sweep_tracked.size(), trace.sweep_objectives.size());
  EXPECT_EQ(trace.steps.size(), 6u * trace.sweeps);
  for (std::size_t s = 1; s < trace.sweep_objectives.size(); ++s) {
    EXPECT_GE(trace.sweep_objectives[s], trace.sweep_objectives[s - 1]);
  }
  EXPECT_DOUBLE_EQ(trace.sweep_objectives.back(), r.objective);
  std::uint64_t total = 0;
  for (auto e : trace.sweep_evaluations) total += e;
  EXPECT_EQ(total, trace.evaluations);
  // After the first sweep every pass scores each candidate of the layer
  // against the full product of the other layers: m * N * T^(m-1).
  ASSERT_GE(trace.sweep_evaluations.size(), 2u);
  EXPECT_EQ(trace.sweep_evaluations[1], 3u * 6u * 4u);
  const auto json = TraceToJson(trace, catalog);
  EXPECT_EQ(json["sweeps"], trace.sweeps);
}

TEST(OptimizerTest, MaxSweepsStopsEarly) {
  const Catalog catalog = Grid({6, 6, 6});
  const FunctionScorer scorer = RandomScorer(3, 8);
  const Objective objective(scorer);
  GreedyConfig config = Counts({2, 2, 2});
  config.epsilon = -1.0;  // never satisfied
  config.max_sweeps = 3;
  const SolveResult r = IterativeGreedy(catalog, objective, config);
  EXPECT_EQ(r.trace.sweeps, 3);
  EXPECT_FALSE(r.trace.converged);
}

TEST(OptimizerTest, NaiveRoundsUsePreviousSelections) {
  const Catalog catalog = Grid({4, 4});
  const FunctionScorer scorer = RandomScorer(2, 6);
  const Objective objective(scorer);
  const SolveResult r = NaiveGreedy(catalog, objective, Counts({3, 2}));
  EXPECT_EQ(r.capsule.count(0), 3u);
  EXPECT_EQ(r.capsule.count(1), 2u);
  ASSERT_EQ(r.trace.steps.size(), 5u);
  for (const GreedyStep& step : r.trace.steps) EXPECT_EQ(step.sweep, 0);
  EXPECT_EQ(r.trace.sweep_evaluations.size(), 1u);
  EXPECT_EQ(r.trace.sweep_evaluations[0], r.trace.evaluations);
  EXPECT_NEAR(r.objective, CapsuleObjective(objective, r.capsule), 1e-12);
}

TEST(OptimizerTest, GreedyLayerPassRefillsOneLayer) {
  const Catalog catalog = Grid({4, 4});
  const FunctionScorer scorer = RandomScorer(2, 12);
  const Objective objective(scorer);
  Capsule capsule(2);
  capsule.Add(catalog, catalog.layer(0)[0]);
  capsule.Add(catalog, catalog.layer(1)[1]);
  capsule.Add(catalog, catalog.layer(1)[2]);
  std::vector<GreedyStep> steps;
  const double value =
      GreedyLayerPass(catalog, objective, capsule, 0, 2, {}, 1, &steps);
  EXPECT_EQ(capsule.count(0), 2u);
  EXPECT_EQ(capsule.count(1), 2u);
  EXPECT_EQ(steps.size(), 2u);
  EXPECT_NEAR(value, CapsuleObjective(objective, capsule), 1e-12);
}

TEST(OptimizerTest, ToyScaleEnumerationFitsBudget) {
  const Catalog catalog = Grid({10, 10, 10});
  const std::vector<int> counts = {3, 3, 3};
  EXPECT_EQ(EnumerationCount(catalog, counts), 1728000.0);
  EXPECT_LE(EnumerationCount(catalog, counts), kDefaultEnumerationBudget);
}

// Planted instances at m = 3, N = 10, T = 3 against the exhaustive optimum.
TEST(OptimizerTest, IterativeRatioAtLeastNaiveOnToyInstances) {
  struct Ratios {
    double naive, iterative;
  };
  auto solve = [](std::uint64_t seed) {
    const BenchConfig bench;
    const SynthData d = BenchInstanceData(bench, 3, 10, seed);
    const ModelScorer scorer(d.catalog, d.model, d.threshold, {}, seed);
    GreedyConfig config;
    config.counts = {3, 3, 3};
    const Objective naive_obj(scorer);
    const Objective iterative_obj(scorer);
    const Objective optimal_obj(scorer);
    const double optimal =
        ExhaustiveOptimal(d.catalog, optimal_obj, config.counts).objective;
    return Ratios{NaiveGreedy(d.catalog, naive_obj, config).objective / optimal,
                  IterativeGreedy(d.catalog, iterative_obj, config).objective /
                      optimal};
  };
  std::vector<Ratios> results(100);
  std::atomic<std::size_t> next = 0;
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < std::max(1u, std::thread::hardware_concurrency()); ++w) {
    workers.emplace_back([&] {
      for (std::size_t i; (i = next++) < results.size();) results[i] = solve(500 + i);
    });
  }
  for (auto& w : workers) w.join();
  int at_least = 0;
  std::vector<double> naive, iterative;
  for (const Ratios& r : results) {
    EXPECT_LE(r.iterative, 1.0 + 1e-12);
    EXPECT_LE(r.naive, 1.0 + 1e-12);
    at_least += r.iterative >= r.naive;
    naive.push_back(r.naive);
    iterative.push_back(r.iterative);
  }
  EXPECT_GE(at_least, 90);
  std::sort(naive.begin(), naive.end());
  std::sort(iterative.begin(), iterative.end());
  EXPECT_LE(naive[50], iterative[50]);
}

}  // namespace
}  // namespace wardrobe
