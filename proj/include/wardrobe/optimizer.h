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

#ifndef WARDROBE_OPTIMIZER_H_
#define WARDROBE_OPTIMIZER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "wardrobe/catalog.h"
#include "wardrobe/objective.h"

namespace wardrobe {

struct GreedyConfig {
  // Pieces per layer, T_i. Layers with 0 do not take part in the capsule.
  std::vector<int> counts;
  // Sweeps stop once the end-of-sweep objective improves by less than this.
  double epsilon = 0.5;
  int max_sweeps = 100;
  // Seed-outfit pieces. They are never reset and count toward T_i.
  std::vector<GarmentIndex> pinned;
  int threads = 1;
  // Re-derive every chosen marginal gain by full recomputation and record
  // the largest discrepancy in the trace. Expensive; for tests.
  bool verify_gains = false;
};

struct GreedyStep {
  int sweep = 0;  // 0 for the naive solver
  int layer = 0;
  int t = 0;      // 1-based step within the layer pass (or naive round)
  GarmentIndex garment = 0;
  double gain = 0.0;
};

struct RunTrace {
  // Objective of the kept capsule at the end of each sweep.
  std::vector<double> sweep_objectives;
  // obj^{m-1}_cur of each sweep: the objective the sweep itself reached,
  // which drives the convergence test.
  std::vector<double> sweep_tracked;
  // Set when the final sweep lowered the objective and was undone.
  bool rejected_last_sweep = false;
  // Outfit-score lookups spent in each sweep (one entry for naive).
  std::vector<std::uint64_t> sweep_evaluations;
  std::vector<GreedyStep> steps;
  std::uint64_t evaluations = 0;
  double wall_seconds = 0.0;
  int sweeps = 0;
  bool converged = false;
  double max_gain_discrepancy = 0.0;
};

struct SolveResult {
  Capsule capsule;
  double objective = 0.0;
  RunTrace trace;
};

// Iterative per-layer greedy: sweep the layers, reset each one and
// greedily refill it with the others fixed, until the end-of-sweep
// objective gains less than epsilon.
SolveResult IterativeGreedy(const Catalog& catalog, const Objective& objective,
                            const GreedyConfig& config);

// Round-robin greedy without resets: in round t every layer picks its best
// garment against the selections of round t - 1.
SolveResult NaiveGreedy(const Catalog& catalog, const Objective& objective,
                        const GreedyConfig& config);

inline constexpr double kDefaultEnumerationBudget = 1e7;

struct OptimalResult {
  Capsule capsule;
  double objective = 0.0;
  double enumerated = 0.0;
  std::uint64_t evaluations = 0;
  double wall_seconds = 0.0;
};

// Number of capsules an exhaustive search visits: prod_i C(N_i, T_i), with
// pinned pieces forced in.
double EnumerationCount(const Catalog& catalog, std::span<const int> counts,
                        std::span<const GarmentIndex> pinned = {});

// Exact argmax over all capsules. Ties go to the lexicographically smallest
// id tuple. Throws BudgetExceededError when EnumerationCount > budget.
OptimalResult ExhaustiveOptimal(const Catalog& catalog,
                                const Objective& objective,
                                std::span<const int> counts,
                                double budget = kDefaultEnumerationBudget,
                                std::span<const GarmentIndex> pinned = {});

// obj of the capsule's full outfit set.
double CapsuleObjective(const Objective& objective, const Capsule& capsule);

// One greedy pass over `layer` with the other layers of `capsule` fixed.
// The layer is reset to its pinned pieces and refilled to `count` pieces.
// Returns obj(y_T), where y_0 is the pinned pieces' outfits (empty if none).
double GreedyLayerPass(const Catalog& catalog, const Objective& objective,
                       Capsule& capsule, int layer, int count,
                       std::span<const GarmentIndex> pinned, int threads = 1,
                       std::vector<GreedyStep>* steps = nullptr,
                       double* max_discrepancy = nullptr);

nlohmann::json TraceToJson(const RunTrace& trace, const Catalog& catalog);

}  // namespace wardrobe

#endif  // WARDROBE_OPTIMIZER_H_
