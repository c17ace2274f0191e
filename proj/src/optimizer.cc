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
#include <chrono>
#include <cmath>
#include <string>

#include "parallel.h"
#include "wardrobe/error.h"

namespace wardrobe {
namespace {

constexpr char kModule[] = "optimizer";

[[noreturn]] void Fail(const std::string& message) {
  throw ValidationError(kModule, message);
}

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Block {
  double compat = 0.0;
  std::vector<double> uncovered;
};

Block SummarizeBlock(const Objective& objective,
                     const std::vector<OutfitMembers>& outfits) {
  Block block;
  block.uncovered.assign(objective.num_styles(), 1.0);
  for (const auto& members : outfits) {
    const OutfitScore& score = objective.Lookup(members);
    block.compat += score.compat;
    for (std::size_t k = 0; k < block.uncovered.size(); ++k) {
      block.uncovered[k] *= 1.0 - score.theta[k];
    }
  }
  return block;
}

// Pinned pieces grouped by layer, after validating counts and pins.
std::vector<std::vector<GarmentIndex>> CheckProblem(
    const Catalog& catalog, std::span<const int> counts,
    std::span<const GarmentIndex> pinned) {
  if (static_cast<int>(counts.size()) != catalog.num_layers()) {
    Fail("expected " + std::to_string(catalog.num_layers()) +
         " per-layer counts, got " + std::to_string(counts.size()));
  }
  bool any = false;
  for (int i = 0; i < catalog.num_layers(); ++i) {
    if (counts[i] < 0) Fail("negative count for layer " + LayerName(i));
    if (static_cast<std::size_t>(counts[i]) > catalog.layer_size(i)) {
      Fail("layer " + LayerName(i) + " has " +
           std::to_string(catalog.layer_size(i)) + " garments but " +
           std::to_string(counts[i]) + " were requested");
    }
    any = any || counts[i] > 0;
  }
  if (!any) Fail("no layer has a positive piece count");
  std::vector<std::vector<GarmentIndex>> by_layer(catalog.num_layers());
  for (GarmentIndex g : pinned) {
    if (g >= catalog.size()) Fail("pinned garment index out of range");
    const Garment& garment = catalog.garment(g);
    auto& pins = by_layer[garment.layer];
    if (std::find(pins.begin(), pins.end(), g) != pins.end()) {
      Fail("garment \"" + garment.id + "\" is pinned twice");
    }
    pins.push_back(g);
    if (static_cast<int>(pins.size()) > counts[garment.layer]) {
      Fail("layer " + LayerName(garment.layer) + " has more pinned pieces (" +
           std::to_string(pins.size()) + ") than its count (" +
           std::to_string(counts[garment.layer]) + ")");
    }
  }
  return by_layer;
}

double LayerPass(const Catalog& catalog, const Objective& objective,
                 Capsule& capsule, int layer, int count,
                 std::span<const GarmentIndex> pinned, int threads,
                 std::vector<GreedyStep>* steps, int sweep,
                 double* max_discrepancy, std::uint64_t* verify_evaluations) {
  capsule.Set(layer, {pinned.begin(), pinned.end()});

  CoverageState state(objective);
  if (!pinned.empty()) {
    for (const auto& members : CapsuleOutfitMembers(capsule)) {
      state.Add(objective.Lookup(members));
    }
  }

  std::vector<GarmentIndex> candidates;
  for (GarmentIndex g : catalog.layer(layer)) {
    if (std::find(pinned.begin(), pinned.end(), g) == pinned.end()) {
      candidates.push_back(g);
    }
  }
  // The other layers stay fixed for the whole pass, so each candidate's
  // block of new outfits is summarized once.
  std::vector<Block> blocks(candidates.size());
  internal::ParallelFor(candidates.size(), threads, [&](std::size_t c) {
    blocks[c] = SummarizeBlock(
        objective, IncrementalOutfitMembers(capsule, candidates[c], catalog));
  });

  std::vector<char> taken(candidates.size(), 0);
  const int picks = count - static_cast<int>(pinned.size());
  for (int t = 1; t <= picks; ++t) {
    std::size_t best = candidates.size();
    double best_gain = 0.0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (taken[c]) continue;
      const double gain = state.Gain(blocks[c].compat, blocks[c].uncovered);
      if (best == candidates.size() || gain > best_gain) {
        best = c;
        best_gain = gain;
      }
    }
    if (max_discrepancy != nullptr) {
      const std::uint64_t before = objective.evaluations();
      std::vector<OutfitMembers> current;
      if (capsule.count(layer) > 0) current = CapsuleOutfitMembers(capsule);
      const double base = objective.Value(current);
      auto extra = IncrementalOutfitMembers(capsule, candidates[best], catalog);
      current.insert(current.end(), extra.begin(), extra.end());
      const double exact = objective.Value(current) - base;
      *max_discrepancy =
          std::max(*max_discrepancy, std::abs(exact - best_gain));
      *verify_evaluations += objective.evaluations() - before;
    }
    taken[best] = 1;
    state.AddBlock(blocks[best].compat, blocks[best].uncovered);
    capsule.Add(catalog, candidates[best]);
    if (steps != nullptr) {
      steps->push_back({sweep, layer, t, candidates[best], best_gain});
    }
  }
  return state.value();
}

// Visits k-subsets of {0..n-1} in lexicographic order.
bool NextCombination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[i] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[i];
  for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

std::vector<int> FirstCombination(int k) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  return idx;
}

double Binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                             std::lgamma(n - k + 1.0)));
}

}  // namespace

double CapsuleObjective(const Objective& objective, const Capsule& capsule) {
  return objective.Value(CapsuleOutfitMembers(capsule));
}

double GreedyLayerPass(const Catalog& catalog, const Objective& objective,
                       Capsule& capsule, int layer, int count,
                       std::span<const GarmentIndex> pinned, int threads,
                       std::vector<GreedyStep>* steps,
                       double* max_discrepancy) {
  if (layer < 0 || layer >= capsule.num_layers()) Fail("layer out of range");
  if (count < static_cast<int>(pinned.size()) ||
      static_cast<std::size_t>(count) > catalog.layer_size(layer)) {
    Fail("invalid count for layer " + LayerName(layer));
  }
  std::uint64_t ignored = 0;
  return LayerPass(catalog, objective, capsule, layer, count, pinned, threads,
                   steps, 0, max_discrepancy, &ignored);
}

SolveResult IterativeGreedy(const Catalog& catalog, const Objective& objective,
                            const GreedyConfig& config) {
  const auto pins = CheckProblem(catalog, config.counts, config.pinned);
  if (config.max_sweeps < 1) Fail("max_sweeps must be positive");
  const auto start = Clock::now();

  SolveResult result{Capsule(catalog.num_layers()), 0.0, {}};
  RunTrace& trace = result.trace;
  for (int i = 0; i < catalog.num_layers(); ++i) result.capsule.Set(i, pins[i]);

  double* discrepancy = config.verify_gains ? &trace.max_gain_discrepancy
                                            : nullptr;
  std::uint64_t verify_evaluations = 0;
  double previous = 0.0;
  double delta = 0.0;
  Capsule accepted = result.capsule;
  do {
    const std::uint64_t before = objective.evaluations();
    const std::uint64_t verify_before = verify_evaluations;
    double tracked = 0.0;
    for (int i = 0; i < catalog.num_layers(); ++i) {
      if (config.counts[i] == 0) continue;
      tracked = LayerPass(catalog, objective, result.capsule, i,
                          config.counts[i], pins[i], config.threads,
                          &trace.steps, trace.sweeps + 1, discrepancy,
                          &verify_evaluations);
    }
    ++trace.sweeps;
    trace.sweep_evaluations.push_back(objective.evaluations() - before -
                                      (verify_evaluations - verify_before));
    // The last pass refilled a layer against every other layer, so its
    // y_T is the capsule's whole outfit set.
    trace.sweep_tracked.push_back(tracked);
    delta = tracked - previous;
    if (delta < 0.0) {
      // Resets can leave the capsule worse than the last sweep's; such a
      // sweep ends the run and its capsule is not kept.
      result.capsule = accepted;
      trace.rejected_last_sweep = true;
    } else {
      accepted = result.capsule;
      previous = tracked;
    }
    trace.sweep_objectives.push_back(previous);
  } while (delta >= config.epsilon && trace.sweeps < config.max_sweeps);

  trace.converged = delta < config.epsilon;
  for (auto e : trace.sweep_evaluations) trace.evaluations += e;
  result.objective = previous;
  trace.wall_seconds = Seconds(start);
  return result;
}

SolveResult NaiveGreedy(const Catalog& catalog, const Objective& objective,
                        const GreedyConfig& config) {
  const auto pins = CheckProblem(catalog, config.counts, config.pinned);
  const auto start = Clock::now();
  const std::uint64_t before = objective.evaluations();

  SolveResult result{Capsule(catalog.num_layers()), 0.0, {}};
  RunTrace& trace = result.trace;
  Capsule& capsule = result.capsule;
  for (int i = 0; i < catalog.num_layers(); ++i) capsule.Set(i, pins[i]);

  CoverageState state(objective);
  for (const auto& members : CapsuleOutfitMembers(capsule)) {
    state.Add(objective.Lookup(members));
  }

  for (int t = 1;; ++t) {
    const Capsule snapshot = capsule;
    std::vector<GarmentIndex> picks;
    for (int i = 0; i < catalog.num_layers(); ++i) {
      if (static_cast<int>(snapshot.count(i)) >= config.counts[i]) continue;
      std::vector<GarmentIndex> candidates;
      for (GarmentIndex g : catalog.layer(i)) {
        if (!snapshot.Contains(g)) candidates.push_back(g);
      }
      std::vector<Block> blocks(candidates.size());
      internal::ParallelFor(candidates.size(), config.threads,
                            [&](std::size_t c) {
                              blocks[c] = SummarizeBlock(
                                  objective, IncrementalOutfitMembers(
                                                 snapshot, candidates[c],
                                                 catalog));
                            });
      std::size_t best = 0;
      double best_gain = 0.0;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        const double gain = state.Gain(blocks[c].compat, blocks[c].uncovered);
        if (c == 0 || gain > best_gain) {
          best = c;
          best_gain = gain;
        }
      }
      picks.push_back(candidates[best]);
      trace.steps.push_back({0, i, t, candidates[best], best_gain});
    }
    if (picks.empty()) break;
    for (GarmentIndex g : picks) capsule.Add(catalog, g);
    // Fold in the outfits that contain at least one of this round's picks.
    for (const auto& members : CapsuleOutfitMembers(capsule)) {
      const bool fresh = std::any_of(
          members.begin(), members.end(), [&](GarmentIndex g) {
            return std::find(picks.begin(), picks.end(), g) != picks.end();
          });
      if (fresh) state.Add(objective.Lookup(members));
    }
  }

  result.objective = state.value();
  trace.sweeps = 1;
  trace.converged = true;
  trace.sweep_objectives.push_back(result.objective);
  trace.sweep_tracked.push_back(result.objective);
  trace.evaluations = objective.evaluations() - before;
  trace.sweep_evaluations.push_back(trace.evaluations);
  trace.wall_seconds = Seconds(start);
  return result;
}

double EnumerationCount(const Catalog& catalog, std::span<const int> counts,
                        std::span<const GarmentIndex> pinned) {
  const auto pins = CheckProblem(catalog, counts, pinned);
  double total = 1.0;
  for (int i = 0; i < catalog.num_layers(); ++i) {
    if (counts[i] == 0) continue;
    const int fixed = static_cast<int>(pins[i].size());
    total *= Binomial(static_cast<int>(catalog.layer_size(i)) - fixed,
                      counts[i] - fixed);
  }
  return total;
}

OptimalResult ExhaustiveOptimal(const Catalog& catalog,
                                const Objective& objective,
                                std::span<const int> counts, double budget,
                                std::span<const GarmentIndex> pinned) {
  const auto pins = CheckProblem(catalog, counts, pinned);
  const double required = EnumerationCount(catalog, counts, pinned);
  if (required > budget) throw BudgetExceededError(kModule, required, budget);
  const auto start = Clock::now();
  const std::uint64_t before = objective.evaluations();
  const int num_styles = objective.num_styles();

  struct Level {
    int layer;
    std::vector<GarmentIndex> garments;  // the layer, by id
    std::vector<int> fixed;              // positions of pinned pieces
    std::vector<int> free;               // positions of the rest
    int picks;                           // how many free positions to take
  };
  std::vector<Level> levels;
  for (int i = 0; i < catalog.num_layers(); ++i) {
    if (counts[i] == 0) continue;
    Level level{i, {}, {}, {}, counts[i] - static_cast<int>(pins[i].size())};
    auto span = catalog.layer(i);
    level.garments.assign(span.begin(), span.end());
    for (int p = 0; p < static_cast<int>(level.garments.size()); ++p) {
      const GarmentIndex g = level.garments[p];
      const bool is_pinned =
          std::find(pins[i].begin(), pins[i].end(), g) != pins[i].end();
      (is_pinned ? level.fixed : level.free).push_back(p);
    }
    levels.push_back(std::move(level));
  }
  const std::size_t depth = levels.size();

  // Dense scores over the full product of active layers, last layer fastest.
  std::size_t total = 1;
  for (const auto& level : levels) total *= level.garments.size();
  std::vector<double> compat(total);
  std::vector<double> complement(total * num_styles);
  {
    std::vector<std::size_t> radix(depth, 0);
    std::vector<OutfitMembers> all(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
      OutfitMembers& members = all[idx];
      for (std::size_t l = 0; l < depth; ++l) {
        members.push_back(levels[l].garments[radix[l]]);
      }
      for (std::size_t l = depth; l-- > 0;) {
        if (++radix[l] < levels[l].garments.size()) break;
        radix[l] = 0;
      }
    }
    for (std::size_t idx = 0; idx < total; ++idx) {
      const OutfitScore& score = objective.Lookup(all[idx]);
      compat[idx] = score.compat;
      for (int k = 0; k < num_styles; ++k) {
        complement[idx * num_styles + k] = 1.0 - score.theta[k];
      }
    }
  }

  auto selection = [](const Level& level, const std::vector<int>& combo) {
    std::vector<int> positions = level.fixed;
    for (int c : combo) positions.push_back(level.free[c]);
    std::sort(positions.begin(), positions.end());
    return positions;
  };

  std::vector<std::vector<int>> chosen(depth);
  std::vector<std::vector<int>> best_choice;
  double best_value = 0.0;
  bool have_best = false;
  double enumerated = 0.0;

  const Level& last = levels.back();
  const std::size_t last_size = last.garments.size();
  std::vector<double> block_compat(last_size);
  std::vector<double> block_product(last_size * num_styles);
  std::vector<double> product(num_styles);

  auto solve_last = [&] {
    // Prefix indices of every outfit over the earlier layers' selections.
    std::vector<std::size_t> bases{0};
    for (std::size_t l = 0; l + 1 < depth; ++l) {
      std::vector<std::size_t> next;
      for (std::size_t b : bases) {
        for (int p : chosen[l]) next.push_back(b * levels[l].garments.size() + p);
      }
      bases = std::move(next);
    }
    for (std::size_t p = 0; p < last_size; ++p) {
      double c = 0.0;
      double* prod = &block_product[p * num_styles];
      std::fill(prod, prod + num_styles, 1.0);
      for (std::size_t b : bases) {
        const std::size_t idx = b * last_size + p;
        c += compat[idx];
        for (int k = 0; k < num_styles; ++k) {
          prod[k] *= complement[idx * num_styles + k];
        }
      }
      block_compat[p] = c;
    }
    std::vector<int> combo = FirstCombination(last.picks);
    const int n = static_cast<int>(last.free.size());
    do {
      const std::vector<int> positions = selection(last, combo);
      double value = 0.0;
      std::fill(product.begin(), product.end(), 1.0);
      for (int p : positions) {
        value += block_compat[p];
        for (int k = 0; k < num_styles; ++k) {
          product[k] *= block_product[p * num_styles + k];
        }
      }
      double coverage = 0.0;
      for (int k = 0; k < num_styles; ++k) {
        coverage += objective.style_weight(k) * (1.0 - product[k]);
      }
      value += objective.cv_weight() * coverage;
      enumerated += 1.0;
      if (!have_best || value > best_value) {
        have_best = true;
        best_value = value;
        chosen[depth - 1] = positions;
        best_choice = chosen;
      }
    } while (NextCombination(combo, n));
  };

  auto recurse = [&](auto&& self, std::size_t l) -> void {
    if (l + 1 == depth) {
      solve_last();
      return;
    }
    const Level& level = levels[l];
    std::vector<int> combo = FirstCombination(level.picks);
    do {
      chosen[l] = selection(level, combo);
      self(self, l + 1);
    } while (NextCombination(combo, static_cast<int>(level.free.size())));
  };
  recurse(recurse, 0);

  OptimalResult result;
  result.capsule = Capsule(catalog.num_layers());
  for (std::size_t l = 0; l < depth; ++l) {
    for (int p : best_choice[l]) {
      result.capsule.Add(catalog, levels[l].garments[p]);
    }
  }
  result.objective = best_value;
  result.enumerated = enumerated;
  result.evaluations = objective.evaluations() - before;
  result.wall_seconds = Seconds(start);
  return result;
}

nlohmann::json TraceToJson(const RunTrace& trace, const Catalog& catalog) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : trace.steps) {
    steps.push_back({{"sweep", s.sweep},
                     {"layer", LayerName(s.layer)},
                     {"t", s.t},
                     {"garment", catalog.garment(s.garment).id},
                     {"gain", s.gain}});
  }
  return {{"sweeps", trace.sweeps},
          {"converged", trace.converged},
          {"sweep_objectives", trace.sweep_objectives},
          {"sweep_tracked", trace.sweep_tracked},
          {"rejected_last_sweep", trace.rejected_last_sweep},
          {"sweep_evaluations", trace.sweep_evaluations},
          {"evaluations", trace.evaluations},
          {"steps", std::move(steps)}};
}

}  // namespace wardrobe
