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

#ifndef WARDROBE_OBJECTIVE_H_
#define WARDROBE_OBJECTIVE_H_

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "wardrobe/catalog.h"
#include "wardrobe/style_model.h"

namespace wardrobe {

// What the objective needs to know about one outfit.
struct OutfitScore {
  double log_likelihood = 0.0;  // raw per-token score, kept for reports
  double compat = 0.0;          // c(o): the value summed by Compatibility()
  std::vector<double> theta;    // P(z_i | o), a point on the simplex
};

using OutfitMembers = std::vector<GarmentIndex>;

// Scores outfits given their members in layer order.
class OutfitScorer {
 public:
  virtual ~OutfitScorer() = default;
  virtual int num_styles() const = 0;
  virtual OutfitScore Score(std::span<const GarmentIndex> members) const = 0;
};

// Per-outfit RNG seed derived from `seed` and the members' ids.
std::uint64_t OutfitSeed(const Catalog& catalog,
                         std::span<const GarmentIndex> members,
                         std::uint64_t seed);

// The raw score ModelScorer assigns to an outfit.
double OutfitLogLikelihood(const Catalog& catalog, const StyleModel& model,
                           std::span<const GarmentIndex> members,
                           const InferenceConfig& inference,
                           std::uint64_t seed);

// Scores with a fitted StyleModel: c(o) is the step-thresholded per-token
// log-likelihood and theta the inferred style composition. Every outfit gets
// its own RNG seed derived from `seed` and its member ids, so scores do not
// depend on evaluation order.
class ModelScorer final : public OutfitScorer {
 public:
  ModelScorer(const Catalog& catalog, const StyleModel& model,
              double threshold, InferenceConfig inference, std::uint64_t seed);

  int num_styles() const override { return model_.num_topics(); }
  OutfitScore Score(std::span<const GarmentIndex> members) const override;

  double threshold() const { return threshold_; }

 private:
  const Catalog& catalog_;
  const StyleModel& model_;
  double threshold_;
  InferenceConfig inference_;
  std::uint64_t seed_;
};

// Adapts a callable; handy for synthetic instances and tests.
class FunctionScorer final : public OutfitScorer {
 public:
  using Fn = std::function<OutfitScore(std::span<const GarmentIndex>)>;
  FunctionScorer(int num_styles, Fn fn)
      : num_styles_(num_styles), fn_(std::move(fn)) {}

  int num_styles() const override { return num_styles_; }
  OutfitScore Score(std::span<const GarmentIndex> members) const override {
    return fn_(members);
  }

 private:
  int num_styles_;
  Fn fn_;
};

struct ObjectiveOptions {
  // Personal style weights w_i; when present the versatility term is
  // sum_i w_i v(z_i) instead of sum_i v(z_i).
  std::optional<std::vector<double>> weights;
  // Multiplier on the versatility term. 1 reproduces C(y) + V(y).
  double cv_weight = 1.0;
};

// The capsule objective obj(y) = C(y) + cv_weight * V(y) over sets of
// outfits, with a concurrent memo of per-outfit scores.
class Objective {
 public:
  // Throws ValidationError if weights are malformed.
  Objective(const OutfitScorer& scorer, ObjectiveOptions options = {});

  int num_styles() const { return num_styles_; }
  bool personalized() const { return options_.weights.has_value(); }
  double cv_weight() const { return options_.cv_weight; }
  // w_i when personalized, 1 otherwise.
  double style_weight(int i) const {
    return personalized() ? (*options_.weights)[i] : 1.0;
  }
  const ObjectiveOptions& options() const { return options_; }

  // Memoized score. Safe to call concurrently; references stay valid for
  // the lifetime of the Objective. Each call counts as one evaluation.
  const OutfitScore& Lookup(std::span<const GarmentIndex> members) const;

  // C(y) = sum c(o).
  double Compatibility(std::span<const OutfitMembers> outfits) const;
  // v_y(z_i) = 1 - prod_o (1 - P(z_i | o)) for every style.
  std::vector<double> StyleCoverage(std::span<const OutfitMembers> outfits) const;
  // V(y) = sum_i v_y(z_i), in [0, K].
  double Coverage(std::span<const OutfitMembers> outfits) const;
  // V'(y) = sum_i w_i v_y(z_i), in [0, 1]. Throws if no weights are set.
  double PersonalizedCoverage(std::span<const OutfitMembers> outfits) const;
  // C(y) + cv_weight * (V'(y) if personalized else V(y)).
  double Value(std::span<const OutfitMembers> outfits) const;

  std::uint64_t evaluations() const { return evaluations_.load(); }
  std::uint64_t cache_misses() const { return misses_.load(); }
  void ResetCounters() const {
    evaluations_ = 0;
    misses_ = 0;
  }

 private:
  struct KeyHash {
    std::size_t operator()(const OutfitMembers& key) const;
  };

  const OutfitScorer& scorer_;
  ObjectiveOptions options_;
  int num_styles_;

  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<OutfitMembers, OutfitScore, KeyHash> memo_;
  mutable std::atomic<std::uint64_t> evaluations_{0};
  mutable std::atomic<std::uint64_t> misses_{0};
};

// Running state for incremental gains: the compatibility sum and the
// per-style uncovered mass prod_o (1 - P(z_i | o)) of the current set.
class CoverageState {
 public:
  explicit CoverageState(const Objective& objective);

  void Add(const OutfitScore& score);
  // Contribution of a block of new outfits summarized by its compatibility
  // sum and per-style products of (1 - theta).
  void AddBlock(double compat_sum, std::span<const double> uncovered_product);
  // obj(y + block) - obj(y) for a block summarized the same way.
  double Gain(double compat_sum,
              std::span<const double> uncovered_product) const;
  double value() const;

 private:
  const Objective& objective_;
  double compat_ = 0.0;
  std::vector<double> uncovered_;
};

// Loads a weight vector from a JSON array or {"weights": [...]}.
std::vector<double> LoadWeights(const std::filesystem::path& path);

}  // namespace wardrobe

#endif  // WARDROBE_OBJECTIVE_H_
