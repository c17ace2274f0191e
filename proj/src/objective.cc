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

#include <cmath>
#include <fstream>
#include <mutex>
#include <string>

#include "wardrobe/error.h"
#include "wardrobe/seeds.h"

namespace wardrobe {
namespace {

constexpr char kModule[] = "objective";

[[noreturn]] void Fail(const std::string& message) {
  throw ValidationError(kModule, message);
}

}  // namespace

ModelScorer::ModelScorer(const Catalog& catalog, const StyleModel& model,
                         double threshold, InferenceConfig inference,
                         std::uint64_t seed)
    : catalog_(catalog),
      model_(model),
      threshold_(threshold),
      inference_(inference),
      seed_(seed) {
  if (static_cast<std::size_t>(model.vocab_size()) != catalog.vocab().size()) {
    Fail("model vocabulary size " + std::to_string(model.vocab_size()) +
         " does not match catalog vocabulary size " +
         std::to_string(catalog.vocab().size()));
  }
}

std::uint64_t OutfitSeed(const Catalog& catalog,
                         std::span<const GarmentIndex> members,
                         std::uint64_t seed) {
  std::string ids;
  for (GarmentIndex g : members) {
    ids += catalog.garment(g).id;
    ids.push_back('\0');
  }
  return DeriveSeed(seed, "outfit", ids);
}

double OutfitLogLikelihood(const Catalog& catalog, const StyleModel& model,
                           std::span<const GarmentIndex> members,
                           const InferenceConfig& inference,
                           std::uint64_t seed) {
  return LogLikelihood(
      model, OutfitDocument(catalog, members), inference,
      DeriveSeed(OutfitSeed(catalog, members, seed), kModule, "likelihood"));
}

OutfitScore ModelScorer::Score(std::span<const GarmentIndex> members) const {
  const std::uint64_t outfit_seed = OutfitSeed(catalog_, members, seed_);
  const AttributeBag doc = OutfitDocument(catalog_, members);
  const DocumentScore doc_score = ScoreDocument(
      model_, doc, inference_, DeriveSeed(outfit_seed, kModule, "likelihood"),
      DeriveSeed(outfit_seed, kModule, "theta"));
  OutfitScore score;
  score.log_likelihood = doc_score.log_likelihood;
  score.compat = CompatScore(score.log_likelihood, threshold_);
  score.theta.assign(doc_score.theta.data(),
                     doc_score.theta.data() + doc_score.theta.size());
  return score;
}

std::size_t Objective::KeyHash::operator()(const OutfitMembers& key) const {
  std::uint64_t h = 0x84222325cbf29ce4ULL;
  for (GarmentIndex g : key) h = SplitMix64(h ^ g);
  return static_cast<std::size_t>(h);
}

Objective::Objective(const OutfitScorer& scorer, ObjectiveOptions options)
    : scorer_(scorer),
      options_(std::move(options)),
      num_styles_(scorer.num_styles()) {
  if (options_.weights) {
    const auto& w = *options_.weights;
    if (static_cast<int>(w.size()) != num_styles_) {
      Fail("weight vector has " + std::to_string(w.size()) +
           " entries but the model has " + std::to_string(num_styles_) +
           " styles");
    }
    double sum = 0.0;
    for (double x : w) {
      if (!(x >= 0.0)) Fail("style weights must be non-negative");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-6) Fail("style weights must sum to 1");
  }
  if (!(options_.cv_weight >= 0.0)) {
    Fail("versatility weight must be non-negative");
  }
}

const OutfitScore& Objective::Lookup(
    std::span<const GarmentIndex> members) const {
  ++evaluations_;
  OutfitMembers key(members.begin(), members.end());
  {
    std::shared_lock lock(mutex_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  OutfitScore score = scorer_.Score(members);
  if (static_cast<int>(score.theta.size()) != num_styles_) {
    Fail("scorer returned a style vector of the wrong size");
  }
  ++misses_;
  std::unique_lock lock(mutex_);
  return memo_.try_emplace(std::move(key), std::move(score)).first->second;
}

double Objective::Compatibility(std::span<const OutfitMembers> outfits) const {
  double c = 0.0;
  for (const auto& o : outfits) c += Lookup(o).compat;
  return c;
}

std::vector<double> Objective::StyleCoverage(
    std::span<const OutfitMembers> outfits) const {
  std::vector<double> uncovered(num_styles_, 1.0);
  for (const auto& o : outfits) {
    const auto& theta = Lookup(o).theta;
    for (int i = 0; i < num_styles_; ++i) uncovered[i] *= 1.0 - theta[i];
  }
  for (double& u : uncovered) u = 1.0 - u;
  return uncovered;
}

double Objective::Coverage(std::span<const OutfitMembers> outfits) const {
  double v = 0.0;
  for (double x : StyleCoverage(outfits)) v += x;
  return v;
}

double Objective::PersonalizedCoverage(
    std::span<const OutfitMembers> outfits) const {
  if (!personalized()) Fail("personalized coverage requires style weights");
  const auto cov = StyleCoverage(outfits);
  double v = 0.0;
  for (int i = 0; i < num_styles_; ++i) v += (*options_.weights)[i] * cov[i];
  return v;
}

double Objective::Value(std::span<const OutfitMembers> outfits) const {
  const double v = personalized() ? PersonalizedCoverage(outfits)
                                  : Coverage(outfits);
  return Compatibility(outfits) + options_.cv_weight * v;
}

CoverageState::CoverageState(const Objective& objective)
    : objective_(objective), uncovered_(objective.num_styles(), 1.0) {}

void CoverageState::Add(const OutfitScore& score) {
  compat_ += score.compat;
  for (std::size_t i = 0; i < uncovered_.size(); ++i) {
    uncovered_[i] *= 1.0 - score.theta[i];
  }
}

void CoverageState::AddBlock(double compat_sum,
                             std::span<const double> uncovered_product) {
  compat_ += compat_sum;
  for (std::size_t i = 0; i < uncovered_.size(); ++i) {
    uncovered_[i] *= uncovered_product[i];
  }
}

double CoverageState::Gain(double compat_sum,
                           std::span<const double> uncovered_product) const {
  double v = 0.0;
  for (std::size_t i = 0; i < uncovered_.size(); ++i) {
    v += objective_.style_weight(static_cast<int>(i)) * uncovered_[i] *
         (1.0 - uncovered_product[i]);
  }
  return compat_sum + objective_.cv_weight() * v;
}

double CoverageState::value() const {
  double v = 0.0;
  for (std::size_t i = 0; i < uncovered_.size(); ++i) {
    v += objective_.style_weight(static_cast<int>(i)) * (1.0 - uncovered_[i]);
  }
  return compat_ + objective_.cv_weight() * v;
}

std::vector<double> LoadWeights(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail("cannot read weights file " + path.string());
  try {
    nlohmann::json j;
    in >> j;
    if (j.is_object()) return j.at("weights").get<std::vector<double>>();
    return j.get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    Fail("malformed weights file " + path.string() + ": " + e.what());
  }
}

}  // namespace wardrobe
