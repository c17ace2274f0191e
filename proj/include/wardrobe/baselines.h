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

#ifndef WARDROBE_BASELINES_H_
#define WARDROBE_BASELINES_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wardrobe/catalog.h"
#include "wardrobe/style_model.h"

namespace wardrobe {

enum class Metric { kEuclidean, kCosine };

// Per-garment feature vectors, indexed by GarmentIndex.
class FeatureTable {
 public:
  // Rows must share one dimension; throws ValidationError otherwise.
  FeatureTable(std::vector<Eigen::VectorXd> rows,
               Metric metric = Metric::kEuclidean);

  // L2-normalized attribute count vectors.
  static FeatureTable FromCatalog(const Catalog& catalog);

  std::size_t size() const { return rows_.size(); }
  int dimension() const { return dimension_; }
  Metric metric() const { return metric_; }
  const Eigen::VectorXd& row(GarmentIndex g) const { return rows_.at(g); }

  double Distance(GarmentIndex a, GarmentIndex b) const;
  double Distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

 private:
  std::vector<Eigen::VectorXd> rows_;
  int dimension_ = 0;
  Metric metric_;
};

// Single-piece relevance: the per-token log-likelihood of each garment's own
// bag, rescaled to [0, 1] within its layer. Indexed by GarmentIndex.
std::vector<double> PieceRelevance(const Catalog& catalog,
                                   const StyleModel& model,
                                   const InferenceConfig& inference,
                                   std::uint64_t seed);

// Maximal marginal relevance per layer: picks argmax of
// lambda * Rel(s) + (1 - lambda) * Div(s), where Div is the distance to the
// nearest piece already picked in the layer, halved so that it lies in
// [0, 1] on unit vectors. The first pick uses the mean distance to the rest
// of the layer. Ties go to the smallest id.
Capsule MmrSelect(const Catalog& catalog, const FeatureTable& features,
                  std::span<const double> relevance, double lambda,
                  std::span<const int> counts);

struct PamResult {
  std::vector<std::size_t> medoids;  // positions into the distance matrix
  // Total distance to the nearest medoid after BUILD and after every swap.
  std::vector<double> cost_history;
  bool degenerate = false;  // fewer distinct points than k
};

// k-medoids by PAM (greedy BUILD, then best-improvement SWAP). Ties go to
// the smaller position, so the result is fully deterministic.
PamResult Pam(const Eigen::MatrixXd& distances, int k);

struct ClusterResult {
  Capsule capsule;
  std::vector<int> degenerate_layers;
  std::vector<std::vector<double>> cost_history;  // per layer
};

// One medoid garment per cluster, k = counts[i] in every layer.
ClusterResult ClusterCenters(const Catalog& catalog,
                             const FeatureTable& features,
                             std::span<const int> counts);

}  // namespace wardrobe

#endif  // WARDROBE_BASELINES_H_
