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

#include "wardrobe/baselines.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wardrobe/error.h"
#include "wardrobe/seeds.h"

namespace wardrobe {
namespace {

constexpr char kModule[] = "baselines";

[[noreturn]] void Fail(const std::string& message) {
  throw ValidationError(kModule, message);
}

void CheckCounts(const Catalog& catalog, std::span<const int> counts) {
  if (static_cast<int>(counts.size()) != catalog.num_layers()) {
    Fail("expected " + std::to_string(catalog.num_layers()) +
         " per-layer counts, got " + std::to_string(counts.size()));
  }
  for (int i = 0; i < catalog.num_layers(); ++i) {
    if (counts[i] < 0 ||
        static_cast<std::size_t>(counts[i]) > catalog.layer_size(i)) {
      Fail("invalid count " + std::to_string(counts[i]) + " for layer " +
           LayerName(i));
    }
    if (counts[i] > 0 && catalog.layer_size(i) == 0) {
      Fail("layer " + LayerName(i) + " is empty");
    }
  }
}

}  // namespace

FeatureTable::FeatureTable(std::vector<Eigen::VectorXd> rows, Metric metric)
    : rows_(std::move(rows)), metric_(metric) {
  if (!rows_.empty()) dimension_ = static_cast<int>(rows_.front().size());
  for (const auto& r : rows_) {
    if (r.size() != dimension_) Fail("feature rows differ in dimension");
  }
}

FeatureTable FeatureTable::FromCatalog(const Catalog& catalog) {
  const int dim = static_cast<int>(catalog.vocab().size());
  std::vector<Eigen::VectorXd> rows;
  rows.reserve(catalog.size());
  for (const Garment& g : catalog.garments()) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    for (AttributeId a : g.attributes) v[a] += 1.0;
    const double norm = v.norm();
    if (norm > 0) v /= norm;
    rows.push_back(std::move(v));
  }
  return FeatureTable(std::move(rows), Metric::kEuclidean);
}

double FeatureTable::Distance(const Eigen::VectorXd& a,
                              const Eigen::VectorXd& b) const {
  if (metric_ == Metric::kEuclidean) return (a - b).norm();
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0 || nb == 0) return 1.0;
  return std::max(0.0, 1.0 - a.dot(b) / (na * nb));
}

double FeatureTable::Distance(GarmentIndex a, GarmentIndex b) const {
  return Distance(row(a), row(b));
}

std::vector<double> PieceRelevance(const Catalog& catalog,
                                   const StyleModel& model,
                                   const InferenceConfig& inference,
                                   std::uint64_t seed) {
  std::vector<double> rel(catalog.size(), 0.0);
  for (int i = 0; i < catalog.num_layers(); ++i) {
    auto layer = catalog.layer(i);
    if (layer.empty()) continue;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (GarmentIndex g : layer) {
      const Garment& garment = catalog.garment(g);
      rel[g] = LogLikelihood(model, garment.attributes, inference,
                             DeriveSeed(seed, "relevance", garment.id));
      lo = std::min(lo, rel[g]);
      hi = std::max(hi, rel[g]);
    }
    for (GarmentIndex g : layer) {
      rel[g] = hi > lo ? (rel[g] - lo) / (hi - lo) : 1.0;
    }
  }
  return rel;
}

Capsule MmrSelect(const Catalog& catalog, const FeatureTable& features,
                  std::span<const double> relevance, double lambda,
                  std::span<const int> counts) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) Fail("lambda must lie in [0, 1]");
  CheckCounts(catalog, counts);
  if (features.size() != catalog.size() || relevance.size() != catalog.size()) {
    Fail("feature table or relevance does not cover the catalog");
  }
  Capsule capsule(catalog.num_layers());
  for (int i = 0; i < catalog.num_layers(); ++i) {
    auto layer = catalog.layer(i);
    const std::size_t n = layer.size();
    std::vector<double> div(n, 0.0);
    for (std::size_t a = 0; a < n && n > 1; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (a != b) div[a] += features.Distance(layer[a], layer[b]);
      }
      div[a] /= 2.0 * static_cast<double>(n - 1);
    }
    std::vector<char> taken(n, 0);
    for (int t = 0; t < counts[i]; ++t) {
      std::size_t best = n;
      double best_score = 0.0;
      for (std::size_t a = 0; a < n; ++a) {
        if (taken[a]) continue;
        const double score =
            lambda * relevance[layer[a]] + (1.0 - lambda) * div[a];
        if (best == n || score > best_score) {
          best = a;
          best_score = score;
        }
      }
      taken[best] = 1;
      capsule.Add(catalog, layer[best]);
      for (std::size_t a = 0; a < n; ++a) {
        const double d = features.Distance(layer[a], layer[best]) / 2.0;
        div[a] = t == 0 ? d : std::min(div[a], d);
      }
    }
  }
  return capsule;
}

PamResult Pam(const Eigen::MatrixXd& distances, int k) {
  const std::size_t n = static_cast<std::size_t>(distances.rows());
  if (distances.cols() != distances.rows()) Fail("distance matrix not square");
  if (k < 0 || static_cast<std::size_t>(k) > n) {
    Fail("k = " + std::to_string(k) + " exceeds " + std::to_string(n) +
         " points");
  }
  PamResult result;
  if (k == 0) return result;

  // Distinct points: a point duplicates an earlier one at distance 0.
  std::size_t distinct = 0;
  for (std::size_t a = 0; a < n; ++a) {
    bool dup = false;
    for (std::size_t b = 0; b < a && !dup; ++b) dup = distances(a, b) == 0.0;
    if (!dup) ++distinct;
  }
  result.degenerate = distinct < static_cast<std::size_t>(k);

  std::vector<char> is_medoid(n, 0);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  auto total = [&] {
    double s = 0.0;
    for (double d : nearest) s += d;
    return s;
  };

  // BUILD: add the point that lowers the total cost the most.
  for (int step = 0; step < k; ++step) {
    std::size_t best = n;
    double best_cost = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      if (is_medoid[c]) continue;
      double cost = 0.0;
      for (std::size_t p = 0; p < n; ++p) {
        cost += std::min(nearest[p], distances(p, c));
      }
      if (best == n || cost < best_cost) {
        best = c;
        best_cost = cost;
      }
    }
    is_medoid[best] = 1;
    result.medoids.push_back(best);
    for (std::size_t p = 0; p < n; ++p) {
      nearest[p] = std::min(nearest[p], distances(p, best));
    }
  }
  result.cost_history.push_back(total());

  auto cost_with = [&](const std::vector<std::size_t>& medoids) {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      double d = std::numeric_limits<double>::infinity();
      for (std::size_t m : medoids) d = std::min(d, distances(p, m));
      s += d;
    }
    return s;
  };

  // SWAP: apply the best improving (medoid, non-medoid) exchange.
  double current = result.cost_history.back();
  for (;;) {
    double best_cost = current;
    std::size_t best_slot = 0;
    std::size_t best_point = n;
    for (std::size_t slot = 0; slot < result.medoids.size(); ++slot) {
      for (std::size_t c = 0; c < n; ++c) {
        if (is_medoid[c]) continue;
        std::vector<std::size_t> trial = result.medoids;
        trial[slot] = c;
        const double cost = cost_with(trial);
        if (cost < best_cost - 1e-12 * std::max(1.0, std::abs(current))) {
          best_cost = cost;
          best_slot = slot;
          best_point = c;
        }
      }
    }
    if (best_point == n) break;
    is_medoid[result.medoids[best_slot]] = 0;
    is_medoid[best_point] = 1;
    result.medoids[best_slot] = best_point;
    current = best_cost;
    result.cost_history.push_back(current);
  }
  std::sort(result.medoids.begin(), result.medoids.end());
  return result;
}

ClusterResult ClusterCenters(const Catalog& catalog,
                             const FeatureTable& features,
                             std::span<const int> counts) {
  CheckCounts(catalog, counts);
  if (features.size() != catalog.size()) {
    Fail("feature table does not cover the catalog");
  }
  ClusterResult result{Capsule(catalog.num_layers()), {}, {}};
  result.cost_history.resize(catalog.num_layers());
  for (int i = 0; i < catalog.num_layers(); ++i) {
    if (counts[i] == 0) continue;
    auto layer = catalog.layer(i);
    const Eigen::Index n = static_cast<Eigen::Index>(layer.size());
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) {
        d(a, b) = a == b ? 0.0 : features.Distance(layer[a], layer[b]);
      }
    }
    PamResult pam = Pam(d, counts[i]);
    if (pam.degenerate) result.degenerate_layers.push_back(i);
    for (std::size_t m : pam.medoids) result.capsule.Add(catalog, layer[m]);
    result.cost_history[i] = std::move(pam.cost_history);
  }
  return result;
}

}  // namespace wardrobe
