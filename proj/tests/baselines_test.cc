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
#include <cstdio>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "wardrobe/error.h"
#include "wardrobe/synth.h"

namespace wardrobe {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Catalog OneLayer(int n) {
  std::vector<Garment> garments;
  for (int j = 0; j < n; ++j) {
    char id[32];
    std::snprintf(id, sizeof(id), "g-%02d", j);
    garments.push_back({id, 0, {0}, {}});
  }
  return Catalog(AttributeVocab({"a"}), 1, std::move(garments));
}

VectorXd Unit(double degrees) {
  const double r = degrees * std::acos(-1.0) / 180.0;
  return VectorXd{{std::cos(r), std::sin(r)}};
}

std::vector<GarmentIndex> Sorted(std::span<const GarmentIndex> s) {
  std::vector<GarmentIndex> v(s.begin(), s.end());
  std::sort(v.begin(), v.end());
  return v;
}

class MmrTest : public ::testing::Test {
 protected:
  // Four unit vectors at 0, 10, 90 and 180 degrees.
  MmrTest()
      : catalog_(OneLayer(4)),
        features_({Unit(0), Unit(10), Unit(90), Unit(180)}) {}

  GarmentIndex At(int j) const { return catalog_.layer(0)[j]; }

  Catalog catalog_;
  FeatureTable features_;
};

TEST_F(MmrTest, PureDiversityIsFarthestPoint) {
  const std::vector<double> relevance(4, 0.5);
  const std::vector<int> counts = {3};
  // Mean distances favor 180 degrees first; 0 is farthest from it; then 90
  // is the piece farthest from both.
  const Capsule c = MmrSelect(catalog_, features_, relevance, 0.0, counts);
  EXPECT_EQ(Sorted(c.selection(0)),
            Sorted(std::vector<GarmentIndex>{At(3), At(0), At(2)}));
  const std::vector<int> one = {1};
  EXPECT_EQ(MmrSelect(catalog_, features_, relevance, 0.0, one).selection(0)[0],
            At(3));
}

TEST_F(MmrTest, PureRelevanceIsTopK) {
  std::vector<double> relevance(4);
  relevance[At(0)] = 0.2;
  relevance[At(1)] = 1.0;
  relevance[At(2)] = 0.0;
  relevance[At(3)] = 0.7;
  const std::vector<int> counts = {2};
  const Capsule c = MmrSelect(catalog_, features_, relevance, 1.0, counts);
  EXPECT_EQ(Sorted(c.selection(0)),
            Sorted(std::vector<GarmentIndex>{At(1), At(3)}));
}

TEST_F(MmrTest, TiesGoToSmallestId) {
  const FeatureTable same({Unit(0), Unit(0), Unit(0), Unit(0)});
  const std::vector<double> relevance(4, 1.0);
  const std::vector<int> counts = {2};
  const Capsule c = MmrSelect(catalog_, same, relevance, 0.5, counts);
  EXPECT_EQ(Sorted(c.selection(0)),
            Sorted(std::vector<GarmentIndex>{At(0), At(1)}));
}

TEST_F(MmrTest, RejectsBadArguments) {
  const std::vector<double> relevance(4, 0.5);
  const std::vector<int> counts = {2};
  EXPECT_THROW(MmrSelect(catalog_, features_, relevance, 1.5, counts),
               ValidationError);
  const std::vector<double> short_relevance(2, 0.5);
  EXPECT_THROW(MmrSelect(catalog_, features_, short_relevance, 0.5, counts),
               ValidationError);
  const std::vector<int> too_many = {5};
  EXPECT_THROW(MmrSelect(catalog_, features_, relevance, 0.5, too_many),
               ValidationError);
}

TEST(FeatureTableTest, DistancesAndValidation) {
  const FeatureTable euclid({Unit(0), Unit(90)});
  EXPECT_NEAR(euclid.Distance(0, 1), std::sqrt(2.0), 1e-15);
  const FeatureTable cosine({Unit(0), Unit(90)}, Metric::kCosine);
  EXPECT_NEAR(cosine.Distance(0, 1), 1.0, 1e-15);
  EXPECT_THROW(FeatureTable({VectorXd::Zero(2), VectorXd::Zero(3)}),
               ValidationError);
}

TEST(FeatureTableTest, CatalogRowsAreUnitCountVectors) {
  const Catalog catalog(
      AttributeVocab({"x", "y", "z"}), 1,
      {{"a", 0, {0, 0, 1}, {}}, {"b", 0, {2}, {}}});
  const FeatureTable features = FeatureTable::FromCatalog(catalog);
  const VectorXd expected = VectorXd{{2.0, 1.0, 0.0}} / std::sqrt(5.0);
  EXPECT_TRUE(features.row(*catalog.Find("a")).isApprox(expected, 1e-15));
  EXPECT_NEAR(features.row(*catalog.Find("b")).norm(), 1.0, 1e-15);
}

TEST(PieceRelevanceTest, RescaledPerLayer) {
  SynthConfig config;
  config.garments_per_layer = 5;
  config.corpus_size = 10;
  config.num_labeled = 3;
  config.num_gold = 2;
  config.num_user = 2;
  config.calibration_outfits = 10;
  const SynthData data = Synthesize(config);
  const std::vector<double> rel =
      PieceRelevance(data.catalog, data.model, {}, 1);
  ASSERT_EQ(rel.size(), data.catalog.size());
  for (int layer = 0; layer < data.catalog.num_layers(); ++layer) {
    double lo = 1.0, hi = 0.0;
    for (GarmentIndex g : data.catalog.layer(layer)) {
      lo = std::min(lo, rel[g]);
      hi = std::max(hi, rel[g]);
    }
    EXPECT_EQ(lo, 0.0);
    EXPECT_EQ(hi, 1.0);
  }
}

// Sum over points of the distance to the nearest medoid.
double Cost(const MatrixXd& d, const std::vector<std::size_t>& medoids) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m : medoids) best = std::min(best, d(i, m));
    total += best;
  }
  return total;
}

MatrixXd DistanceMatrix(const std::vector<VectorXd>& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  MatrixXd d(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) d(a, b) = (points[a] - points[b]).norm();
  }
  return d;
}

std::vector<VectorXd> RandomPoints(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<VectorXd> points;
  for (int i = 0; i < n; ++i) points.push_back(VectorXd{{normal(rng), normal(rng)}});
  return points;
}

TEST(PamTest, TwoClustersGetOneMedoidEach) {
  std::vector<VectorXd> points;
  for (int i = 0; i < 5; ++i) points.push_back(VectorXd{{0.1 * i, 0.0}});
  for (int i = 0; i < 5; ++i) points.push_back(VectorXd{{10.0 + 0.1 * i, 1.0}});
  const PamResult r = Pam(DistanceMatrix(points), 2);
  ASSERT_EQ(r.medoids.size(), 2u);
  std::vector<std::size_t> m = r.medoids;
  std::sort(m.begin(), m.end());
  EXPECT_EQ(m, (std::vector<std::size_t>{2, 7}));
  EXPECT_FALSE(r.degenerate);
}

TEST(PamTest, CostNeverIncreasesAndEndsAtLocalOptimum) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MatrixXd d = DistanceMatrix(RandomPoints(15, seed));
    const PamResult r = Pam(d, 3);
    for (std::size_t i = 1; i < r.cost_history.size(); ++i) {
      EXPECT_LT(r.cost_history[i], r.cost_history[i - 1]);
    }
    const double cost = Cost(d, r.medoids);
    EXPECT_NEAR(cost, r.cost_history.back(), 1e-9);
    for (std::size_t out = 0; out < r.medoids.size(); ++out) {
      for (Eigen::Index in = 0; in < d.rows(); ++in) {
        auto swapped = r.medoids;
        swapped[out] = static_cast<std::size_t>(in);
        EXPECT_GE(Cost(d, swapped), cost - 1e-9);
      }
    }
  }
}

TEST(PamTest, MedoidsFollowPointsUnderPermutation) {
  const auto points = RandomPoints(12, 99);
  std::vector<std::size_t> perm(points.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(4);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<VectorXd> shuffled;
  for (std::size_t p : perm) shuffled.push_back(points[p]);
  auto a = Pam(DistanceMatrix(points), 3).medoids;
  std::vector<std::size_t> b;
  for (std::size_t m : Pam(DistanceMatrix(shuffled), 3).medoids) b.push_back(perm[m]);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
}

TEST(PamTest, FlagsDegenerateInput) {
  const std::vector<VectorXd> points(4, VectorXd{{1.0, 1.0}});
  const PamResult r = Pam(DistanceMatrix(points), 2);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.medoids.size(), 2u);
  EXPECT_THROW(Pam(DistanceMatrix(points), 5), ValidationError);
  EXPECT_TRUE(Pam(DistanceMatrix(points), 0).medoids.empty());
}

TEST(ClusterCentersTest, PicksOneMedoidPerLayerCluster) {
  const Catalog catalog = OneLayer(6);
  std::vector<VectorXd> rows(6);
  for (int j = 0; j < 6; ++j) {
    rows[catalog.layer(0)[j]] = j < 3 ? Unit(j) : Unit(120 + j);
  }
  const FeatureTable features(rows);
  const std::vector<int> counts = {2};
  const ClusterResult r = ClusterCenters(catalog, features, counts);
  const auto picked = Sorted(r.capsule.selection(0));
  EXPECT_EQ(picked, Sorted(std::vector<GarmentIndex>{catalog.layer(0)[1],
                                                     catalog.layer(0)[4]}));
  EXPECT_TRUE(r.degenerate_layers.empty());
  ASSERT_EQ(r.cost_history.size(), 1u);
}

}  // namespace
}  // namespace wardrobe
