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

#include "wardrobe/synth.h"

#include <algorithm>
#include <random>
#include <set>
#include <string>

#include "numeric.h"
#include "wardrobe/error.h"
#include "wardrobe/seeds.h"

namespace wardrobe {
namespace {

constexpr char kModule[] = "synth";

[[noreturn]] void Fail(const std::string& message) {
  throw ValidationError(kModule, message);
}

using Eigen::MatrixXd;
using Eigen::VectorXd;

class EtaSampler {
 public:
  explicit EtaSampler(const StyleModel& model)
      : mu_(model.mu()), chol_(model.sigma().llt().matrixL()) {}

  template <typename Rng>
  VectorXd Draw(Rng& rng) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    VectorXd z(mu_.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = normal(rng);
    return mu_ + chol_ * z;
  }

 private:
  VectorXd mu_;
  MatrixXd chol_;
};

std::string GroupLabel(int group) { return "g" + std::to_string(group); }

std::string AttributeName(int layer, int a) {
  std::string n = std::to_string(a);
  if (n.size() < 2) n.insert(0, "0");
  return LayerName(layer) + "_" + n;
}

}  // namespace

StyleModel PlantedModel(int num_topics, int vocab_size, double block_mass,
                        int topics_per_group, double correlation,
                        double scale) {
  if (num_topics < 1 || vocab_size < num_topics) {
    Fail("need at least one attribute per topic");
  }
  if (topics_per_group < 1) Fail("topics_per_group must be positive");
  MatrixXd phi =
      MatrixXd::Constant(num_topics, vocab_size, (1.0 - block_mass) / vocab_size);
  const int block = vocab_size / num_topics;
  for (int k = 0; k < num_topics; ++k) {
    for (int a = k * block; a < (k + 1) * block; ++a) {
      phi(k, a) += block_mass / block;
    }
  }
  MatrixXd sigma = MatrixXd::Zero(num_topics, num_topics);
  for (int a = 0; a < num_topics; ++a) {
    for (int b = 0; b < num_topics; ++b) {
      if (a == b) {
        sigma(a, b) = scale * scale;
      } else if (a / topics_per_group == b / topics_per_group) {
        sigma(a, b) = correlation * scale * scale;
      }
    }
  }
  return StyleModel::Ctm(std::move(phi), VectorXd::Zero(num_topics),
                         std::move(sigma), 0.01);
}

std::vector<AttributeBag> SampleDocuments(const StyleModel& model, int count,
                                          int length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  EtaSampler eta(model);
  const MatrixXd& phi = model.phi();
  std::vector<AttributeBag> docs;
  docs.reserve(count);
  for (int d = 0; d < count; ++d) {
    const VectorXd theta = internal::Softmax(eta.Draw(rng));
    const VectorXd mix = phi.transpose() * theta;
    AttributeBag doc;
    for (int n = 0; n < length; ++n) {
      doc.push_back(static_cast<AttributeId>(internal::SampleDiscrete(
          std::span<const double>(mix.data(), mix.size()), rng)));
    }
    std::sort(doc.begin(), doc.end());
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<std::vector<GarmentIndex>> RandomOutfits(const Catalog& catalog,
                                                     int count,
                                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<GarmentIndex>> outfits;
  for (int n = 0; n < count; ++n) {
    std::vector<GarmentIndex> members;
    for (int i = 0; i < catalog.num_layers(); ++i) {
      auto layer = catalog.layer(i);
      if (layer.empty()) continue;
      std::uniform_int_distribution<std::size_t> pick(0, layer.size() - 1);
      members.push_back(layer[pick(rng)]);
    }
    outfits.push_back(std::move(members));
  }
  return outfits;
}

double MedianLogLikelihood(const StyleModel& model, const Catalog& catalog,
                           const std::vector<std::vector<GarmentIndex>>& outfits,
                           const InferenceConfig& inference,
                           std::uint64_t seed) {
  if (outfits.empty()) Fail("no outfits to calibrate on");
  std::vector<double> ll;
  for (std::size_t n = 0; n < outfits.size(); ++n) {
    ll.push_back(LogLikelihood(model, OutfitDocument(catalog, outfits[n]),
                               inference,
                               DeriveSeed(seed, kModule, std::to_string(n))));
  }
  std::sort(ll.begin(), ll.end());
  const std::size_t mid = ll.size() / 2;
  return ll.size() % 2 == 1 ? ll[mid] : 0.5 * (ll[mid - 1] + ll[mid]);
}

SynthData Synthesize(const SynthConfig& c) {
  if (c.num_layers < 1 || c.num_layers > static_cast<int>(std::size(kLayerNames))) {
    Fail("num_layers must be between 1 and " +
         std::to_string(std::size(kLayerNames)));
  }
  const int num_topics = c.num_groups * c.topics_per_group;
  if (c.num_groups < 1 || c.topics_per_group < 1) Fail("empty topic layout");
  if (c.attributes_per_layer < num_topics) {
    Fail("attributes_per_layer must be at least the number of topics");
  }
  if (c.attributes_per_garment < 1 ||
      c.attributes_per_garment > c.attributes_per_layer) {
    Fail("attributes_per_garment out of range");
  }
  if (c.garments_per_layer < c.num_groups) {
    Fail("every layer needs at least one garment per group");
  }

  // Topics are planted per layer slice so that each layer's attributes carry
  // every style.
  const int slice = c.attributes_per_layer;
  const int vocab_size = c.num_layers * slice;
  const StyleModel per_slice = PlantedModel(num_topics, slice, c.block_mass,
                                            c.topics_per_group, c.correlation,
                                            c.topic_scale);
  MatrixXd phi(num_topics, vocab_size);
  for (int i = 0; i < c.num_layers; ++i) {
    phi.middleCols(i * slice, slice) = per_slice.phi() / c.num_layers;
  }

  SynthData data;
  data.model = StyleModel::Ctm(phi, per_slice.mu(), per_slice.sigma(), 0.01);
  std::vector<std::string> names;
  for (int i = 0; i < c.num_layers; ++i) {
    for (int a = 0; a < slice; ++a) names.push_back(AttributeName(i, a));
  }
  data.model.set_vocab(names);

  std::mt19937_64 rng(DeriveSeed(c.seed, kModule, "garments"));
  const EtaSampler eta(data.model);
  auto group_of = [&](const VectorXd& e) {
    Eigen::Index top = 0;
    e.maxCoeff(&top);
    return static_cast<int>(top) / c.topics_per_group;
  };
  auto draw_theta = [&](int group) {
    for (;;) {
      const VectorXd e = eta.Draw(rng);
      if (group_of(e) == group) return internal::Softmax(e);
    }
  };

  std::vector<Garment> garments;
  for (int i = 0; i < c.num_layers; ++i) {
    for (int n = 0; n < c.garments_per_layer; ++n) {
      const int group = n % c.num_groups;
      const VectorXd theta = draw_theta(group);
      const VectorXd mix =
          per_slice.phi().transpose() * theta;  // within-layer distribution
      std::set<int> picked;
      while (static_cast<int>(picked.size()) < c.attributes_per_garment) {
        picked.insert(internal::SampleDiscrete(
            std::span<const double>(mix.data(), mix.size()), rng));
      }
      Garment g;
      std::string num = std::to_string(n);
      if (num.size() < 3) num.insert(0, 3 - num.size(), '0');
      g.id = LayerName(i) + "-" + num;
      g.layer = i;
      for (int a : picked) {
        g.attributes.push_back(static_cast<AttributeId>(i * slice + a));
      }
      g.meta["style"] = GroupLabel(group);
      garments.push_back(std::move(g));
      data.garment_groups.push_back(group);
    }
  }
  data.catalog = Catalog(AttributeVocab(names), c.num_layers, garments);
  // Catalog keeps input order, so garment_groups stays aligned.

  // Corpus documents follow the CTM generative story with one garment-sized
  // draw per layer.
  std::mt19937_64 corpus_rng(DeriveSeed(c.seed, kModule, "corpus"));
  for (int d = 0; d < c.corpus_size; ++d) {
    const VectorXd theta = internal::Softmax(eta.Draw(corpus_rng));
    const VectorXd mix = per_slice.phi().transpose() * theta;
    AttributeBag doc;
    for (int i = 0; i < c.num_layers; ++i) {
      for (int n = 0; n < c.attributes_per_garment; ++n) {
        const int a = internal::SampleDiscrete(
            std::span<const double>(mix.data(), mix.size()), corpus_rng);
        doc.push_back(static_cast<AttributeId>(i * slice + a));
      }
    }
    std::sort(doc.begin(), doc.end());
    data.corpus.push_back(std::move(doc));
  }

  // Same-group outfits assembled from catalog garments.
  std::mt19937_64 outfit_rng(DeriveSeed(c.seed, kModule, "outfits"));
  auto same_group_outfit = [&](int group) {
    std::vector<GarmentIndex> members;
    for (int i = 0; i < c.num_layers; ++i) {
      std::vector<GarmentIndex> pool;
      for (GarmentIndex g : data.catalog.layer(i)) {
        if (data.garment_groups[g] == group) pool.push_back(g);
      }
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      members.push_back(pool[pick(outfit_rng)]);
    }
    return members;
  };
  std::set<std::vector<GarmentIndex>> seen;
  for (int n = 0, attempts = 0;
       n < c.num_labeled && attempts < 100 * c.num_labeled; ++attempts) {
    const int group = n % c.num_groups;
    auto members = same_group_outfit(group);
    if (!seen.insert(members).second) continue;
    data.labeled.push_back({std::move(members), {{"style", GroupLabel(group)}}});
    ++n;
  }
  for (int n = 0; n < c.num_gold; ++n) {
    data.gold.push_back(same_group_outfit(n % c.num_groups));
  }
  for (int n = 0; n < c.num_user; ++n) {
    data.user.push_back(same_group_outfit(c.user_group % c.num_groups));
  }
  for (int a = 0; a < c.num_groups; ++a) {
    for (int b = a + 1; b < c.num_groups; ++b) {
      data.exclusive_pairs.emplace_back("style=" + GroupLabel(a),
                                        "style=" + GroupLabel(b));
    }
  }

  if (c.calibration_outfits > 0) {
    data.threshold = MedianLogLikelihood(
        data.model, data.catalog,
        RandomOutfits(data.catalog, c.calibration_outfits,
                      DeriveSeed(c.seed, kModule, "calibration-outfits")),
        InferenceConfig{}, DeriveSeed(c.seed, kModule, "calibration"));
  }
  return data;
}

}  // namespace wardrobe
