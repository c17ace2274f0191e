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

#include "wardrobe/catalog.h"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "wardrobe/error.h"

namespace wardrobe {
namespace {

constexpr char kModule[] = "catalog";

[[noreturn]] void Fail(const std::string& message) {
  throw ValidationError(kModule, message);
}

// Recursively walks the non-empty layers, appending one member per layer.
void Enumerate(const std::vector<std::span<const GarmentIndex>>& layers,
               std::size_t depth, std::vector<GarmentIndex>& prefix,
               std::vector<std::vector<GarmentIndex>>& out) {
  if (depth == layers.size()) {
    out.push_back(prefix);
    return;
  }
  for (GarmentIndex g : layers[depth]) {
    prefix.push_back(g);
    Enumerate(layers, depth + 1, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::string LayerName(int layer) {
  if (layer >= 0 && layer < static_cast<int>(std::size(kLayerNames))) {
    return std::string(kLayerNames[layer]);
  }
  return "layer" + std::to_string(layer);
}

std::optional<int> ParseLayer(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kLayerNames); ++i) {
    if (name == kLayerNames[i]) return static_cast<int>(i);
  }
  if (name.starts_with("layer")) name.remove_prefix(5);
  int value = 0;
  auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(),
                                   value);
  if (ec != std::errc() || ptr != name.data() + name.size() || value < 0) {
    return std::nullopt;
  }
  return value;
}

AttributeVocab::AttributeVocab(std::vector<std::string> names)
    : names_(std::move(names)) {
  index_.reserve(names_.size());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!index_.emplace(names_[i], static_cast<AttributeId>(i)).second) {
      Fail("duplicate attribute name \"" + names_[i] + "\" in vocabulary");
    }
  }
}

std::optional<AttributeId> AttributeVocab::Find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

AttributeBag AttributeVocab::Intern(std::span<const std::string> names) const {
  AttributeBag bag;
  bag.reserve(names.size());
  for (const std::string& n : names) {
    auto id = Find(n);
    if (!id) Fail("unknown attribute \"" + n + "\"");
    bag.push_back(*id);
  }
  std::sort(bag.begin(), bag.end());
  return bag;
}

Catalog::Catalog(AttributeVocab vocab, int num_layers,
                 std::vector<Garment> garments)
    : vocab_(std::move(vocab)),
      num_layers_(num_layers),
      garments_(std::move(garments)),
      layers_(num_layers < 0 ? 0 : num_layers) {
  if (num_layers <= 0) Fail("catalog must declare at least one layer");
  for (std::size_t i = 0; i < garments_.size(); ++i) {
    Garment& g = garments_[i];
    if (g.id.empty()) Fail("garment with empty id");
    if (g.layer < 0 || g.layer >= num_layers_) {
      Fail("garment \"" + g.id + "\" references layer " +
           std::to_string(g.layer) + " but the catalog has " +
           std::to_string(num_layers_) + " layers");
    }
    if (g.attributes.empty()) {
      Fail("garment \"" + g.id + "\" has no attributes");
    }
    std::sort(g.attributes.begin(), g.attributes.end());
    if (g.attributes.back() >= vocab_.size()) {
      Fail("garment \"" + g.id + "\" has an attribute outside the vocabulary");
    }
    if (!by_id_.emplace(g.id, static_cast<GarmentIndex>(i)).second) {
      Fail("duplicate garment id \"" + g.id + "\"");
    }
    layers_[g.layer].push_back(static_cast<GarmentIndex>(i));
  }
  for (auto& layer : layers_) {
    std::sort(layer.begin(), layer.end(), [&](GarmentIndex a, GarmentIndex b) {
      return garments_[a].id < garments_[b].id;
    });
  }
}

std::optional<GarmentIndex> Catalog::Find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

GarmentIndex Catalog::Require(std::string_view id) const {
  auto g = Find(id);
  if (!g) Fail("unknown garment id \"" + std::string(id) + "\"");
  return *g;
}

Catalog ParseCatalog(const nlohmann::json& j) {
  try {
    AttributeVocab vocab(j.at("vocab").get<std::vector<std::string>>());
    const int layers = j.at("layers").get<int>();
    std::vector<Garment> garments;
    for (const auto& jg : j.at("garments")) {
      Garment g;
      g.id = jg.at("id").get<std::string>();
      const auto& jl = jg.at("layer");
      if (jl.is_string()) {
        const auto layer = ParseLayer(jl.get<std::string>());
        if (!layer) Fail("garment \"" + g.id + "\" has an unknown layer name");
        g.layer = *layer;
      } else {
        g.layer = jl.get<int>();
      }
      g.attributes =
          vocab.Intern(jg.at("attributes").get<std::vector<std::string>>());
      if (jg.contains("meta")) {
        g.meta = jg.at("meta").get<std::map<std::string, std::string>>();
      }
      garments.push_back(std::move(g));
    }
    return Catalog(std::move(vocab), layers, std::move(garments));
  } catch (const nlohmann::json::exception& e) {
    Fail(std::string("malformed catalog: ") + e.what());
  }
}

Catalog LoadCatalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail("cannot read catalog file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    Fail("cannot parse catalog file " + path.string() + ": " + e.what());
  }
  return ParseCatalog(j);
}

nlohmann::json CatalogToJson(const Catalog& catalog) {
  nlohmann::json garments = nlohmann::json::array();
  for (const Garment& g : catalog.garments()) {
    std::vector<std::string> attrs;
    for (AttributeId a : g.attributes) attrs.push_back(catalog.vocab().name(a));
    nlohmann::json jg = {{"id", g.id}, {"layer", g.layer}, {"attributes", attrs}};
    if (!g.meta.empty()) jg["meta"] = g.meta;
    garments.push_back(std::move(jg));
  }
  return {{"vocab", catalog.vocab().names()},
          {"layers", catalog.num_layers()},
          {"garments", std::move(garments)}};
}

AttributeBag OutfitDocument(const Catalog& catalog,
                            std::span<const GarmentIndex> members) {
  AttributeBag doc;
  for (GarmentIndex g : members) {
    const auto& attrs = catalog.garment(g).attributes;
    doc.insert(doc.end(), attrs.begin(), attrs.end());
  }
  std::sort(doc.begin(), doc.end());
  return doc;
}

Outfit BuildOutfit(const Catalog& catalog,
                   std::span<const GarmentIndex> garments) {
  Outfit outfit;
  outfit.members.assign(garments.begin(), garments.end());
  std::sort(outfit.members.begin(), outfit.members.end(),
            [&](GarmentIndex a, GarmentIndex b) {
              return catalog.garment(a).layer < catalog.garment(b).layer;
            });
  for (std::size_t i = 1; i < outfit.members.size(); ++i) {
    const Garment& a = catalog.garment(outfit.members[i - 1]);
    const Garment& b = catalog.garment(outfit.members[i]);
    if (a.layer == b.layer) {
      Fail("garments \"" + a.id + "\" and \"" + b.id + "\" share layer " +
           LayerName(a.layer));
    }
  }
  outfit.document = OutfitDocument(catalog, outfit.members);
  return outfit;
}

std::size_t Capsule::num_pieces() const {
  std::size_t n = 0;
  for (const auto& s : selections_) n += s.size();
  return n;
}

std::size_t Capsule::num_outfits() const {
  std::size_t n = 1;
  bool any = false;
  for (const auto& s : selections_) {
    if (s.empty()) continue;
    n *= s.size();
    any = true;
  }
  return any ? n : 0;
}

bool Capsule::Contains(GarmentIndex g) const {
  for (const auto& s : selections_) {
    if (std::find(s.begin(), s.end(), g) != s.end()) return true;
  }
  return false;
}

void Capsule::Add(const Catalog& catalog, GarmentIndex g) {
  const Garment& garment = catalog.garment(g);
  if (garment.layer >= num_layers()) {
    Fail("garment \"" + garment.id + "\" lies outside the capsule's layers");
  }
  auto& sel = selections_[garment.layer];
  if (std::find(sel.begin(), sel.end(), g) != sel.end()) {
    Fail("garment \"" + garment.id + "\" is already selected");
  }
  sel.push_back(g);
}

void Capsule::Validate(const Catalog& catalog) const {
  if (num_layers() != catalog.num_layers()) {
    Fail("capsule has " + std::to_string(num_layers()) +
         " layers but the catalog has " + std::to_string(catalog.num_layers()));
  }
  for (int i = 0; i < num_layers(); ++i) {
    std::vector<GarmentIndex> seen(selections_[i]);
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
      Fail("duplicate selection in layer " + LayerName(i));
    }
    for (GarmentIndex g : seen) {
      if (g >= catalog.size() || catalog.garment(g).layer != i) {
        Fail("selection in layer " + LayerName(i) +
             " is not a garment of that layer");
      }
    }
  }
}

std::vector<std::vector<GarmentIndex>> CapsuleOutfitMembers(
    const Capsule& capsule) {
  std::vector<std::span<const GarmentIndex>> layers;
  for (int i = 0; i < capsule.num_layers(); ++i) {
    if (capsule.count(i) > 0) layers.push_back(capsule.selection(i));
  }
  std::vector<std::vector<GarmentIndex>> out;
  if (layers.empty()) return out;
  std::vector<GarmentIndex> prefix;
  Enumerate(layers, 0, prefix, out);
  return out;
}

std::vector<Outfit> CapsuleOutfits(const Capsule& capsule,
                                   const Catalog& catalog) {
  std::vector<Outfit> outfits;
  for (auto& members : CapsuleOutfitMembers(capsule)) {
    AttributeBag doc = OutfitDocument(catalog, members);
    outfits.push_back({std::move(members), std::move(doc)});
  }
  return outfits;
}

std::vector<std::vector<GarmentIndex>> IncrementalOutfitMembers(
    const Capsule& capsule, GarmentIndex g, const Catalog& catalog) {
  const int layer = catalog.garment(g).layer;
  if (layer >= capsule.num_layers()) {
    Fail("garment \"" + catalog.garment(g).id +
         "\" lies outside the capsule's layers");
  }
  auto sel = capsule.selection(layer);
  if (std::find(sel.begin(), sel.end(), g) != sel.end()) {
    Fail("garment \"" + catalog.garment(g).id + "\" is already selected");
  }
  const GarmentIndex single[] = {g};
  std::vector<std::span<const GarmentIndex>> layers;
  for (int i = 0; i < capsule.num_layers(); ++i) {
    if (i == layer) {
      layers.emplace_back(single);
    } else if (capsule.count(i) > 0) {
      layers.push_back(capsule.selection(i));
    }
  }
  std::vector<std::vector<GarmentIndex>> out;
  std::vector<GarmentIndex> prefix;
  Enumerate(layers, 0, prefix, out);
  return out;
}

std::vector<Outfit> IncrementalOutfits(const Capsule& capsule, GarmentIndex g,
                                       const Catalog& catalog) {
  std::vector<Outfit> outfits;
  for (auto& members : IncrementalOutfitMembers(capsule, g, catalog)) {
    AttributeBag doc = OutfitDocument(catalog, members);
    outfits.push_back({std::move(members), std::move(doc)});
  }
  return outfits;
}

nlohmann::json CapsuleToJson(const Capsule& capsule, const Catalog& catalog) {
  nlohmann::json layers = nlohmann::json::array();
  for (int i = 0; i < capsule.num_layers(); ++i) {
    std::vector<std::string> ids;
    for (GarmentIndex g : capsule.selection(i)) {
      ids.push_back(catalog.garment(g).id);
    }
    layers.push_back({{"layer", LayerName(i)}, {"index", i}, {"garments", ids}});
  }
  return {{"layers", std::move(layers)},
          {"num_pieces", capsule.num_pieces()},
          {"num_outfits", capsule.num_outfits()}};
}

Capsule CapsuleFromJson(const nlohmann::json& j, const Catalog& catalog) {
  Capsule capsule(catalog.num_layers());
  try {
    for (const auto& jl : j.at("layers")) {
      for (const auto& id : jl.at("garments")) {
        capsule.Add(catalog, catalog.Require(id.get<std::string>()));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(std::string("malformed capsule: ") + e.what());
  }
  return capsule;
}

}  // namespace wardrobe
