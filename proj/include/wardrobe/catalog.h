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

#ifndef WARDROBE_CATALOG_H_
#define WARDROBE_CATALOG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace wardrobe {

using AttributeId = std::uint32_t;
using GarmentIndex = std::uint32_t;

// Multiset of attribute ids, always kept sorted ascending.
using AttributeBag = std::vector<AttributeId>;

// Canonical layer ordering. Catalogs may declare more layers; those are
// named "layer<i>".
inline constexpr std::string_view kLayerNames[] = {"outer", "upper", "lower",
                                                   "one-piece"};

std::string LayerName(int layer);

// Parses "outer", "upper", ... or a plain integer. Returns nullopt if the
// name is not understood.
std::optional<int> ParseLayer(std::string_view name);

class AttributeVocab {
 public:
  AttributeVocab() = default;
  // Throws ValidationError on duplicate names.
  explicit AttributeVocab(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(AttributeId id) const { return names_.at(id); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<AttributeId> Find(std::string_view name) const;

  // Interns a list of names into a sorted bag; throws ValidationError
  // ("unknown attribute ...") for names outside the vocabulary.
  AttributeBag Intern(std::span<const std::string> names) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, AttributeId> index_;
};

struct Garment {
  std::string id;
  int layer = 0;
  AttributeBag attributes;
  std::map<std::string, std::string> meta;
};

// Validated set of garments partitioned into layers. Immutable once built.
class Catalog {
 public:
  Catalog() = default;
  Catalog(AttributeVocab vocab, int num_layers, std::vector<Garment> garments);

  int num_layers() const { return num_layers_; }
  const AttributeVocab& vocab() const { return vocab_; }
  std::size_t size() const { return garments_.size(); }
  const std::vector<Garment>& garments() const { return garments_; }
  const Garment& garment(GarmentIndex g) const { return garments_.at(g); }

  // Candidates of `layer`, ordered by garment id.
  std::span<const GarmentIndex> layer(int layer) const {
    return layers_.at(layer);
  }
  std::size_t layer_size(int layer) const { return layers_.at(layer).size(); }

  std::optional<GarmentIndex> Find(std::string_view id) const;
  // Like Find but throws ValidationError for unknown ids.
  GarmentIndex Require(std::string_view id) const;

 private:
  AttributeVocab vocab_;
  int num_layers_ = 0;
  std::vector<Garment> garments_;
  std::vector<std::vector<GarmentIndex>> layers_;
  std::unordered_map<std::string, GarmentIndex> by_id_;
};

Catalog ParseCatalog(const nlohmann::json& j);
Catalog LoadCatalog(const std::filesystem::path& path);
nlohmann::json CatalogToJson(const Catalog& catalog);

// One garment per participating layer. `members` is ordered by layer, which
// also makes it the canonical memo key.
struct Outfit {
  std::vector<GarmentIndex> members;
  AttributeBag document;

  friend bool operator==(const Outfit&, const Outfit&) = default;
};

// An outfit given by its members plus free-form labels such as
// {"season": "winter"}.
struct MetaOutfit {
  std::vector<GarmentIndex> members;
  std::map<std::string, std::string> meta;
};

// Multiset union of the members' bags. Throws ValidationError if two
// garments share a layer.
Outfit BuildOutfit(const Catalog& catalog,
                   std::span<const GarmentIndex> garments);

// Document only, for callers that already hold layer-distinct members.
AttributeBag OutfitDocument(const Catalog& catalog,
                            std::span<const GarmentIndex> members);

// Per-layer garment selections. Within a layer the insertion order is kept;
// it drives outfit enumeration order.
class Capsule {
 public:
  Capsule() = default;
  explicit Capsule(int num_layers) : selections_(num_layers) {}

  int num_layers() const { return static_cast<int>(selections_.size()); }
  std::span<const GarmentIndex> selection(int layer) const {
    return selections_.at(layer);
  }
  std::size_t count(int layer) const { return selections_.at(layer).size(); }
  std::size_t num_pieces() const;
  // Product of the non-empty selection sizes; 0 for an empty capsule.
  std::size_t num_outfits() const;
  bool Contains(GarmentIndex g) const;

  // Throws ValidationError if `g` is already selected or belongs to a layer
  // outside the capsule.
  void Add(const Catalog& catalog, GarmentIndex g);
  void Reset(int layer) { selections_.at(layer).clear(); }
  void Set(int layer, std::vector<GarmentIndex> garments) {
    selections_.at(layer) = std::move(garments);
  }

  // Checks distinctness and layer membership against `catalog`.
  void Validate(const Catalog& catalog) const;

  friend bool operator==(const Capsule&, const Capsule&) = default;

 private:
  std::vector<std::vector<GarmentIndex>> selections_;
};

// Member tuples of the Cartesian product over the non-empty layers, in
// lexicographic order of per-layer insertion order.
std::vector<std::vector<GarmentIndex>> CapsuleOutfitMembers(
    const Capsule& capsule);

std::vector<Outfit> CapsuleOutfits(const Capsule& capsule,
                                   const Catalog& catalog);

// Member tuples of {g} x prod_{j != layer(g), A_j nonempty} A_j: the
// outfits introduced by adding `g`. Throws ValidationError if `g` is
// already selected.
std::vector<std::vector<GarmentIndex>> IncrementalOutfitMembers(
    const Capsule& capsule, GarmentIndex g, const Catalog& catalog);

std::vector<Outfit> IncrementalOutfits(const Capsule& capsule, GarmentIndex g,
                                       const Catalog& catalog);

nlohmann::json CapsuleToJson(const Capsule& capsule, const Catalog& catalog);
Capsule CapsuleFromJson(const nlohmann::json& j, const Catalog& catalog);

}  // namespace wardrobe

#endif  // WARDROBE_CATALOG_H_
