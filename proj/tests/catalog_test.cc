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
#include <set>

#include <gtest/gtest.h>

#include "wardrobe/error.h"

namespace wardrobe {
namespace {

using nlohmann::json;

json SmallCatalogJson() {
  return json::parse(R"({
    "vocab": ["wool", "denim", "red", "blue", "silk"],
    "layers": 3,
    "garments": [
      {"id": "coat-b", "layer": 0, "attributes": ["wool", "blue"]},
      {"id": "coat-a", "layer": "outer", "attributes": ["wool", "red"]},
      {"id": "shirt", "layer": 1, "attributes": ["silk"]},
      {"id": "tee", "layer": 1, "attributes": ["red", "red"]},
      {"id": "jeans", "layer": 2, "attributes": ["denim", "blue"],
       "meta": {"season": "winter"}}
    ]
  })");
}

TEST(LayerTest, ParsesNamesAndIndices) {
  EXPECT_EQ(ParseLayer("outer"), 0);
  EXPECT_EQ(ParseLayer("one-piece"), 3);
  EXPECT_EQ(ParseLayer("2"), 2);
  EXPECT_EQ(ParseLayer("layer5"), 5);
  EXPECT_FALSE(ParseLayer("hat").has_value());
  EXPECT_FALSE(ParseLayer("-1").has_value());
  EXPECT_EQ(LayerName(1), "upper");
}

TEST(CatalogTest, LoadsAndSortsLayersById) {
  const Catalog catalog = ParseCatalog(SmallCatalogJson());
  EXPECT_EQ(catalog.num_layers(), 3);
  EXPECT_EQ(catalog.size(), 5u);
  auto outer = catalog.layer(0);
  ASSERT_EQ(outer.size(), 2u);
  EXPECT_EQ(catalog.garment(outer[0]).id, "coat-a");
  EXPECT_EQ(catalog.garment(outer[1]).id, "coat-b");
  const Garment& tee = catalog.garment(catalog.Require("tee"));
  EXPECT_EQ(tee.attributes.size(), 2u);  // bags keep multiplicity
  EXPECT_EQ(catalog.garment(catalog.Require("jeans")).meta.at("season"),
            "winter");
}

TEST(CatalogTest, RoundTripsThroughJson) {
  const Catalog catalog = ParseCatalog(SmallCatalogJson());
  const Catalog again = ParseCatalog(CatalogToJson(catalog));
  ASSERT_EQ(again.size(), catalog.size());
  for (std::size_t g = 0; g < catalog.size(); ++g) {
    EXPECT_EQ(again.garment(g).id, catalog.garment(g).id);
    EXPECT_EQ(again.garment(g).layer, catalog.garment(g).layer);
    EXPECT_EQ(again.garment(g).attributes, catalog.garment(g).attributes);
  }
}

TEST(CatalogTest, RejectsUnknownAttribute) {
  json j = SmallCatalogJson();
  j["garments"][2]["attributes"] = {"linen"};
  try {
    ParseCatalog(j);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown attribute \"linen\""),
              std::string::npos);
  }
}

TEST(CatalogTest, RejectsDuplicateId) {
  json j = SmallCatalogJson();
  j["garments"][1]["id"] = "coat-b";
  EXPECT_THROW(ParseCatalog(j), ValidationError);
}

TEST(CatalogTest, RejectsLayerOutOfRange) {
  json j = SmallCatalogJson();
  j["garments"][0]["layer"] = 3;
  EXPECT_THROW(ParseCatalog(j), ValidationError);
}

TEST(CatalogTest, RejectsEmptyBagAndMalformedInput) {
  json j = SmallCatalogJson();
  j["garments"][0]["attributes"] = json::array();
  EXPECT_THROW(ParseCatalog(j), ValidationError);
  EXPECT_THROW(ParseCatalog(json::parse(R"({"vocab": []})")), ValidationError);
  EXPECT_THROW(LoadCatalog("/nonexistent/catalog.json"), ValidationError);
}

TEST(VocabTest, RejectsDuplicateNames) {
  EXPECT_THROW(AttributeVocab({"a", "b", "a"}), ValidationError);
}

TEST(OutfitTest, DocumentIsMultisetUnion) {
  const Catalog catalog = ParseCatalog(SmallCatalogJson());
  const GarmentIndex members[] = {catalog.Require("jeans"),
                                  catalog.Require("tee"),
                                  catalog.Require("coat-a")};
  const Outfit outfit = BuildOutfit(catalog, members);
  // Members come back in layer order.
  EXPECT_EQ(catalog.garment(outfit.members[0]).id, "coat-a");
  EXPECT_EQ(catalog.garment(outfit.members[2]).id, "jeans");
  const auto& v = catalog.vocab();
  const AttributeBag expected = [&] {
    AttributeBag b = {*v.Find("wool"), *v.Find("red"), *v.Find("red"),
                      *v.Find("red"), *v.Find("denim"), *v.Find("blue")};
    std::sort(b.begin(), b.end());
    return b;
  }();
  EXPECT_EQ(outfit.document, expected);
}

TEST(OutfitTest, RejectsSharedLayer) {
  const Catalog catalog = ParseCatalog(SmallCatalogJson());
  const GarmentIndex members[] = {catalog.Require("shirt"),
                                  catalog.Require("tee")};
  EXPECT_THROW(BuildOutfit(catalog, members), ValidationError);
}

TEST(CapsuleTest, CountsOutfitsOverNonEmptyLayers) {
  const Catalog catalog = ParseCatalog(SmallCatalogJson());
  Capsule capsule(3);
  EXPECT_EQ(capsule.num_outfits(), 0u);
  capsule.Add(catalog, catalog.Require("shirt"));
  capsule.Add(catalog, catalog.Require("tee"));
  EXPECT_EQ(capsule.num_outfits(), 2u);
  capsule.Add(catalog, catalog.Require("coat-a"));
  capsule.Add(catalog, catalog.Require("coat-b"));
  capsule.Add(catalog, catalog.Require("jeans"));
  EXPECT_EQ(capsule.num_outfits(), 4u);
  EXPECT_EQ(capsule.num_pieces(), 5u);
  EXPECT_EQ(CapsuleOutfitMembers(capsule).size(), 4u);
  EXPECT_NO_THROW(capsule.Validate(catalog));
}

// Three layers of 150 pieces and a one-piece layer of 50.
Catalog ExperimentScaleCatalog() {
  std::vector<Garment> garments;
  for (int layer = 0; layer < 4; ++layer) {
    for (int j = 0; j < (layer == 3 ? 50 : 150); ++j) {
      garments.push_back({LayerName(layer) + "-" + std::to_string(j), layer, {0}, {}});
    }
  }
  return Catalog(AttributeVocab({"a"}), 4, std::move(garments));
}

TEST(CatalogTest, LoadsExperimentScale) {
  const Catalog catalog =
      ParseCatalog(CatalogToJson(ExperimentScaleCatalog()));
  EXPECT_EQ(catalog.num_layers(), 4);
  EXPECT_EQ(catalog.size(), 500u);
  EXPECT_EQ(catalog.layer_size(0), 150u);
  EXPECT_EQ(catalog.layer_size(3), 50u);
}

TEST(CapsuleTest, OutfitCountIsProductOfNonEmptyLayers) {
  const Catalog catalog = ExperimentScaleCatalog();
  Capsule full(4);
  for (int layer = 0; layer < 3; ++layer) {
    for (int j = 0; j < 4; ++j) full.Add(catalog, catalog.layer(layer)[j]);
  }
  EXPECT_EQ(full.num_pieces(), 12u);
  EXPECT_EQ(full.num_outfits(), 64u);
  EXPECT_EQ(CapsuleOutfitMembers(full).size(), 64u);

  Capsule partial(4);
  for (int j = 0; j < 2; ++j) partial.Add(catalog, catalog.layer(1)[j]);
  for (int j = 0; j < 3; ++j) partial.Add(catalog, catalog.layer(2)[j]);
  EXPECT_EQ(partial.num_outfits(), 6u);
  for (const auto& o : CapsuleOutfitMembers(partial)) EXPECT_EQ(o.size(), 2u);
}

TEST(CapsuleTest, RejectsRepeatedSelection) {
  const Catalog catalog = ParseCatalog(SmallCatalogJson());
  Capsule capsule(3);
  capsule.Add(catalog, catalog.Require("tee"));
  EXPECT_THROW(capsule.Add(catalog, catalog.Require("tee")), ValidationError);
  EXPECT_THROW(IncrementalOutfitMembers(capsule, catalog.Require("tee"), catalog),
               ValidationError);
}

TEST(CapsuleTest, EnumerationFollowsInsertionOrder) {
  const Catalog catalog = ParseCatalog(SmallCatalogJson());
  Capsule capsule(3);
  const GarmentIndex b = catalog.Require("coat-b");
  const GarmentIndex a = catalog.Require("coat-a");
  const GarmentIndex tee = catalog.Require("tee");
  const GarmentIndex shirt = catalog.Require("shirt");
  capsule.Add(catalog, b);
  capsule.Add(catalog, a);
  capsule.Add(catalog, tee);
  capsule.Add(catalog, shirt);
  const std::vector<std::vector<GarmentIndex>> expected = {
      {b, tee}, {b, shirt}, {a, tee}, {a, shirt}};
  EXPECT_EQ(CapsuleOutfitMembers(capsule), expected);
}

// Adding g to a non-empty layer introduces exactly g x (other layers).
TEST(CapsuleTest, IncrementalAdditionMatchesFullEnumeration) {
  const Catalog catalog = ParseCatalog(SmallCatalogJson());
  Capsule capsule(3);
  capsule.Add(catalog, catalog.Require("coat-a"));
  capsule.Add(catalog, catalog.Require("tee"));
  capsule.Add(catalog, catalog.Require("jeans"));
  const GarmentIndex g = catalog.Require("shirt");
  auto before = CapsuleOutfitMembers(capsule);
  const auto added = IncrementalOutfitMembers(capsule, g, catalog);
  capsule.Add(catalog, g);
  const auto after = CapsuleOutfitMembers(capsule);
  std::set<std::vector<GarmentIndex>> combined(before.begin(), before.end());
  for (const auto& o : added) {
    EXPECT_TRUE(combined.insert(o).second) << "incremental outfit repeated";
  }
  EXPECT_EQ(combined,
            std::set<std::vector<GarmentIndex>>(after.begin(), after.end()));
}

// Filling an empty layer replaces the old outfits instead of adding to them.
TEST(CapsuleTest, FillingEmptyLayerYieldsWholeNewSet) {
  const Catalog catalog = ParseCatalog(SmallCatalogJson());
  Capsule capsule(3);
  capsule.Add(catalog, catalog.Require("coat-a"));
  capsule.Add(catalog, catalog.Require("coat-b"));
  const GarmentIndex g = catalog.Require("tee");
  const auto added = IncrementalOutfitMembers(capsule, g, catalog);
  capsule.Add(catalog, g);
  EXPECT_EQ(added, CapsuleOutfitMembers(capsule));
}

TEST(CapsuleTest, JsonRoundTrip) {
  const Catalog catalog = ParseCatalog(SmallCatalogJson());
  Capsule capsule(3);
  capsule.Add(catalog, catalog.Require("coat-b"));
  capsule.Add(catalog, catalog.Require("tee"));
  const json j = CapsuleToJson(capsule, catalog);
  EXPECT_EQ(j["num_pieces"], 2);
  EXPECT_EQ(j["num_outfits"], 1);
  EXPECT_EQ(CapsuleFromJson(j, catalog), capsule);
}

}  // namespace
}  // namespace wardrobe
