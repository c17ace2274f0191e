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

#include "wardrobe/cli.h"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "wardrobe/baselines.h"
#include "wardrobe/catalog.h"
#include "wardrobe/error.h"
#include "wardrobe/eval.h"
#include "wardrobe/objective.h"
#include "wardrobe/optimizer.h"
#include "wardrobe/seeds.h"
#include "wardrobe/style_model.h"
#include "wardrobe/synth.h"

namespace wardrobe {
namespace {

constexpr char kModule[] = "cli";

using nlohmann::json;
using Clock = std::chrono::steady_clock;

[[noreturn]] void Fail(const std::string& message) {
  throw ValidationError(kModule, message);
}

json ReadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail("cannot read " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    Fail("cannot parse " + path + ": " + e.what());
  }
}

void WriteText(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) Fail("cannot write " + path);
  out << text;
  if (!out) Fail("failed writing " + path);
}

void WriteJson(const std::string& path, const json& j) {
  WriteText(path, j.dump(2) + "\n");
}

std::string Sha256File(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string bytes = buffer.str();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1) {
    throw Error(kModule, "sha256 failed for " + path);
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0')
        << static_cast<int>(digest[i]);
  }
  return hex.str();
}

// Sits next to the primary output as <out>.manifest.json.
class Manifest {
 public:
  Manifest(std::string command, std::uint64_t seed, int threads)
      : start_(Clock::now()) {
    doc_["command"] = std::move(command);
    doc_["seed"] = seed;
    doc_["threads"] = threads;
    doc_["version"] = kVersion;
    doc_["config"] = json::object();
    doc_["inputs"] = json::object();
    doc_["outputs"] = json::object();
    doc_["timings"] = json::object();
  }

  json& config() { return doc_["config"]; }
  void Input(const std::string& path) { doc_["inputs"][path] = Sha256File(path); }
  void Output(const std::string& path) {
    doc_["outputs"][path] = Sha256File(path);
  }
  void Timing(const std::string& name, double seconds) {
    doc_["timings"][name] = seconds;
  }
  void Timing(const std::string& name, json value) {
    doc_["timings"][name] = std::move(value);
  }
  void Write(const std::string& path) {
    Timing("total_seconds",
           std::chrono::duration<double>(Clock::now() - start_).count());
    WriteJson(path, doc_);
  }

 private:
  json doc_;
  Clock::time_point start_;
};

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::vector<int> ParseInts(const std::string& text) {
  std::vector<int> values;
  for (const auto& part : SplitList(text)) {
    try {
      std::size_t used = 0;
      values.push_back(std::stoi(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw UsageError("not an integer: \"" + part + "\"");
    }
  }
  return values;
}

// "0..99" (inclusive) or a comma list.
std::vector<std::uint64_t> ParseSeeds(const std::string& text) {
  const auto dots = text.find("..");
  std::vector<std::uint64_t> seeds;
  try {
    if (dots != std::string::npos) {
      const std::uint64_t lo = std::stoull(text.substr(0, dots));
      const std::uint64_t hi = std::stoull(text.substr(dots + 2));
      if (hi < lo) throw UsageError("empty seed range \"" + text + "\"");
      for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      for (const auto& part : SplitList(text)) seeds.push_back(std::stoull(part));
    }
  } catch (const std::invalid_argument&) {
    throw UsageError("bad seed list \"" + text + "\"");
  } catch (const std::out_of_range&) {
    throw UsageError("bad seed list \"" + text + "\"");
  }
  if (seeds.empty()) throw UsageError("empty seed list");
  return seeds;
}

// Per-layer piece counts: `t` for every named layer, 0 elsewhere. With no
// names, every non-empty layer takes part.
std::vector<int> LayerCounts(const Catalog& catalog, const std::string& layers,
                             int t) {
  std::vector<int> counts(catalog.num_layers(), 0);
  if (layers.empty()) {
    for (int i = 0; i < catalog.num_layers(); ++i) {
      if (catalog.layer_size(i) > 0) counts[i] = t;
    }
    return counts;
  }
  for (const auto& name : SplitList(layers)) {
    const auto layer = ParseLayer(name);
    if (!layer || *layer >= catalog.num_layers()) {
      Fail("unknown layer \"" + name + "\"");
    }
    counts[*layer] = t;
  }
  return counts;
}

std::vector<GarmentIndex> ParseGarments(const Catalog& catalog,
                                        const std::string& ids) {
  std::vector<GarmentIndex> out;
  for (const auto& id : SplitList(ids)) out.push_back(catalog.Require(id));
  return out;
}

void CheckVocab(const Catalog& catalog, const StyleModel& model) {
  if (static_cast<std::size_t>(model.vocab_size()) != catalog.vocab().size()) {
    Fail("model vocabulary size " + std::to_string(model.vocab_size()) +
         " does not match the catalog's " +
         std::to_string(catalog.vocab().size()));
  }
  if (!model.vocab().empty() && model.vocab() != catalog.vocab().names()) {
    Fail("model vocabulary differs from the catalog's");
  }
}

std::vector<std::vector<GarmentIndex>> Members(
    const std::vector<MetaOutfit>& outfits) {
  std::vector<std::vector<GarmentIndex>> out;
  for (const auto& o : outfits) out.push_back(o.members);
  return out;
}

json CorpusToJson(const std::vector<AttributeBag>& corpus,
                  const AttributeVocab& vocab) {
  json docs = json::array();
  for (const auto& doc : corpus) {
    std::vector<std::string> names;
    for (AttributeId a : doc) names.push_back(vocab.name(a));
    docs.push_back(std::move(names));
  }
  return {{"vocab", vocab.names()}, {"documents", std::move(docs)}};
}

struct Corpus {
  AttributeVocab vocab;
  std::vector<AttributeBag> documents;
};

Corpus CorpusFromJson(const json& j) {
  Corpus corpus;
  try {
    corpus.vocab = AttributeVocab(j.at("vocab").get<std::vector<std::string>>());
    for (const auto& doc : j.at("documents")) {
      corpus.documents.push_back(
          corpus.vocab.Intern(doc.get<std::vector<std::string>>()));
    }
  } catch (const json::exception& e) {
    Fail(std::string("malformed corpus: ") + e.what());
  }
  return corpus;
}

json ErrorRecord(const std::string& kind, const std::string& module,
                 const std::string& message) {
  return {{"error", {{"kind", kind}, {"module", module}, {"message", message}}}};
}

// ---------------------------------------------------------------------------
// Subcommand options.

struct Global {
  std::uint64_t seed = 0;
  int threads = std::max(1u, std::thread::hardware_concurrency());
  int likelihood_draws = InferenceConfig{}.likelihood_draws;
  int theta_samples = InferenceConfig{}.theta_samples;

  InferenceConfig Inference() const {
    InferenceConfig c;
    c.likelihood_draws = likelihood_draws;
    c.theta_samples = theta_samples;
    return c;
  }
};

struct SynthOptions {
  std::string out_dir;
  SynthConfig config;
};

struct FitOptions {
  std::string corpus;
  std::string out;
  std::string report;
  FitConfig config;
  std::string variant = "ctm";
};

struct ScoreOptions {
  std::string catalog, model, outfits, out;
  std::optional<double> threshold;
  std::optional<double> calibrate;
};

struct CapsuleOptions {
  std::string catalog, model, layers, algo = "iterative", seed_outfit, weights;
  std::string out, trace;
  int t = 4;
  double epsilon = 0.5;
  int max_sweeps = 100;
  double threshold = kDefaultThreshold;
  double cv_weight = 1.0;
  double lambda = 0.5;
  double budget = kDefaultEnumerationBudget;
};

struct PersonalizeOptions {
  std::string catalog, model, layers, user_outfits, weights_out, out, trace;
  int t = 4;
  double epsilon = 0.5;
  int max_sweeps = 100;
  double threshold = kDefaultThreshold;
  double cv_weight = 1.0;
};

struct NegativesOptions {
  std::string catalog, outfits, pairs, out;
  int ratio = kDefaultNegativeRatio;
};

struct CompatOptions {
  std::string catalog, labeled, model, out, csv;
};

struct GoldOptions {
  std::string catalog, capsule, gold, model, out;
};

struct BenchOptions {
  std::string sizes = "6", seeds = "0..9", slope_ts = "2,3,4,5", out;
  BenchConfig config;
  bool no_optimal = false;
};

// ---------------------------------------------------------------------------
// Handlers.

void RunSynth(const Global& g, SynthOptions o, std::ostream& out) {
  o.config.seed = g.seed;
  Manifest manifest("synth", g.seed, g.threads);
  const SynthConfig& c = o.config;
  manifest.config() = {{"out_dir", o.out_dir},
                       {"layers", c.num_layers},
                       {"garments_per_layer", c.garments_per_layer},
                       {"groups", c.num_groups},
                       {"topics_per_group", c.topics_per_group},
                       {"attributes_per_layer", c.attributes_per_layer},
                       {"attributes_per_garment", c.attributes_per_garment},
                       {"correlation", c.correlation},
                       {"topic_scale", c.topic_scale},
                       {"block_mass", c.block_mass},
                       {"corpus_size", c.corpus_size},
                       {"labeled", c.num_labeled},
                       {"gold", c.num_gold},
                       {"user", c.num_user},
                       {"user_group", c.user_group}};
  const auto start = Clock::now();
  const SynthData data = Synthesize(c);
  manifest.Timing("synthesize_seconds",
                  std::chrono::duration<double>(Clock::now() - start).count());

  const std::filesystem::path dir(o.out_dir);
  auto write = [&](const std::string& name, const json& j) {
    const std::string path = (dir / name).string();
    WriteJson(path, j);
    manifest.Output(path);
  };
  write("catalog.json", CatalogToJson(data.catalog));
  write("corpus.json", CorpusToJson(data.corpus, data.catalog.vocab()));
  write("planted_model.json", ModelToJson(data.model));
  write("outfits.json", OutfitsToJson(data.labeled, data.catalog));
  write("pairs.json", ExclusivePairsToJson(data.exclusive_pairs));
  std::vector<MetaOutfit> gold;
  for (const auto& m : data.gold) gold.push_back({m, {}});
  write("gold.json", OutfitsToJson(gold, data.catalog));
  std::vector<MetaOutfit> user;
  for (const auto& m : data.user) user.push_back({m, {}});
  write("user_outfits.json", OutfitsToJson(user, data.catalog));
  write("synth.json", {{"threshold", data.threshold},
                       {"num_topics", data.model.num_topics()}});
  manifest.Write((dir / "synth.manifest.json").string());
  out << "wrote synthetic data to " << o.out_dir << "\n";
}

void RunFit(const Global& g, FitOptions o, std::ostream& out) {
  Manifest manifest("fit", g.seed, g.threads);
  manifest.Input(o.corpus);
  o.config.variant = ParseVariant(o.variant);
  o.config.seed = DeriveSeed(g.seed, kModule, "fit");
  const FitConfig& c = o.config;
  manifest.config() = {{"corpus", o.corpus},
                       {"k", c.num_topics},
                       {"variant", o.variant},
                       {"iterations", c.iterations},
                       {"burn_in", c.burn_in},
                       {"samples", c.sample_count},
                       {"alpha", c.alpha},
                       {"beta", c.beta},
                       {"em_iterations", c.em_iterations},
                       {"em_tolerance", c.em_tolerance},
                       {"warm_start_iterations", c.warm_start_iterations}};
  const Corpus corpus = CorpusFromJson(ReadJson(o.corpus));
  FitReport report;
  const auto start = Clock::now();
  StyleModel model = Fit(corpus.documents,
                         static_cast<int>(corpus.vocab.size()), c, &report);
  manifest.Timing("fit_seconds",
                  std::chrono::duration<double>(Clock::now() - start).count());
  model.set_vocab(corpus.vocab.names());
  WriteJson(o.out, ModelToJson(model));
  manifest.Output(o.out);
  if (!o.report.empty()) {
    WriteJson(o.report, {{"objective", report.objective}});
    manifest.Output(o.report);
  }
  manifest.Write(o.out + ".manifest.json");
  out << "fitted " << VariantName(c.variant) << " with K=" << c.num_topics
      << " to " << corpus.documents.size() << " documents\n";
}

void RunScore(const Global& g, const ScoreOptions& o, std::ostream& out) {
  Manifest manifest("score", g.seed, g.threads);
  manifest.Input(o.catalog);
  manifest.Input(o.model);
  manifest.Input(o.outfits);
  const Catalog catalog = LoadCatalog(o.catalog);
  const StyleModel model = LoadModel(o.model);
  CheckVocab(catalog, model);
  const auto outfits = LoadOutfits(o.outfits, catalog);
  if (outfits.empty()) Fail("no outfits to score");
  if (o.calibrate && !(*o.calibrate > 0.0 && *o.calibrate < 1.0)) {
    throw UsageError("--calibrate must lie strictly between 0 and 1");
  }

  // Threshold first: calibration needs every raw score.
  const InferenceConfig inference = g.Inference();
  const std::uint64_t seed = DeriveSeed(g.seed, kModule, "scorer");
  std::vector<double> ll;
  for (const auto& o2 : outfits) {
    ll.push_back(OutfitLogLikelihood(catalog, model, o2.members, inference, seed));
  }
  double threshold = o.threshold.value_or(kDefaultThreshold);
  if (o.calibrate) {
    std::vector<double> sorted = ll;
    std::sort(sorted.begin(), sorted.end());
    const double pos = *o.calibrate * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    threshold = sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
  }
  manifest.config() = {{"catalog", o.catalog},   {"model", o.model},
                       {"outfits", o.outfits},   {"threshold", threshold},
                       {"calibrate", o.calibrate ? json(*o.calibrate) : json()}};

  const ModelScorer scorer(catalog, model, threshold, inference, seed);
  json rows = json::array();
  for (const auto& outfit : outfits) {
    const OutfitScore s = scorer.Score(outfit.members);
    std::vector<std::string> ids;
    for (GarmentIndex m : outfit.members) ids.push_back(catalog.garment(m).id);
    rows.push_back({{"garments", ids},
                    {"log_likelihood", s.log_likelihood},
                    {"compat", s.compat},
                    {"theta", s.theta}});
  }
  WriteJson(o.out, {{"threshold", threshold}, {"outfits", std::move(rows)}});
  manifest.Output(o.out);
  manifest.Write(o.out + ".manifest.json");
  out << "scored " << outfits.size() << " outfits; threshold " << threshold
      << "\n";
}

json SolveJson(const std::string& algo, const Capsule& capsule,
               const Catalog& catalog, std::optional<double> objective) {
  json j = CapsuleToJson(capsule, catalog);
  j["algo"] = algo;
  if (objective) j["objective"] = *objective;
  return j;
}

void RunCapsule(const Global& g, const CapsuleOptions& o, std::ostream& out) {
  static const std::vector<std::string> kAlgos = {"iterative", "naive",
                                                  "optimal", "mmr", "kmedoids"};
  if (std::find(kAlgos.begin(), kAlgos.end(), o.algo) == kAlgos.end()) {
    throw UsageError("unknown --algo \"" + o.algo + "\"");
  }
  Manifest manifest("capsule", g.seed, g.threads);
  manifest.Input(o.catalog);
  const Catalog catalog = LoadCatalog(o.catalog);
  std::optional<StyleModel> model;
  if (!o.model.empty()) {
    manifest.Input(o.model);
    model = LoadModel(o.model);
    CheckVocab(catalog, *model);
  } else if (o.algo != "kmedoids") {
    throw UsageError("--model is required for --algo " + o.algo);
  }
  ObjectiveOptions options;
  options.cv_weight = o.cv_weight;
  if (!o.weights.empty()) {
    manifest.Input(o.weights);
    options.weights = LoadWeights(o.weights);
  }
  const std::vector<int> counts = LayerCounts(catalog, o.layers, o.t);
  const std::vector<GarmentIndex> pinned = ParseGarments(catalog, o.seed_outfit);
  manifest.config() = {{"catalog", o.catalog},
                       {"model", o.model},
                       {"algo", o.algo},
                       {"t", o.t},
                       {"counts", counts},
                       {"seed_outfit", SplitList(o.seed_outfit)},
                       {"weights", o.weights},
                       {"epsilon", o.epsilon},
                       {"max_sweeps", o.max_sweeps},
                       {"threshold", o.threshold},
                       {"cv_weight", o.cv_weight},
                       {"lambda", o.lambda},
                       {"budget", o.budget},
                       {"likelihood_draws", g.likelihood_draws},
                       {"theta_samples", g.theta_samples}};

  std::optional<ModelScorer> scorer;
  std::optional<Objective> objective;
  if (model) {
    scorer.emplace(catalog, *model, o.threshold, g.Inference(),
                   DeriveSeed(g.seed, kModule, "scorer"));
    objective.emplace(*scorer, options);
  }

  json result;
  std::optional<json> trace;
  const auto start = Clock::now();
  if (o.algo == "iterative" || o.algo == "naive") {
    GreedyConfig config;
    config.counts = counts;
    config.epsilon = o.epsilon;
    config.max_sweeps = o.max_sweeps;
    config.pinned = pinned;
    config.threads = g.threads;
    const SolveResult r = o.algo == "iterative"
                              ? IterativeGreedy(catalog, *objective, config)
                              : NaiveGreedy(catalog, *objective, config);
    result = SolveJson(o.algo, r.capsule, catalog, r.objective);
    trace = TraceToJson(r.trace, catalog);
  } else if (o.algo == "optimal") {
    const OptimalResult r =
        ExhaustiveOptimal(catalog, *objective, counts, o.budget, pinned);
    result = SolveJson(o.algo, r.capsule, catalog, r.objective);
    result["enumerated"] = r.enumerated;
  } else {
    const FeatureTable features = FeatureTable::FromCatalog(catalog);
    Capsule capsule;
    if (o.algo == "mmr") {
      const auto relevance =
          PieceRelevance(catalog, *model, g.Inference(),
                         DeriveSeed(g.seed, kModule, "relevance"));
      capsule = MmrSelect(catalog, features, relevance, o.lambda, counts);
    } else {
      const ClusterResult r = ClusterCenters(catalog, features, counts);
      capsule = r.capsule;
      if (!r.degenerate_layers.empty()) {
        json names = json::array();
        for (int i : r.degenerate_layers) names.push_back(LayerName(i));
        result["warnings"] = {{"degenerate_layers", names}};
      }
    }
    std::optional<double> value;
    if (objective) value = CapsuleObjective(*objective, capsule);
    json j = SolveJson(o.algo, capsule, catalog, value);
    if (result.contains("warnings")) j["warnings"] = result["warnings"];
    if (!pinned.empty()) j["seed_outfit_ignored"] = true;
    result = std::move(j);
  }
  manifest.Timing("solve_seconds",
                  std::chrono::duration<double>(Clock::now() - start).count());
  if (objective) {
    manifest.Timing("outfit_evaluations", json(objective->evaluations()));
  }

  WriteJson(o.out, result);
  manifest.Output(o.out);
  if (!o.trace.empty()) {
    WriteJson(o.trace, trace.value_or(json::object()));
    manifest.Output(o.trace);
  }
  manifest.Write(o.out + ".manifest.json");
  out << o.algo << " capsule: " << result["num_pieces"].get<std::size_t>()
      << " pieces, " << result["num_outfits"].get<std::size_t>()
      << " outfits\n";
}

void RunPersonalize(const Global& g, const PersonalizeOptions& o,
                    std::ostream& out) {
  Manifest manifest("personalize", g.seed, g.threads);
  manifest.Input(o.catalog);
  manifest.Input(o.model);
  manifest.Input(o.user_outfits);
  const Catalog catalog = LoadCatalog(o.catalog);
  const StyleModel model = LoadModel(o.model);
  CheckVocab(catalog, model);
  const auto user = LoadOutfits(o.user_outfits, catalog);
  const std::vector<int> counts = LayerCounts(catalog, o.layers, o.t);
  manifest.config() = {{"catalog", o.catalog},
                       {"model", o.model},
                       {"user_outfits", o.user_outfits},
                       {"t", o.t},
                       {"counts", counts},
                       {"epsilon", o.epsilon},
                       {"max_sweeps", o.max_sweeps},
                       {"threshold", o.threshold},
                       {"cv_weight", o.cv_weight}};

  std::vector<AttributeBag> docs;
  for (const auto& u : user) docs.push_back(OutfitDocument(catalog, u.members));
  const Eigen::VectorXd pref = UserPreference(
      model, docs, g.Inference(), DeriveSeed(g.seed, kModule, "preference"));
  std::vector<double> weights(pref.data(), pref.data() + pref.size());
  double total = 0.0;
  for (double w : weights) total += w;
  for (double& w : weights) w /= total;

  ObjectiveOptions options;
  options.weights = weights;
  options.cv_weight = o.cv_weight;
  const ModelScorer scorer(catalog, model, o.threshold, g.Inference(),
                           DeriveSeed(g.seed, kModule, "scorer"));
  const Objective objective(scorer, options);
  GreedyConfig config;
  config.counts = counts;
  config.epsilon = o.epsilon;
  config.max_sweeps = o.max_sweeps;
  config.threads = g.threads;
  const SolveResult r = IterativeGreedy(catalog, objective, config);
  manifest.Timing("solve_seconds", r.trace.wall_seconds);

  WriteJson(o.weights_out, {{"weights", weights}});
  manifest.Output(o.weights_out);
  WriteJson(o.out, SolveJson("iterative", r.capsule, catalog, r.objective));
  manifest.Output(o.out);
  if (!o.trace.empty()) {
    WriteJson(o.trace, TraceToJson(r.trace, catalog));
    manifest.Output(o.trace);
  }
  manifest.Write(o.out + ".manifest.json");
  out << "personalized capsule: " << r.capsule.num_pieces() << " pieces\n";
}

void RunNegatives(const Global& g, const NegativesOptions& o,
                  std::ostream& out) {
  Manifest manifest("eval negatives", g.seed, g.threads);
  manifest.Input(o.catalog);
  manifest.Input(o.outfits);
  manifest.Input(o.pairs);
  manifest.config() = {{"catalog", o.catalog},
                       {"outfits", o.outfits},
                       {"pairs", o.pairs},
                       {"ratio", o.ratio}};
  const Catalog catalog = LoadCatalog(o.catalog);
  const auto positives = LoadOutfits(o.outfits, catalog);
  const ExclusivePairs pairs = ExclusivePairsFromJson(ReadJson(o.pairs));
  const LabeledOutfitSet set =
      GenerateNegatives(catalog, positives, pairs, o.ratio,
                        DeriveSeed(g.seed, kModule, "negatives"));
  WriteJson(o.out, LabeledToJson(set, catalog));
  manifest.Output(o.out);
  manifest.Write(o.out + ".manifest.json");
  out << set.positives.size() << " positives, " << set.negatives.size()
      << " negatives\n";
}

void RunCompat(const Global& g, const CompatOptions& o, std::ostream& out) {
  Manifest manifest("eval compat", g.seed, g.threads);
  manifest.Input(o.catalog);
  manifest.Input(o.labeled);
  manifest.Input(o.model);
  manifest.config() = {{"catalog", o.catalog},
                       {"labeled", o.labeled},
                       {"model", o.model},
                       {"likelihood_draws", g.likelihood_draws}};
  const Catalog catalog = LoadCatalog(o.catalog);
  const StyleModel model = LoadModel(o.model);
  CheckVocab(catalog, model);
  const LabeledOutfitSet set = LabeledFromJson(ReadJson(o.labeled), catalog);
  const CompatReport report =
      EvaluateCompat(catalog, model, set, g.Inference(),
                     DeriveSeed(g.seed, kModule, "scorer"), g.threads);
  json points = json::array();
  for (const auto& p : report.curve.points) {
    points.push_back(
        {{"threshold", p.threshold}, {"precision", p.precision}, {"recall", p.recall}});
  }
  WriteJson(o.out, {{"average_precision", report.curve.average_precision},
                    {"positives", set.positives.size()},
                    {"negatives", set.negatives.size()},
                    {"ranking", "raw per-token log-likelihood"},
                    {"curve", std::move(points)}});
  manifest.Output(o.out);
  if (!o.csv.empty()) {
    std::ostringstream csv;
    csv << std::setprecision(17) << "threshold,precision,recall\n";
    for (const auto& p : report.curve.points) {
      csv << p.threshold << "," << p.precision << "," << p.recall << "\n";
    }
    WriteText(o.csv, csv.str());
    manifest.Output(o.csv);
  }
  manifest.Write(o.out + ".manifest.json");
  out << "AP " << report.curve.average_precision << "\n";
}

json ScoreJson(const CapsuleScore& s) {
  return {{"compatibility_distance", s.compatibility_distance},
          {"versatility_distance", s.versatility_distance},
          {"nearest", s.nearest}};
}

void RunGold(const Global& g, const GoldOptions& o, std::ostream& out) {
  Manifest manifest("eval capsule", g.seed, g.threads);
  manifest.Input(o.catalog);
  manifest.Input(o.capsule);
  manifest.Input(o.gold);
  manifest.config() = {{"catalog", o.catalog},
                       {"capsule", o.capsule},
                       {"gold", o.gold},
                       {"model", o.model}};
  const Catalog catalog = LoadCatalog(o.catalog);
  const Capsule capsule = CapsuleFromJson(ReadJson(o.capsule), catalog);
  const auto gold = Members(LoadOutfits(o.gold, catalog));
  const FeatureTable features = FeatureTable::FromCatalog(catalog);
  const CapsuleScore score = GoldScore(catalog, capsule, gold, features);
  json report = {{"capsule", ScoreJson(score)},
                 {"normalization",
                  {{"scope", "corpus-wide"},
                   {"compatibility_sigma", score.compatibility_sigma},
                   {"versatility_sigma", score.versatility_sigma}}}};

  // Reference baselines with the same per-layer counts.
  std::vector<int> counts(catalog.num_layers());
  for (int i = 0; i < catalog.num_layers(); ++i) {
    counts[i] = static_cast<int>(capsule.count(i));
  }
  json baselines = json::object();
  baselines["kmedoids"] =
      ScoreJson(GoldScore(catalog, ClusterCenters(catalog, features, counts).capsule,
                          gold, features));
  if (!o.model.empty()) {
    manifest.Input(o.model);
    const StyleModel model = LoadModel(o.model);
    CheckVocab(catalog, model);
    const auto relevance = PieceRelevance(
        catalog, model, g.Inference(), DeriveSeed(g.seed, kModule, "relevance"));
    for (const char* lambda : {"0.3", "0.5", "0.7"}) {
      const Capsule mmr =
          MmrSelect(catalog, features, relevance, std::stod(lambda), counts);
      baselines[std::string("mmr-") + lambda] =
          ScoreJson(GoldScore(catalog, mmr, gold, features));
    }
  }
  report["baselines"] = std::move(baselines);
  WriteJson(o.out, report);
  manifest.Output(o.out);
  manifest.Write(o.out + ".manifest.json");
  out << "compatibility " << score.compatibility_distance << ", versatility "
      << score.versatility_distance << "\n";
}

void RunBench(const Global& g, BenchOptions o, std::ostream& out) {
  Manifest manifest("bench", g.seed, g.threads);
  o.config.sizes = ParseInts(o.sizes);
  o.config.seeds = ParseSeeds(o.seeds);
  o.config.slope_ts = ParseInts(o.slope_ts);
  o.config.include_optimal = !o.no_optimal;
  o.config.threads = g.threads;
  o.config.inference = g.Inference();
  // Instances are keyed by their own seeds; --seed shifts them all.
  for (auto& s : o.config.seeds) s = DeriveSeed(g.seed, std::to_string(s), "bench");
  const BenchConfig& c = o.config;
  manifest.config() = {{"sizes", c.sizes},
                       {"t", c.t},
                       {"seeds", o.seeds},
                       {"layers", c.num_layers},
                       {"include_optimal", c.include_optimal},
                       {"budget", c.budget},
                       {"epsilon", c.epsilon},
                       {"slope_ts", c.slope_ts},
                       {"slope_layers", c.slope_layers},
                       {"slope_size", c.slope_size},
                       {"likelihood_draws", g.likelihood_draws},
                       {"theta_samples", g.theta_samples}};
  const BenchReport report = BenchSolvers(c);
  WriteJson(o.out, BenchToJson(report, false));
  manifest.Output(o.out);
  manifest.Timing("solvers", BenchToJson(report, true)["summary"]);
  manifest.Write(o.out + ".manifest.json");
  out << "benchmarked " << report.instances.size() << " instances";
  if (!report.slope_points.empty()) {
    out << "; evaluation slopes naive " << report.naive_slope
        << ", iterative per sweep " << report.iterative_sweep_slope;
  }
  out << "\n";
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Capsule wardrobe construction from layered catalogs", "wardrobe"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);

  Global global;
  app.add_option("--seed", global.seed, "Master seed; every RNG stream is derived from it");
  app.add_option("--threads", global.threads, "Worker threads (default: all cores)")
      ->check(CLI::PositiveNumber);
  app.add_option("--likelihood-draws", global.likelihood_draws,
                 "Importance-sampling draws per outfit likelihood")
      ->check(CLI::PositiveNumber);
  app.add_option("--theta-samples", global.theta_samples,
                 "Gibbs draws per LDA style posterior")
      ->check(CLI::PositiveNumber);

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a planted synthetic world");
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")->required();
  synth_cmd->add_option("--layers", synth.config.num_layers, "Number of layers");
  synth_cmd->add_option("--garments-per-layer", synth.config.garments_per_layer,
                        "Garments per layer");
  synth_cmd->add_option("--groups", synth.config.num_groups, "Correlated topic groups");
  synth_cmd->add_option("--topics-per-group", synth.config.topics_per_group,
                        "Topics per group");
  synth_cmd->add_option("--attributes-per-layer", synth.config.attributes_per_layer,
                        "Attribute vocabulary size per layer");
  synth_cmd->add_option("--attributes-per-garment",
                        synth.config.attributes_per_garment, "Attributes per garment");
  synth_cmd->add_option("--correlation", synth.config.correlation,
                        "Within-group topic correlation");
  synth_cmd->add_option("--corpus-size", synth.config.corpus_size,
                        "Training documents");
  synth_cmd->add_option("--labeled", synth.config.num_labeled,
                        "Labeled positive outfits");
  synth_cmd->add_option("--gold", synth.config.num_gold, "Gold outfits");
  synth_cmd->add_option("--user", synth.config.num_user, "User outfits");
  synth_cmd->add_option("--user-group", synth.config.user_group,
                        "Style group of the user outfits");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a style topic model to a corpus");
  fit_cmd->add_option("--corpus", fit.corpus, "Corpus JSON {vocab, documents}")
      ->required();
  fit_cmd->add_option("--k", fit.config.num_topics, "Number of styles")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--variant", fit.variant, "ctm or lda")
      ->check(CLI::IsMember({"ctm", "lda"}));
  fit_cmd->add_option("--iterations", fit.config.iterations, "Gibbs sweeps (lda)");
  fit_cmd->add_option("--burn-in", fit.config.burn_in, "Gibbs burn-in (lda)");
  fit_cmd->add_option("--samples", fit.config.sample_count,
                      "Post-burn-in estimates averaged (lda)");
  fit_cmd->add_option("--alpha", fit.config.alpha, "Dirichlet alpha; <= 0 means 1/K");
  fit_cmd->add_option("--beta", fit.config.beta, "Topic smoothing");
  fit_cmd->add_option("--em-iterations", fit.config.em_iterations,
                      "Variational EM iterations (ctm)");
  fit_cmd->add_option("--em-tolerance", fit.config.em_tolerance,
                      "Relative EM convergence tolerance (ctm)");
  fit_cmd->add_option("--warm-start", fit.config.warm_start_iterations,
                      "Gibbs sweeps used to initialize CTM topics");
  fit_cmd->add_option("--out", fit.out, "Model JSON")->required();
  fit_cmd->add_option("--report", fit.report, "Training objective trace JSON");

  ScoreOptions score;
  auto* score_cmd = app.add_subcommand("score", "Score outfits with a model");
  score_cmd->add_option("--catalog", score.catalog, "Catalog JSON")->required();
  score_cmd->add_option("--model", score.model, "Model JSON")->required();
  score_cmd->add_option("--outfits", score.outfits, "Outfit list JSON")->required();
  score_cmd->add_option("--threshold", score.threshold, "Step threshold");
  score_cmd->add_option("--calibrate", score.calibrate,
                        "Set the threshold to this quantile of the scores");
  score_cmd->add_option("--out", score.out, "Scores JSON")->required();

  CapsuleOptions capsule;
  auto* capsule_cmd = app.add_subcommand("capsule", "Build a capsule");
  capsule_cmd->add_option("--catalog", capsule.catalog, "Catalog JSON")->required();
  capsule_cmd->add_option("--model", capsule.model, "Model JSON");
  capsule_cmd->add_option("--t", capsule.t, "Pieces per layer")
      ->check(CLI::PositiveNumber);
  capsule_cmd->add_option("--layers", capsule.layers,
                          "Comma-separated layers (default: all non-empty)");
  capsule_cmd->add_option("--algo", capsule.algo,
                          "iterative, naive, optimal, mmr or kmedoids");
  capsule_cmd->add_option("--seed-outfit", capsule.seed_outfit,
                          "Comma-separated garment ids pinned into the capsule");
  capsule_cmd->add_option("--weights", capsule.weights, "Style weights JSON");
  capsule_cmd->add_option("--epsilon", capsule.epsilon, "Convergence tolerance")
      ->check(CLI::PositiveNumber);
  capsule_cmd->add_option("--max-sweeps", capsule.max_sweeps, "Sweep budget")
      ->check(CLI::PositiveNumber);
  capsule_cmd->add_option("--threshold", capsule.threshold,
                          "Step threshold on per-token log-likelihood");
  capsule_cmd->add_option("--cv-weight", capsule.cv_weight,
                          "Weight of the versatility term");
  capsule_cmd->add_option("--lambda", capsule.lambda, "MMR relevance weight")
      ->check(CLI::Range(0.0, 1.0));
  capsule_cmd->add_option("--budget", capsule.budget,
                          "Maximum capsules enumerated by --algo optimal");
  capsule_cmd->add_option("--out", capsule.out, "Capsule JSON")->required();
  capsule_cmd->add_option("--trace", capsule.trace, "Run trace JSON");

  PersonalizeOptions personalize;
  auto* personalize_cmd =
      app.add_subcommand("personalize", "Build a capsule for a user's style");
  personalize_cmd->add_option("--catalog", personalize.catalog, "Catalog JSON")
      ->required();
  personalize_cmd->add_option("--model", personalize.model, "Model JSON")->required();
  personalize_cmd->add_option("--user-outfits", personalize.user_outfits,
                              "The user's outfits JSON")
      ->required();
  personalize_cmd->add_option("--weights-out", personalize.weights_out,
                              "Style weights JSON to write")
      ->required();
  personalize_cmd->add_option("--t", personalize.t, "Pieces per layer")
      ->check(CLI::PositiveNumber);
  personalize_cmd->add_option("--layers", personalize.layers,
                              "Comma-separated layers (default: all non-empty)");
  personalize_cmd->add_option("--epsilon", personalize.epsilon,
                              "Convergence tolerance")
      ->check(CLI::PositiveNumber);
  personalize_cmd->add_option("--max-sweeps", personalize.max_sweeps, "Sweep budget")
      ->check(CLI::PositiveNumber);
  personalize_cmd->add_option("--threshold", personalize.threshold, "Step threshold");
  personalize_cmd->add_option("--cv-weight", personalize.cv_weight,
                              "Weight of the versatility term");
  personalize_cmd->add_option("--out", personalize.out, "Capsule JSON")->required();
  personalize_cmd->add_option("--trace", personalize.trace, "Run trace JSON");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluation tools");
  eval_cmd->require_subcommand(1);

  NegativesOptions negatives;
  auto* negatives_cmd =
      eval_cmd->add_subcommand("negatives", "Generate negatives by label swaps");
  negatives_cmd->add_option("--catalog", negatives.catalog, "Catalog JSON")->required();
  negatives_cmd->add_option("--outfits", negatives.outfits,
                            "Positive outfits with meta-labels")
      ->required();
  negatives_cmd->add_option("--pairs", negatives.pairs, "Exclusive label pairs JSON")
      ->required();
  negatives_cmd->add_option("--ratio", negatives.ratio, "Negatives per positive")
      ->check(CLI::NonNegativeNumber);
  negatives_cmd->add_option("--out", negatives.out, "Labeled set JSON")->required();

  CompatOptions compat;
  auto* compat_cmd =
      eval_cmd->add_subcommand("compat", "Precision/recall of compatibility scores");
  compat_cmd->add_option("--catalog", compat.catalog, "Catalog JSON")->required();
  compat_cmd->add_option("--labeled", compat.labeled, "Labeled set JSON")->required();
  compat_cmd->add_option("--model", compat.model, "Model JSON")->required();
  compat_cmd->add_option("--out", compat.out, "Report JSON")->required();
  compat_cmd->add_option("--csv", compat.csv, "PR curve CSV");

  GoldOptions gold;
  auto* gold_cmd =
      eval_cmd->add_subcommand("capsule", "Distances of a capsule to gold outfits");
  gold_cmd->add_option("--catalog", gold.catalog, "Catalog JSON")->required();
  gold_cmd->add_option("--capsule", gold.capsule, "Capsule JSON")->required();
  gold_cmd->add_option("--gold", gold.gold, "Gold outfits JSON")->required();
  gold_cmd->add_option("--model", gold.model,
                       "Model JSON; adds MMR reference rows");
  gold_cmd->add_option("--out", gold.out, "Report JSON")->required();

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Compare solvers on synthetic instances");
  bench_cmd->add_option("--sizes", bench.sizes, "Comma-separated garments per layer");
  bench_cmd->add_option("--t", bench.config.t, "Pieces per layer")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seeds", bench.seeds, "Seed list: a..b or comma-separated");
  bench_cmd->add_option("--layers", bench.config.num_layers, "Layers per instance");
  bench_cmd->add_flag("--no-optimal", bench.no_optimal, "Skip the exhaustive solver");
  bench_cmd->add_option("--budget", bench.config.budget,
                        "Maximum capsules enumerated per instance");
  bench_cmd->add_option("--epsilon", bench.config.epsilon, "Convergence tolerance")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--slope-ts", bench.slope_ts,
                        "T values for the evaluation-count slope; empty to skip");
  bench_cmd->add_option("--slope-layers", bench.config.slope_layers,
                        "Layers of the slope instance");
  bench_cmd->add_option("--slope-size", bench.config.slope_size,
                        "Garments per layer of the slope instance");
  bench_cmd->add_option("--out", bench.out, "Report JSON")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << ErrorRecord("usage", kModule, e.what()).dump() << "\n";
    return kExitUsage;
  }

  try {
    if (synth_cmd->parsed()) {
      RunSynth(global, synth, out);
    } else if (fit_cmd->parsed()) {
      RunFit(global, fit, out);
    } else if (score_cmd->parsed()) {
      RunScore(global, score, out);
    } else if (capsule_cmd->parsed()) {
      RunCapsule(global, capsule, out);
    } else if (personalize_cmd->parsed()) {
      RunPersonalize(global, personalize, out);
    } else if (negatives_cmd->parsed()) {
      RunNegatives(global, negatives, out);
    } else if (compat_cmd->parsed()) {
      RunCompat(global, compat, out);
    } else if (gold_cmd->parsed()) {
      RunGold(global, gold, out);
    } else if (bench_cmd->parsed()) {
      RunBench(global, bench, out);
    }
  } catch (const UsageError& e) {
    err << ErrorRecord("usage", e.module(), e.what()).dump() << "\n";
    return kExitUsage;
  } catch (const BudgetExceededError& e) {
    json record = ErrorRecord("budget_exceeded", e.module(), e.what());
    record["error"]["required"] = e.required();
    record["error"]["budget"] = e.budget();
    err << record.dump() << "\n";
    return kExitBudget;
  } catch (const ValidationError& e) {
    err << ErrorRecord("validation", e.module(), e.what()).dump() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    err << ErrorRecord("internal", e.module(), e.what()).dump() << "\n";
    return kExitInternal;
  } catch (const std::filesystem::filesystem_error& e) {
    err << ErrorRecord("validation", kModule, e.what()).dump() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << ErrorRecord("internal", kModule, e.what()).dump() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace wardrobe
