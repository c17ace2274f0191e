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

#include "wardrobe/eval.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "parallel.h"
#include "wardrobe/error.h"
#include "wardrobe/seeds.h"

namespace wardrobe {
namespace {

constexpr char kModule[] = "eval";

[[noreturn]] void Fail(const std::string& message) {
  throw ValidationError(kModule, message);
}

using Clock = std::chrono::steady_clock;

std::vector<std::string> Labels(const MetaOutfit& outfit) {
  std::vector<std::string> labels;
  for (const auto& [k, v] : outfit.meta) labels.push_back(k + "=" + v);
  return labels;
}

bool Exclusive(const ExclusivePairs& pairs, const std::string& a,
               const std::string& b) {
  for (const auto& [x, y] : pairs) {
    if ((x == a && y == b) || (x == b && y == a)) return true;
  }
  return false;
}

// Members ordered by layer; throws if two share a layer.
std::vector<GarmentIndex> Canonical(const Catalog& catalog,
                                    std::span<const GarmentIndex> members) {
  return BuildOutfit(catalog, members).members;
}

// Mean and population deviation, summed in sorted order so the result does
// not depend on input order.
double Deviation(std::vector<double> values) {
  if (values.size() < 2) return 0.0;
  std::sort(values.begin(), values.end());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return std::sqrt(var / static_cast<double>(values.size()));
}

}  // namespace

std::vector<MetaOutfit> OutfitsFromJson(const nlohmann::json& j,
                                        const Catalog& catalog) {
  std::vector<MetaOutfit> outfits;
  try {
    const nlohmann::json& list = j.is_object() ? j.at("outfits") : j;
    for (const auto& item : list) {
      MetaOutfit outfit;
      const nlohmann::json& ids = item.is_object() ? item.at("garments") : item;
      std::vector<GarmentIndex> members;
      for (const auto& id : ids) {
        members.push_back(catalog.Require(id.get<std::string>()));
      }
      outfit.members = Canonical(catalog, members);
      if (item.is_object() && item.contains("meta")) {
        for (const auto& [k, v] : item.at("meta").items()) {
          outfit.meta[k] = v.get<std::string>();
        }
      }
      outfits.push_back(std::move(outfit));
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(std::string("malformed outfit list: ") + e.what());
  }
  return outfits;
}

std::vector<MetaOutfit> LoadOutfits(const std::filesystem::path& path,
                                    const Catalog& catalog) {
  std::ifstream in(path);
  if (!in) Fail("cannot read outfit file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    Fail("cannot parse " + path.string() + ": " + e.what());
  }
  return OutfitsFromJson(j, catalog);
}

nlohmann::json OutfitsToJson(std::span<const MetaOutfit> outfits,
                             const Catalog& catalog) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& o : outfits) {
    std::vector<std::string> ids;
    for (GarmentIndex g : o.members) ids.push_back(catalog.garment(g).id);
    nlohmann::json item = {{"garments", ids}};
    if (!o.meta.empty()) item["meta"] = o.meta;
    list.push_back(std::move(item));
  }
  return {{"outfits", std::move(list)}};
}

ExclusivePairs ExclusivePairsFromJson(const nlohmann::json& j) {
  ExclusivePairs pairs;
  try {
    const nlohmann::json& list = j.is_object() ? j.at("exclusive") : j;
    for (const auto& p : list) {
      if (p.size() != 2) Fail("an exclusive pair needs exactly two labels");
      pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(std::string("malformed exclusive pairs: ") + e.what());
  }
  return pairs;
}

nlohmann::json ExclusivePairsToJson(const ExclusivePairs& pairs) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& [a, b] : pairs) list.push_back({a, b});
  return {{"exclusive", std::move(list)}};
}

LabeledOutfitSet GenerateNegatives(const Catalog& catalog,
                                   std::vector<MetaOutfit> positives,
                                   const ExclusivePairs& pairs, int ratio,
                                   std::uint64_t seed) {
  if (ratio < 0) Fail("ratio must be non-negative");
  std::set<std::vector<GarmentIndex>> positive_set;
  for (std::size_t s = 0; s < positives.size(); ++s) {
    auto& p = positives[s];
    p.members = Canonical(catalog, p.members);
    if (p.members.size() < 2) {
      Fail("positive #" + std::to_string(s) + " has fewer than two pieces");
    }
    if (p.meta.empty()) Fail("positive #" + std::to_string(s) + " has no meta-labels");
    positive_set.insert(p.members);
  }
  LabeledOutfitSet set;
  set.positives = std::move(positives);
  if (ratio == 0) return set;

  std::mt19937_64 rng(DeriveSeed(seed, kModule, "negatives"));
  const auto& pos = set.positives;
  for (std::size_t s = 0; s < pos.size(); ++s) {
    const auto labels = Labels(pos[s]);
    // Swap options per member position.
    std::vector<std::vector<Provenance>> options(pos[s].members.size());
    for (std::size_t q = 0; q < pos.size(); ++q) {
      if (q == s) continue;
      std::string source_label;
      std::string donor_label;
      for (const auto& a : labels) {
        for (const auto& b : Labels(pos[q])) {
          if (source_label.empty() && Exclusive(pairs, a, b)) {
            source_label = a;
            donor_label = b;
          }
        }
      }
      if (source_label.empty()) continue;
      for (std::size_t j = 0; j < pos[s].members.size(); ++j) {
        const GarmentIndex g = pos[s].members[j];
        const int layer = catalog.garment(g).layer;
        for (GarmentIndex h : pos[q].members) {
          if (h == g || catalog.garment(h).layer != layer) continue;
          std::vector<GarmentIndex> candidate = pos[s].members;
          candidate[j] = h;
          if (positive_set.count(candidate)) continue;
          options[j].push_back(
              {s, layer, g, h, q, source_label, donor_label});
        }
      }
    }
    for (std::size_t j = 0; j < options.size(); ++j) {
      if (options[j].empty()) {
        Fail("no exclusive-label donor for layer " +
             LayerName(catalog.garment(pos[s].members[j]).layer) +
             " of positive #" + std::to_string(s));
      }
    }
    std::uniform_int_distribution<std::size_t> pick_slot(0, options.size() - 1);
    for (int r = 0; r < ratio; ++r) {
      const auto& slot = options[pick_slot(rng)];
      std::uniform_int_distribution<std::size_t> pick(0, slot.size() - 1);
      const Provenance& chosen = slot[pick(rng)];
      std::vector<GarmentIndex> negative = pos[s].members;
      for (auto& g : negative) {
        if (g == chosen.removed) g = chosen.added;
      }
      set.negatives.push_back(std::move(negative));
      set.provenance.push_back(chosen);
    }
  }
  return set;
}

std::vector<std::string> AuditNegatives(const Catalog& catalog,
                                        const LabeledOutfitSet& set,
                                        const ExclusivePairs& pairs) {
  std::vector<std::string> problems;
  std::set<std::vector<GarmentIndex>> positive_set;
  for (const auto& p : set.positives) positive_set.insert(p.members);
  if (set.provenance.size() != set.negatives.size()) {
    problems.push_back("provenance and negatives differ in length");
    return problems;
  }
  for (std::size_t n = 0; n < set.negatives.size(); ++n) {
    const auto& neg = set.negatives[n];
    const Provenance& pr = set.provenance[n];
    const std::string where = "negative #" + std::to_string(n) + ": ";
    if (pr.source >= set.positives.size() || pr.donor >= set.positives.size()) {
      problems.push_back(where + "provenance index out of range");
      continue;
    }
    const MetaOutfit& source = set.positives[pr.source];
    const MetaOutfit& donor = set.positives[pr.donor];
    if (positive_set.count(neg)) problems.push_back(where + "equals a positive");
    if (neg.size() != source.members.size()) {
      problems.push_back(where + "size differs from its source");
      continue;
    }
    int changed = 0;
    for (std::size_t j = 0; j < neg.size(); ++j) {
      if (neg[j] == source.members[j]) continue;
      ++changed;
      if (source.members[j] != pr.removed || neg[j] != pr.added) {
        problems.push_back(where + "swap does not match provenance");
      }
      if (catalog.garment(neg[j]).layer != catalog.garment(pr.removed).layer ||
          catalog.garment(neg[j]).layer != pr.layer) {
        problems.push_back(where + "swapped piece changes layer");
      }
    }
    if (changed != 1) problems.push_back(where + "differs in " +
                                         std::to_string(changed) + " layers");
    if (std::find(donor.members.begin(), donor.members.end(), pr.added) ==
        donor.members.end()) {
      problems.push_back(where + "donor does not contain the added piece");
    }
    const auto sl = Labels(source);
    const auto dl = Labels(donor);
    if (std::find(sl.begin(), sl.end(), pr.source_label) == sl.end() ||
        std::find(dl.begin(), dl.end(), pr.donor_label) == dl.end() ||
        !Exclusive(pairs, pr.source_label, pr.donor_label)) {
      problems.push_back(where + "labels are not exclusive");
    }
  }
  return problems;
}

nlohmann::json LabeledToJson(const LabeledOutfitSet& set,
                             const Catalog& catalog) {
  auto ids = [&](std::span<const GarmentIndex> members) {
    std::vector<std::string> out;
    for (GarmentIndex g : members) out.push_back(catalog.garment(g).id);
    return out;
  };
  nlohmann::json negatives = nlohmann::json::array();
  for (std::size_t n = 0; n < set.negatives.size(); ++n) {
    const Provenance& pr = set.provenance[n];
    negatives.push_back(
        {{"garments", ids(set.negatives[n])},
         {"provenance",
          {{"source", pr.source},
           {"layer", LayerName(pr.layer)},
           {"removed", catalog.garment(pr.removed).id},
           {"added", catalog.garment(pr.added).id},
           {"donor", pr.donor},
           {"source_label", pr.source_label},
           {"donor_label", pr.donor_label}}}});
  }
  return {{"positives", OutfitsToJson(set.positives, catalog)["outfits"]},
          {"negatives", std::move(negatives)}};
}

LabeledOutfitSet LabeledFromJson(const nlohmann::json& j,
                                 const Catalog& catalog) {
  LabeledOutfitSet set;
  try {
    set.positives = OutfitsFromJson(j.at("positives"), catalog);
    for (const auto& item : j.at("negatives")) {
      std::vector<GarmentIndex> members;
      for (const auto& id : item.at("garments")) {
        members.push_back(catalog.Require(id.get<std::string>()));
      }
      set.negatives.push_back(Canonical(catalog, members));
      Provenance pr;
      if (item.contains("provenance")) {
        const auto& p = item.at("provenance");
        pr.source = p.at("source").get<std::size_t>();
        pr.layer = ParseLayer(p.at("layer").get<std::string>()).value_or(-1);
        pr.removed = catalog.Require(p.at("removed").get<std::string>());
        pr.added = catalog.Require(p.at("added").get<std::string>());
        pr.donor = p.at("donor").get<std::size_t>();
        pr.source_label = p.at("source_label").get<std::string>();
        pr.donor_label = p.at("donor_label").get<std::string>();
      }
      set.provenance.push_back(pr);
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(std::string("malformed labeled outfit set: ") + e.what());
  }
  return set;
}

PrCurve ComputePrCurve(std::span<const double> scores,
                       std::span<const int> labels) {
  if (scores.size() != labels.size()) Fail("scores and labels differ in size");
  std::size_t positives = 0;
  for (std::size_t n = 0; n < scores.size(); ++n) {
    if (std::isnan(scores[n])) Fail("score is NaN");
    if (labels[n] != 0 && labels[n] != 1) Fail("labels must be 0 or 1");
    positives += labels[n] == 1;
  }
  if (positives == 0 || positives == scores.size()) {
    Fail("precision/recall needs both positives and negatives");
  }
  std::vector<std::size_t> order(scores.size());
  for (std::size_t n = 0; n < order.size(); ++n) order[n] = n;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  PrCurve curve;
  std::size_t tp = 0;
  std::size_t fp = 0;
  double previous_recall = 0.0;
  for (std::size_t n = 0; n < order.size();) {
    const double threshold = scores[order[n]];
    for (; n < order.size() && scores[order[n]] == threshold; ++n) {
      (labels[order[n]] == 1 ? tp : fp) += 1;
    }
    const double precision =
        static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall =
        static_cast<double>(tp) / static_cast<double>(positives);
    curve.average_precision += (recall - previous_recall) * precision;
    previous_recall = recall;
    curve.points.push_back({threshold, precision, recall});
  }
  return curve;
}

CompatReport EvaluateCompat(const Catalog& catalog, const StyleModel& model,
                            const LabeledOutfitSet& set,
                            const InferenceConfig& inference,
                            std::uint64_t seed, int threads) {
  CompatReport report;
  report.positive_scores.resize(set.positives.size());
  report.negative_scores.resize(set.negatives.size());
  internal::ParallelFor(
      set.positives.size() + set.negatives.size(), threads, [&](std::size_t n) {
        if (n < set.positives.size()) {
          report.positive_scores[n] = OutfitLogLikelihood(
              catalog, model, set.positives[n].members, inference, seed);
        } else {
          const std::size_t m = n - set.positives.size();
          report.negative_scores[m] = OutfitLogLikelihood(
              catalog, model, set.negatives[m], inference, seed);
        }
      });
  std::vector<double> scores = report.positive_scores;
  scores.insert(scores.end(), report.negative_scores.begin(),
                report.negative_scores.end());
  std::vector<int> labels(report.positive_scores.size(), 1);
  labels.resize(scores.size(), 0);
  report.curve = ComputePrCurve(scores, labels);
  return report;
}

CapsuleScore GoldScore(const Catalog& catalog, const Capsule& capsule,
                       const std::vector<std::vector<GarmentIndex>>& gold,
                       const FeatureTable& features) {
  if (gold.empty()) Fail("gold set is empty");
  if (features.size() != catalog.size()) {
    Fail("feature table does not cover the catalog");
  }
  const auto outfits = CapsuleOutfitMembers(capsule);
  if (outfits.empty()) Fail("capsule is empty");
  const int d = features.dimension();
  auto embed = [&](std::span<const GarmentIndex> members) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d * catalog.num_layers());
    for (GarmentIndex g : members) {
      v.segment(catalog.garment(g).layer * d, d) = features.row(g);
    }
    return v;
  };
  std::vector<Eigen::VectorXd> gold_vectors;
  for (const auto& g : gold) gold_vectors.push_back(embed(g));

  CapsuleScore score;
  std::vector<double> gold_distances;
  for (std::size_t a = 0; a < gold_vectors.size(); ++a) {
    for (std::size_t b = a + 1; b < gold_vectors.size(); ++b) {
      gold_distances.push_back(features.Distance(gold_vectors[a], gold_vectors[b]));
    }
  }
  score.compatibility_sigma = Deviation(std::move(gold_distances));
  for (const auto& o : outfits) {
    const Eigen::VectorXd v = embed(o);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& g : gold_vectors) best = std::min(best, features.Distance(v, g));
    score.nearest.push_back(best);
  }
  std::vector<double> nearest = score.nearest;
  std::sort(nearest.begin(), nearest.end());
  for (double n : nearest) score.compatibility_distance += n;
  if (score.compatibility_sigma > 0) {
    score.compatibility_distance /= score.compatibility_sigma;
  }

  std::vector<double> layer_distances;
  for (int i = 0; i < catalog.num_layers(); ++i) {
    auto layer = catalog.layer(i);
    for (std::size_t a = 0; a < layer.size(); ++a) {
      for (std::size_t b = a + 1; b < layer.size(); ++b) {
        layer_distances.push_back(features.Distance(layer[a], layer[b]));
      }
    }
  }
  score.versatility_sigma = Deviation(std::move(layer_distances));
  for (int i = 0; i < capsule.num_layers(); ++i) {
    auto sel = capsule.selection(i);
    for (std::size_t a = 0; a < sel.size(); ++a) {
      for (std::size_t b = a + 1; b < sel.size(); ++b) {
        score.versatility_distance += features.Distance(sel[a], sel[b]);
      }
    }
  }
  if (score.versatility_sigma > 0) {
    score.versatility_distance /= score.versatility_sigma;
  }
  return score;
}

double LogLogSlope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    Fail("slope fit needs at least two points");
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    if (x[n] <= 0 || y[n] <= 0) Fail("slope fit needs positive values");
    mx += std::log(x[n]);
    my += std::log(y[n]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double dx = std::log(x[n]) - mx;
    sxy += dx * (std::log(y[n]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) Fail("slope fit needs distinct x values");
  return sxy / sxx;
}

SynthData BenchInstanceData(const BenchConfig& config, int num_layers,
                            int size, std::uint64_t seed) {
  SynthConfig s = config.synth;
  s.num_layers = num_layers;
  s.garments_per_layer = size;
  s.seed = DeriveSeed(seed, kModule, "bench-instance");
  s.corpus_size = 0;
  s.num_labeled = 0;
  s.num_gold = 0;
  s.num_user = 0;
  return Synthesize(s);
}

BenchReport BenchSolvers(const BenchConfig& config) {
  if (config.sizes.empty() || config.seeds.empty()) {
    Fail("bench needs at least one size and one seed");
  }
  BenchReport report;
  for (int size : config.sizes) {
    if (config.t > size) {
      Fail("t = " + std::to_string(config.t) + " exceeds size " +
           std::to_string(size));
    }
    for (std::uint64_t seed : config.seeds) {
      const SynthData data = BenchInstanceData(config, config.num_layers, size, seed);
      const ModelScorer scorer(data.catalog, data.model, data.threshold,
                               config.inference,
                               DeriveSeed(seed, kModule, "bench-scorer"));
      const std::vector<int> counts(config.num_layers, config.t);
      GreedyConfig greedy;
      greedy.counts = counts;
      greedy.epsilon = config.epsilon;
      greedy.max_sweeps = config.max_sweeps;
      greedy.threads = config.threads;

      BenchInstance instance{size, seed, {}};
      {
        const Objective objective(scorer);
        const SolveResult r = NaiveGreedy(data.catalog, objective, greedy);
        instance.runs.push_back({"naive", true, r.objective, std::nullopt,
                                 r.trace.evaluations, r.trace.sweeps,
                                 r.trace.wall_seconds, 0.0});
      }
      {
        const Objective objective(scorer);
        const SolveResult r = IterativeGreedy(data.catalog, objective, greedy);
        instance.runs.push_back({"iterative", true, r.objective, std::nullopt,
                                 r.trace.evaluations, r.trace.sweeps,
                                 r.trace.wall_seconds, 0.0});
      }
      if (config.include_optimal) {
        const Objective objective(scorer);
        SolverRun run{"optimal", true, 0.0, std::nullopt, 0, 0, 0.0, 0.0};
        try {
          const OptimalResult r =
              ExhaustiveOptimal(data.catalog, objective, counts, config.budget);
          run.objective = r.objective;
          run.evaluations = r.evaluations;
          run.wall_seconds = r.wall_seconds;
          run.ratio = 1.0;
        } catch (const BudgetExceededError& e) {
          run.ok = false;
          run.required = e.required();
        }
        if (run.ok && run.objective > 0) {
          for (auto& other : instance.runs) {
            other.ratio = other.objective / run.objective;
          }
        }
        instance.runs.push_back(run);
      }
      report.instances.push_back(std::move(instance));
    }
  }

  if (!config.slope_ts.empty()) {
    const SynthData data = BenchInstanceData(
        config, config.slope_layers, config.slope_size, config.seeds.front());
    const ModelScorer scorer(data.catalog, data.model, data.threshold,
                             config.inference,
                             DeriveSeed(config.seeds.front(), kModule,
                                        "slope-scorer"));
    // Counts are logical lookups, so one memo can serve every run.
    const Objective objective(scorer);
    std::vector<double> ts;
    std::vector<double> naive;
    std::vector<double> iterative;
    for (int t : config.slope_ts) {
      if (t > config.slope_size) Fail("slope t exceeds slope size");
      GreedyConfig greedy;
      greedy.counts.assign(config.slope_layers, t);
      greedy.epsilon = config.epsilon;
      greedy.max_sweeps = config.max_sweeps;
      greedy.threads = config.threads;
      const SolveResult n = NaiveGreedy(data.catalog, objective, greedy);
      const SolveResult it = IterativeGreedy(data.catalog, objective, greedy);
      // The first sweep starts from empty layers; later sweeps are the
      // steady state.
      const auto& sweeps = it.trace.sweep_evaluations;
      const std::uint64_t per_sweep = sweeps.size() > 1 ? sweeps[1] : sweeps[0];
      report.slope_points.push_back({t, n.trace.evaluations, per_sweep});
      ts.push_back(t);
      naive.push_back(static_cast<double>(n.trace.evaluations));
      iterative.push_back(static_cast<double>(per_sweep));
    }
    if (ts.size() >= 2) {
      report.naive_slope = LogLogSlope(ts, naive);
      report.iterative_sweep_slope = LogLogSlope(ts, iterative);
    }
  }
  return report;
}

nlohmann::json BenchToJson(const BenchReport& report, bool timings) {
  nlohmann::json instances = nlohmann::json::array();
  for (const auto& inst : report.instances) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : inst.runs) {
      nlohmann::json run = {{"solver", r.solver}, {"ok", r.ok}};
      if (r.ok) {
        run["objective"] = r.objective;
        run["evaluations"] = r.evaluations;
        if (r.ratio) run["ratio"] = *r.ratio;
        if (r.solver == "iterative") run["sweeps"] = r.sweeps;
        if (timings) run["wall_seconds"] = r.wall_seconds;
      } else {
        run["error"] = "budget_exceeded";
        run["required"] = r.required;
      }
      runs.push_back(std::move(run));
    }
    instances.push_back(
        {{"size", inst.size}, {"seed", inst.seed}, {"runs", std::move(runs)}});
  }

  // Per-size summary of the paired solver comparison.
  nlohmann::json summary = nlohmann::json::array();
  std::vector<int> sizes;
  for (const auto& inst : report.instances) {
    if (std::find(sizes.begin(), sizes.end(), inst.size) == sizes.end()) {
      sizes.push_back(inst.size);
    }
  }
  for (int size : sizes) {
    std::map<std::string, std::vector<double>> ratios;
    std::map<std::string, double> wall;
    int pairs = 0;
    int ge = 0;
    int gt = 0;
    for (const auto& inst : report.instances) {
      if (inst.size != size) continue;
      double naive = 0.0;
      double iterative = 0.0;
      for (const auto& r : inst.runs) {
        if (r.ratio) ratios[r.solver].push_back(*r.ratio);
        wall[r.solver] += r.wall_seconds;
        if (r.solver == "naive") naive = r.objective;
        if (r.solver == "iterative") iterative = r.objective;
      }
      ++pairs;
      ge += iterative >= naive;
      gt += iterative > naive;
    }
    nlohmann::json entry = {{"size", size},
                            {"instances", pairs},
                            {"iterative_ge_naive", ge},
                            {"iterative_gt_naive", gt}};
    for (auto& [solver, values] : ratios) {
      std::sort(values.begin(), values.end());
      const std::size_t mid = values.size() / 2;
      entry["median_ratio"][solver] =
          values.size() % 2 ? values[mid]
                            : 0.5 * (values[mid - 1] + values[mid]);
    }
    if (timings) entry["wall_seconds"] = wall;
    summary.push_back(std::move(entry));
  }

  nlohmann::json slope = nlohmann::json::array();
  for (const auto& p : report.slope_points) {
    slope.push_back({{"t", p.t},
                     {"naive_evaluations", p.naive},
                     {"iterative_sweep_evaluations", p.iterative_sweep}});
  }
  nlohmann::json out = {{"instances", std::move(instances)},
                        {"summary", std::move(summary)}};
  if (!report.slope_points.empty()) {
    out["complexity"] = {{"points", std::move(slope)},
                         {"naive_slope", report.naive_slope},
                         {"iterative_sweep_slope", report.iterative_sweep_slope}};
  }
  return out;
}

}  // namespace wardrobe
