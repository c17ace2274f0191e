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

#ifndef WARDROBE_STYLE_MODEL_H_
#define WARDROBE_STYLE_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "wardrobe/catalog.h"

namespace wardrobe {

// Topic model over attribute bags. A "style" is a topic; an outfit is a
// document.
//
// Two priors over the per-document topic proportions are supported:
//  - kCtm: logistic normal, theta = softmax(eta), eta ~ N(mu, Sigma). Fitted
//    by variational EM; per-document posteriors are Gaussian in eta.
//  - kLda: Dirichlet(alpha). Fitted by collapsed Gibbs sampling.
enum class Variant { kLda, kCtm };

std::string VariantName(Variant v);
Variant ParseVariant(const std::string& name);

struct FitConfig {
  int num_topics = 30;
  Variant variant = Variant::kCtm;
  std::uint64_t seed = 0;
  // Gibbs sweeps for the LDA variant and for the LDA warm start of CTM.
  int iterations = 500;
  int burn_in = 200;
  // Post-burn-in phi estimates averaged into the LDA result.
  int sample_count = 10;
  // Dirichlet hyperparameters. alpha <= 0 means 1/K.
  double alpha = 0.0;
  double beta = 0.01;
  // CTM variational EM.
  int em_iterations = 100;
  double em_tolerance = 1e-5;
  int warm_start_iterations = 100;
};

// Per-document query settings.
struct InferenceConfig {
  // LDA theta: Gibbs draws kept after `theta_burn_in` sweeps.
  int theta_samples = 200;
  int theta_burn_in = 50;
  // Importance-sampling draws for the document likelihood.
  int likelihood_draws = 64;
  // Exact enumeration of topic assignments (LDA) is used when K^L is at
  // most this many terms.
  double exact_enumeration_limit = 4096;
};

struct FitReport {
  // Training objective after each EM iteration (CTM) or joint
  // log p(w, z) after each Gibbs sweep (LDA).
  std::vector<double> objective;
};

class StyleModel {
 public:
  StyleModel() = default;

  Variant variant() const { return variant_; }
  int num_topics() const { return static_cast<int>(phi_.rows()); }
  int vocab_size() const { return static_cast<int>(phi_.cols()); }
  // K x V, each row a distribution over attributes.
  const Eigen::MatrixXd& phi() const { return phi_; }
  const Eigen::VectorXd& mu() const { return mu_; }
  const Eigen::MatrixXd& sigma() const { return sigma_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  double beta() const { return beta_; }
  const std::vector<std::string>& vocab() const { return vocab_; }
  void set_vocab(std::vector<std::string> vocab) { vocab_ = std::move(vocab); }

  static StyleModel Ctm(Eigen::MatrixXd phi, Eigen::VectorXd mu,
                        Eigen::MatrixXd sigma, double beta);
  static StyleModel Lda(Eigen::MatrixXd phi, Eigen::VectorXd alpha,
                        double beta);

  // Cached derived quantities.
  const Eigen::MatrixXd& log_phi() const { return log_phi_; }
  const Eigen::MatrixXd& sigma_inverse() const { return sigma_inverse_; }
  double sigma_log_det() const { return sigma_log_det_; }

  // Throws ValidationError if any invariant fails.
  void Validate() const;

 private:
  void Finalize();

  Variant variant_ = Variant::kCtm;
  Eigen::MatrixXd phi_;
  Eigen::VectorXd mu_;
  Eigen::MatrixXd sigma_;
  Eigen::VectorXd alpha_;
  double beta_ = 0.01;
  std::vector<std::string> vocab_;

  Eigen::MatrixXd log_phi_;
  Eigen::MatrixXd sigma_inverse_;
  double sigma_log_det_ = 0.0;
};

// Fits a model to `corpus`. Deterministic in (corpus, config).
StyleModel Fit(const std::vector<AttributeBag>& corpus, int vocab_size,
               const FitConfig& config, FitReport* report = nullptr);

// Posterior-mean style composition. CTM: softmax of the variational mean;
// LDA: average over Gibbs draws seeded by `seed`.
Eigen::VectorXd InferTheta(const StyleModel& model, const AttributeBag& doc,
                           const InferenceConfig& config, std::uint64_t seed);

// Estimate of log p(doc | prior, phi) divided by the number of tokens.
double LogLikelihood(const StyleModel& model, const AttributeBag& doc,
                     const InferenceConfig& config, std::uint64_t seed);

struct DocumentScore {
  double log_likelihood = 0.0;  // as LogLikelihood
  Eigen::VectorXd theta;        // as InferTheta
};

// LogLikelihood and InferTheta together; CTM shares one posterior fit.
DocumentScore ScoreDocument(const StyleModel& model, const AttributeBag& doc,
                            const InferenceConfig& config,
                            std::uint64_t likelihood_seed,
                            std::uint64_t theta_seed);

// 1 iff `log_likelihood >= threshold`.
inline int CompatScore(double log_likelihood, double threshold) {
  return log_likelihood >= threshold ? 1 : 0;
}

// Reference step threshold for per-token log-likelihoods.
inline constexpr double kDefaultThreshold = -4.69;

// Mean style composition of a user's outfits.
Eigen::VectorXd UserPreference(const StyleModel& model,
                               const std::vector<AttributeBag>& outfits,
                               const InferenceConfig& config,
                               std::uint64_t seed);

nlohmann::json ModelToJson(const StyleModel& model);
StyleModel ModelFromJson(const nlohmann::json& j);
StyleModel LoadModel(const std::filesystem::path& path);

}  // namespace wardrobe

#endif  // WARDROBE_STYLE_MODEL_H_
