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

#include "wardrobe/style_model.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include <boost/math/special_functions/digamma.hpp>

#include "numeric.h"
#include "wardrobe/error.h"
#include "wardrobe/seeds.h"

namespace wardrobe {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using internal::kLog2Pi;
using internal::LogSumExp;

constexpr char kModule[] = "style_model";

[[noreturn]] void Fail(const std::string& message) {
  throw ValidationError(kModule, message);
}

// Bag of words collapsed to distinct ids with counts.
struct WordCounts {
  std::vector<AttributeId> words;
  std::vector<double> counts;
  double total = 0.0;
};

WordCounts Collapse(const AttributeBag& doc) {
  AttributeBag sorted(doc);
  std::sort(sorted.begin(), sorted.end());
  WordCounts wc;
  for (AttributeId a : sorted) {
    if (wc.words.empty() || wc.words.back() != a) {
      wc.words.push_back(a);
      wc.counts.push_back(0.0);
    }
    wc.counts.back() += 1.0;
  }
  wc.total = static_cast<double>(sorted.size());
  return wc;
}

void CheckDocument(const AttributeBag& doc, int vocab_size) {
  if (doc.empty()) Fail("empty document");
  for (AttributeId a : doc) {
    if (a >= static_cast<AttributeId>(vocab_size)) {
      Fail("attribute index " + std::to_string(a) +
           " out of range for vocabulary of size " +
           std::to_string(vocab_size));
    }
  }
}

// ---------------------------------------------------------------------------
// Correlated topic model: per-document variational posterior
//   q(eta) = N(lambda, diag(nu2)),  q(z_n) = Mult(phi_n),
// with the auxiliary bound parameter zeta on E[log sum exp(eta)].

struct CtmParams {
  const VectorXd& mu;
  const MatrixXd& sigma_inverse;
  double sigma_log_det;
  const MatrixXd& log_phi;
};

struct CtmPosterior {
  VectorXd lambda;
  VectorXd nu2;
  double zeta = 1.0;
  MatrixXd resp;  // distinct words x K
  double elbo = -std::numeric_limits<double>::infinity();
};

CtmPosterior InitialPosterior(const CtmParams& p, std::size_t num_words) {
  CtmPosterior q;
  q.lambda = p.mu;
  q.nu2 = VectorXd::Ones(p.mu.size());
  q.resp = MatrixXd::Constant(static_cast<Eigen::Index>(num_words),
                              p.mu.size(), 1.0 / p.mu.size());
  return q;
}

void UpdateZeta(CtmPosterior& q) {
  q.zeta = (q.lambda + 0.5 * q.nu2).array().exp().sum();
}

void UpdateResponsibilities(const CtmParams& p, const WordCounts& wc,
                            CtmPosterior& q) {
  const Eigen::Index k_count = q.lambda.size();
  VectorXd logits(k_count);
  for (std::size_t u = 0; u < wc.words.size(); ++u) {
    for (Eigen::Index k = 0; k < k_count; ++k) {
      logits[k] = q.lambda[k] + p.log_phi(k, wc.words[u]);
    }
    const double lse = LogSumExp(logits);
    q.resp.row(static_cast<Eigen::Index>(u)) =
        (logits.array() - lse).exp().matrix().transpose();
  }
}

// Part of the bound that depends on lambda, with zeta and nu2 held fixed.
double LambdaObjective(const CtmParams& p, const VectorXd& lambda,
                       const VectorXd& nu2, const VectorXd& word_mass,
                       double n_over_zeta) {
  const VectorXd d = lambda - p.mu;
  return -0.5 * d.dot(p.sigma_inverse * d) + word_mass.dot(lambda) -
         n_over_zeta * (lambda + 0.5 * nu2).array().exp().sum();
}

// Damped Newton ascent; the objective is concave in lambda.
void UpdateLambda(const CtmParams& p, const WordCounts& wc, CtmPosterior& q) {
  const VectorXd word_mass = q.resp.transpose() *
                             Eigen::Map<const VectorXd>(wc.counts.data(),
                                                        wc.counts.size());
  const double n_over_zeta = wc.total / q.zeta;
  double f = LambdaObjective(p, q.lambda, q.nu2, word_mass, n_over_zeta);
  for (int iter = 0; iter < 50; ++iter) {
    const VectorXd e = (q.lambda + 0.5 * q.nu2).array().exp();
    const VectorXd grad =
        -p.sigma_inverse * (q.lambda - p.mu) + word_mass - n_over_zeta * e;
    MatrixXd h = p.sigma_inverse;
    h.diagonal() += n_over_zeta * e;
    const VectorXd step = h.llt().solve(grad);
    const double slope = grad.dot(step);
    if (!(slope > 1e-12)) break;
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls) {
      const VectorXd candidate = q.lambda + t * step;
      const double fc =
          LambdaObjective(p, candidate, q.nu2, word_mass, n_over_zeta);
      if (std::isfinite(fc) && fc >= f + 1e-4 * t * slope) {
        q.lambda = candidate;
        f = fc;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
}

// Each nu2_k maximizes
//   h(v) = -0.5 P_kk v - (N / zeta) exp(lambda_k + v / 2) + 0.5 log v,
// which is concave; its derivative is strictly decreasing.
void UpdateNu2(const CtmParams& p, const WordCounts& wc, CtmPosterior& q) {
  const double n_over_zeta = wc.total / q.zeta;
  for (Eigen::Index k = 0; k < q.nu2.size(); ++k) {
    const double pkk = p.sigma_inverse(k, k);
    const double lk = q.lambda[k];
    auto deriv = [&](double v) {
      return -0.5 * pkk - 0.5 * n_over_zeta * std::exp(lk + 0.5 * v) +
             0.5 / v;
    };
    double lo = std::min(q.nu2[k], 1.0);
    while (deriv(lo) <= 0.0 && lo > 1e-300) lo *= 0.5;
    double hi = std::max(q.nu2[k], 1.0);
    while (deriv(hi) >= 0.0 && hi < 1e300) hi *= 2.0;
    double v = std::clamp(q.nu2[k], lo, hi);
    for (int iter = 0; iter < 100; ++iter) {
      const double g = deriv(v);
      if (g > 0.0) {
        lo = v;
      } else {
        hi = v;
      }
      const double curvature =
          -0.25 * n_over_zeta * std::exp(lk + 0.5 * v) - 0.5 / (v * v);
      double next = v - g / curvature;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - v) <= 1e-12 * v) {
        v = next;
        break;
      }
      v = next;
    }
    q.nu2[k] = v;
  }
}

double CtmElbo(const CtmParams& p, const WordCounts& wc,
               const CtmPosterior& q) {
  const Eigen::Index k_count = q.lambda.size();
  const VectorXd d = q.lambda - p.mu;
  double elbo = -0.5 * p.sigma_log_det - 0.5 * k_count * kLog2Pi -
                0.5 * (q.nu2.dot(p.sigma_inverse.diagonal()) +
                       d.dot(p.sigma_inverse * d));
  const double expected_norm =
      (q.lambda + 0.5 * q.nu2).array().exp().sum() / q.zeta - 1.0 +
      std::log(q.zeta);
  for (std::size_t u = 0; u < wc.words.size(); ++u) {
    const double c = wc.counts[u];
    for (Eigen::Index k = 0; k < k_count; ++k) {
      const double r = q.resp(static_cast<Eigen::Index>(u), k);
      if (r <= 0.0) continue;
      elbo += c * r * (q.lambda[k] + p.log_phi(k, wc.words[u]) - std::log(r));
    }
  }
  elbo -= wc.total * expected_norm;
  elbo += 0.5 * (q.nu2.array().log().sum() + k_count * (kLog2Pi + 1.0));
  return elbo;
}

// Coordinate ascent on the bound; every update is an exact or ascent step
// so the bound never decreases.
void OptimizePosterior(const CtmParams& p, const WordCounts& wc,
                       CtmPosterior& q, int max_iterations, double tolerance) {
  UpdateZeta(q);
  double previous = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iterations; ++iter) {
    UpdateResponsibilities(p, wc, q);
    UpdateLambda(p, wc, q);
    UpdateZeta(q);
    UpdateNu2(p, wc, q);
    UpdateZeta(q);
    q.elbo = CtmElbo(p, wc, q);
    if (std::abs(q.elbo - previous) <= tolerance * std::abs(q.elbo)) break;
    previous = q.elbo;
  }
}

// ---------------------------------------------------------------------------
// Collapsed Gibbs sampling for LDA.

struct GibbsState {
  int num_topics;
  int vocab_size;
  double beta;
  VectorXd alpha;
  std::vector<std::vector<int>> z;
  Eigen::MatrixXi doc_topic;    // D x K
  Eigen::MatrixXi topic_word;   // K x V
  Eigen::VectorXi topic_total;  // K
};

double JointLogLikelihood(const GibbsState& s) {
  const double vb = s.vocab_size * s.beta;
  double ll = 0.0;
  for (int k = 0; k < s.num_topics; ++k) {
    ll += std::lgamma(vb) - std::lgamma(s.topic_total[k] + vb);
    for (int v = 0; v < s.vocab_size; ++v) {
      const int n = s.topic_word(k, v);
      if (n > 0) ll += std::lgamma(n + s.beta) - std::lgamma(s.beta);
    }
  }
  const double a_sum = s.alpha.sum();
  for (Eigen::Index d = 0; d < s.doc_topic.rows(); ++d) {
    const int len = s.doc_topic.row(d).sum();
    ll += std::lgamma(a_sum) - std::lgamma(len + a_sum);
    for (int k = 0; k < s.num_topics; ++k) {
      const int n = s.doc_topic(d, k);
      if (n > 0) ll += std::lgamma(n + s.alpha[k]) - std::lgamma(s.alpha[k]);
    }
  }
  return ll;
}

MatrixXd PhiEstimate(const GibbsState& s) {
  MatrixXd phi(s.num_topics, s.vocab_size);
  for (int k = 0; k < s.num_topics; ++k) {
    const double denom = s.topic_total[k] + s.vocab_size * s.beta;
    for (int v = 0; v < s.vocab_size; ++v) {
      phi(k, v) = (s.topic_word(k, v) + s.beta) / denom;
    }
  }
  return phi;
}

// Runs `iterations` sweeps; calls `after_sweep(iteration, state)`.
template <typename Callback>
GibbsState RunGibbs(const std::vector<AttributeBag>& corpus, int vocab_size,
                    int num_topics, const VectorXd& alpha, double beta,
                    int iterations, std::uint64_t seed,
                    Callback&& after_sweep) {
  std::mt19937_64 rng(seed);
  GibbsState s{num_topics,
               vocab_size,
               beta,
               alpha,
               {},
               Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(corpus.size()),
                                     num_topics),
               Eigen::MatrixXi::Zero(num_topics, vocab_size),
               Eigen::VectorXi::Zero(num_topics)};
  std::uniform_int_distribution<int> pick(0, num_topics - 1);
  s.z.resize(corpus.size());
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    s.z[d].resize(corpus[d].size());
    for (std::size_t n = 0; n < corpus[d].size(); ++n) {
      const int k = pick(rng);
      s.z[d][n] = k;
      ++s.doc_topic(static_cast<Eigen::Index>(d), k);
      ++s.topic_word(k, corpus[d][n]);
      ++s.topic_total[k];
    }
  }
  const double vb = vocab_size * beta;
  std::vector<double> weights(num_topics);
  for (int iter = 0; iter < iterations; ++iter) {
    for (std::size_t d = 0; d < corpus.size(); ++d) {
      const auto di = static_cast<Eigen::Index>(d);
      for (std::size_t n = 0; n < corpus[d].size(); ++n) {
        const AttributeId w = corpus[d][n];
        int k = s.z[d][n];
        --s.doc_topic(di, k);
        --s.topic_word(k, w);
        --s.topic_total[k];
        for (int j = 0; j < num_topics; ++j) {
          weights[j] = (s.doc_topic(di, j) + alpha[j]) *
                       (s.topic_word(j, w) + beta) / (s.topic_total[j] + vb);
        }
        k = internal::SampleDiscrete(weights, rng);
        s.z[d][n] = k;
        ++s.doc_topic(di, k);
        ++s.topic_word(k, w);
        ++s.topic_total[k];
      }
    }
    after_sweep(iter, s);
  }
  return s;
}

VectorXd SymmetricAlpha(const FitConfig& config) {
  const double a = config.alpha > 0.0 ? config.alpha : 1.0 / config.num_topics;
  return VectorXd::Constant(config.num_topics, a);
}

StyleModel FitLda(const std::vector<AttributeBag>& corpus, int vocab_size,
                  const FitConfig& config, FitReport* report) {
  const VectorXd alpha = SymmetricAlpha(config);
  const int post = config.iterations - config.burn_in;
  const int lag = std::max(1, post / config.sample_count);
  MatrixXd phi_sum = MatrixXd::Zero(config.num_topics, vocab_size);
  int samples = 0;
  RunGibbs(corpus, vocab_size, config.num_topics, alpha, config.beta,
           config.iterations, DeriveSeed(config.seed, kModule, "lda-gibbs"),
           [&](int iter, const GibbsState& s) {
             if (report) report->objective.push_back(JointLogLikelihood(s));
             const int since = iter + 1 - config.burn_in;
             if (since > 0 && since % lag == 0 &&
                 samples < config.sample_count) {
               phi_sum += PhiEstimate(s);
               ++samples;
             }
           });
  if (samples == 0) Fail("no post-burn-in samples were collected");
  return StyleModel::Lda(phi_sum / samples, alpha, config.beta);
}

StyleModel FitCtm(const std::vector<AttributeBag>& corpus, int vocab_size,
                  const FitConfig& config, FitReport* report) {
  const int k_count = config.num_topics;
  const auto d_count = static_cast<double>(corpus.size());

  // Topics start from a short collapsed-Gibbs LDA run.
  MatrixXd phi;
  if (k_count == 1 || config.warm_start_iterations <= 0) {
    phi = MatrixXd::Constant(k_count, vocab_size, config.beta);
    for (const auto& doc : corpus) {
      for (AttributeId a : doc) phi.col(a).array() += 1.0;
    }
    std::mt19937_64 rng(DeriveSeed(config.seed, kModule, "ctm-init"));
    std::uniform_real_distribution<double> jitter(0.0, 1.0);
    if (k_count > 1) {
      for (Eigen::Index i = 0; i < phi.size(); ++i) {
        phi.data()[i] *= 1.0 + jitter(rng);
      }
    }
  } else {
    GibbsState s = RunGibbs(
        corpus, vocab_size, k_count, SymmetricAlpha(config), config.beta,
        config.warm_start_iterations,
        DeriveSeed(config.seed, kModule, "ctm-warm-start"),
        [](int, const GibbsState&) {});
    phi = PhiEstimate(s);
  }
  for (int k = 0; k < k_count; ++k) phi.row(k) /= phi.row(k).sum();

  VectorXd mu = VectorXd::Zero(k_count);
  MatrixXd sigma = MatrixXd::Identity(k_count, k_count);

  std::vector<WordCounts> docs;
  docs.reserve(corpus.size());
  for (const auto& doc : corpus) docs.push_back(Collapse(doc));
  std::vector<CtmPosterior> posts(docs.size());

  double previous = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < config.em_iterations; ++iter) {
    const MatrixXd log_phi = phi.array().log();
    Eigen::LDLT<MatrixXd> ldlt(sigma);
    const MatrixXd sigma_inverse =
        ldlt.solve(MatrixXd::Identity(k_count, k_count));
    const double log_det = ldlt.vectorD().array().log().sum();
    const CtmParams params{mu, sigma_inverse, log_det, log_phi};

    // E step, warm-started from the previous iteration's posteriors.
    VectorXd lambda_sum = VectorXd::Zero(k_count);
    MatrixXd second_moment = MatrixXd::Zero(k_count, k_count);
    MatrixXd word_counts = MatrixXd::Zero(k_count, vocab_size);
    double bound = 0.0;
    for (std::size_t d = 0; d < docs.size(); ++d) {
      if (posts[d].lambda.size() == 0) {
        posts[d] = InitialPosterior(params, docs[d].words.size());
      }
      OptimizePosterior(params, docs[d], posts[d], 100, 1e-8);
      const CtmPosterior& q = posts[d];
      bound += q.elbo;
      lambda_sum += q.lambda;
      second_moment += q.lambda * q.lambda.transpose();
      second_moment.diagonal() += q.nu2;
      for (std::size_t u = 0; u < docs[d].words.size(); ++u) {
        word_counts.col(docs[d].words[u]) +=
            docs[d].counts[u] *
            q.resp.row(static_cast<Eigen::Index>(u)).transpose();
      }
    }
    bound += config.beta * log_phi.sum();
    if (report) report->objective.push_back(bound);

    // M step.
    mu = lambda_sum / d_count;
    sigma = second_moment / d_count - mu * mu.transpose();
    sigma = 0.5 * (sigma + sigma.transpose());
    phi = word_counts.array() + config.beta;
    for (int k = 0; k < k_count; ++k) phi.row(k) /= phi.row(k).sum();

    if (std::abs(bound - previous) <= config.em_tolerance * std::abs(bound)) {
      break;
    }
    previous = bound;
  }
  return StyleModel::Ctm(std::move(phi), std::move(mu), std::move(sigma),
                         config.beta);
}

CtmParams ParamsOf(const StyleModel& m) {
  return CtmParams{m.mu(), m.sigma_inverse(), m.sigma_log_det(), m.log_phi()};
}

CtmPosterior CtmDocumentPosterior(const StyleModel& model,
                                  const WordCounts& wc) {
  const CtmParams params = ParamsOf(model);
  CtmPosterior q = InitialPosterior(params, wc.words.size());
  OptimizePosterior(params, wc, q, 200, 1e-8);
  return q;
}

// log p(doc | eta) for the collapsed bag.
double LogLikelihoodGivenLogTheta(const StyleModel& model,
                                  const WordCounts& wc,
                                  const VectorXd& log_theta) {
  double ll = 0.0;
  VectorXd terms(log_theta.size());
  for (std::size_t u = 0; u < wc.words.size(); ++u) {
    terms = log_theta + model.log_phi().col(wc.words[u]);
    ll += wc.counts[u] * LogSumExp(terms);
  }
  return ll;
}

// Importance sampling with a defensive mixture proposal: half the mass on the
// variational posterior with doubled variances, half on the prior. The prior
// component bounds the weights by 2 p(doc | eta).
double CtmLogLikelihood(const StyleModel& model, const WordCounts& wc,
                        const CtmPosterior& q, const InferenceConfig& config,
                        std::uint64_t seed) {
  const Eigen::Index k_count = q.lambda.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution use_prior(0.5);
  const VectorXd var = 2.0 * q.nu2;
  const VectorXd sd = var.array().sqrt();
  const MatrixXd prior_chol = Eigen::LLT<MatrixXd>(model.sigma()).matrixL();
  const double local_norm =
      -0.5 * k_count * kLog2Pi - 0.5 * var.array().log().sum();
  const double prior_norm =
      -0.5 * k_count * kLog2Pi - 0.5 * model.sigma_log_det();
  std::vector<double> log_weights(config.likelihood_draws);
  VectorXd eps(k_count);
  VectorXd eta(k_count);
  for (int s = 0; s < config.likelihood_draws; ++s) {
    for (Eigen::Index k = 0; k < k_count; ++k) eps[k] = normal(rng);
    if (use_prior(rng)) {
      eta = model.mu() + prior_chol * eps;
    } else {
      eta = q.lambda + sd.cwiseProduct(eps);
    }
    const VectorXd log_theta = eta.array() - LogSumExp(eta);
    const VectorXd d = eta - model.mu();
    const double log_prior =
        prior_norm - 0.5 * d.dot(model.sigma_inverse() * d);
    const double log_local =
        local_norm -
        0.5 * ((eta - q.lambda).array().square() / var.array()).sum();
    const double log_proposal =
        std::log(0.5) + LogSumExp(Eigen::Vector2d(log_prior, log_local));
    log_weights[s] = LogLikelihoodGivenLogTheta(model, wc, log_theta) +
                     log_prior - log_proposal;
  }
  return LogSumExp(log_weights) - std::log(config.likelihood_draws);
}

// Exact log p(doc | alpha, phi) by summing over all topic assignments.
double LdaExactLogLikelihood(const StyleModel& model, const AttributeBag& doc) {
  const int k_count = model.num_topics();
  const auto len = static_cast<int>(doc.size());
  const VectorXd& alpha = model.alpha();
  const double a_sum = alpha.sum();
  std::vector<int> z(len, 0);
  std::vector<int> counts(k_count, 0);
  counts[0] = len;
  std::vector<double> terms;
  const double base = std::lgamma(a_sum) - std::lgamma(a_sum + len);
  while (true) {
    double t = base;
    for (int n = 0; n < len; ++n) t += model.log_phi()(z[n], doc[n]);
    for (int k = 0; k < k_count; ++k) {
      if (counts[k] > 0) {
        t += std::lgamma(alpha[k] + counts[k]) - std::lgamma(alpha[k]);
      }
    }
    terms.push_back(t);
    int pos = 0;
    while (pos < len) {
      --counts[z[pos]];
      if (++z[pos] < k_count) {
        ++counts[z[pos]];
        break;
      }
      z[pos] = 0;
      ++counts[0];
      ++pos;
    }
    if (pos == len) break;
  }
  return LogSumExp(terms);
}

// Variational Dirichlet posterior used as the importance proposal.
VectorXd LdaVariationalGamma(const StyleModel& model, const WordCounts& wc) {
  const int k_count = model.num_topics();
  VectorXd gamma = model.alpha().array() + wc.total / k_count;
  VectorXd logits(k_count);
  for (int iter = 0; iter < 200; ++iter) {
    VectorXd next = model.alpha();
    VectorXd dig(k_count);
    for (int k = 0; k < k_count; ++k) {
      dig[k] = boost::math::digamma(gamma[k]);
    }
    for (std::size_t u = 0; u < wc.words.size(); ++u) {
      logits = dig + model.log_phi().col(wc.words[u]);
      next += wc.counts[u] * (logits.array() - LogSumExp(logits)).exp().matrix();
    }
    const double change = (next - gamma).cwiseAbs().maxCoeff();
    gamma = next;
    if (change < 1e-8) break;
  }
  return gamma;
}

// Defensive mixture proposal as for the CTM: half the draws come from the
// variational Dirichlet, half from the prior.
double LdaSampledLogLikelihood(const StyleModel& model, const WordCounts& wc,
                               const InferenceConfig& config,
                               std::uint64_t seed) {
  const VectorXd gamma = LdaVariationalGamma(model, wc);
  const VectorXd& alpha = model.alpha();
  const int k_count = model.num_topics();
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution use_prior(0.5);
  std::vector<double> log_weights(config.likelihood_draws);
  VectorXd log_g(k_count);
  for (int s = 0; s < config.likelihood_draws; ++s) {
    const VectorXd& shape = use_prior(rng) ? alpha : gamma;
    for (int k = 0; k < k_count; ++k) {
      log_g[k] = internal::LogGammaDraw(shape[k], rng);
    }
    const VectorXd log_theta = log_g.array() - LogSumExp(log_g);
    const double log_prior = internal::LogDirichletDensity(log_theta, alpha);
    const double log_local = internal::LogDirichletDensity(log_theta, gamma);
    const double log_proposal =
        std::log(0.5) + LogSumExp(Eigen::Vector2d(log_prior, log_local));
    log_weights[s] = LogLikelihoodGivenLogTheta(model, wc, log_theta) +
                     log_prior - log_proposal;
  }
  return LogSumExp(log_weights) - std::log(config.likelihood_draws);
}

VectorXd LdaGibbsTheta(const StyleModel& model, const AttributeBag& doc,
                       const InferenceConfig& config, std::uint64_t seed) {
  const int k_count = model.num_topics();
  const VectorXd& alpha = model.alpha();
  std::mt19937_64 rng(seed);
  std::vector<double> weights(k_count);
  std::vector<int> z(doc.size());
  std::vector<int> counts(k_count, 0);
  for (std::size_t n = 0; n < doc.size(); ++n) {
    for (int k = 0; k < k_count; ++k) {
      weights[k] = alpha[k] * model.phi()(k, doc[n]);
    }
    z[n] = internal::SampleDiscrete(weights, rng);
    ++counts[z[n]];
  }
  const double denom = static_cast<double>(doc.size()) + alpha.sum();
  VectorXd theta = VectorXd::Zero(k_count);
  const int total = config.theta_burn_in + config.theta_samples;
  for (int sweep = 0; sweep < total; ++sweep) {
    for (std::size_t n = 0; n < doc.size(); ++n) {
      --counts[z[n]];
      for (int k = 0; k < k_count; ++k) {
        weights[k] = (counts[k] + alpha[k]) * model.phi()(k, doc[n]);
      }
      z[n] = internal::SampleDiscrete(weights, rng);
      ++counts[z[n]];
    }
    if (sweep >= config.theta_burn_in) {
      for (int k = 0; k < k_count; ++k) {
        theta[k] += (counts[k] + alpha[k]) / denom;
      }
    }
  }
  return theta / theta.sum();
}

std::vector<double> Flatten(const MatrixXd& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  }
  return out;
}

MatrixXd Unflatten(const std::vector<double>& v, Eigen::Index rows,
                   Eigen::Index cols, const char* what) {
  if (static_cast<Eigen::Index>(v.size()) != rows * cols) {
    Fail(std::string("model field ") + what + " has " +
         std::to_string(v.size()) + " entries, expected " +
         std::to_string(rows * cols));
  }
  MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = v[r * cols + c];
  }
  return m;
}

}  // namespace

std::string VariantName(Variant v) { return v == Variant::kCtm ? "ctm" : "lda"; }

Variant ParseVariant(const std::string& name) {
  if (name == "ctm") return Variant::kCtm;
  if (name == "lda") return Variant::kLda;
  Fail("unknown model variant \"" + name + "\" (expected ctm or lda)");
}

StyleModel StyleModel::Ctm(MatrixXd phi, VectorXd mu, MatrixXd sigma,
                           double beta) {
  StyleModel m;
  m.variant_ = Variant::kCtm;
  m.phi_ = std::move(phi);
  m.mu_ = std::move(mu);
  m.sigma_ = std::move(sigma);
  m.beta_ = beta;
  m.Finalize();
  return m;
}

StyleModel StyleModel::Lda(MatrixXd phi, VectorXd alpha, double beta) {
  StyleModel m;
  m.variant_ = Variant::kLda;
  m.phi_ = std::move(phi);
  m.alpha_ = std::move(alpha);
  m.beta_ = beta;
  m.Finalize();
  return m;
}

void StyleModel::Finalize() {
  Validate();
  log_phi_ = phi_.array().log();
  if (variant_ == Variant::kCtm) {
    const Eigen::Index k = sigma_.rows();
    MatrixXd s = sigma_;
    // A singular (PSD but not PD) covariance gets the smallest ridge that
    // makes it factorizable.
    double ridge = 0.0;
    for (int attempt = 0; attempt < 60; ++attempt) {
      Eigen::LLT<MatrixXd> llt(s);
      if (llt.info() == Eigen::Success) {
        sigma_inverse_ = llt.solve(MatrixXd::Identity(k, k));
        sigma_log_det_ =
            2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
        return;
      }
      ridge = ridge == 0.0 ? 1e-12 * std::max(1.0, sigma_.trace() / k)
                           : ridge * 10.0;
      s = sigma_ + ridge * MatrixXd::Identity(k, k);
    }
    Fail("covariance is not positive semi-definite");
  }
}

void StyleModel::Validate() const {
  if (phi_.rows() < 1 || phi_.cols() < 1) Fail("phi must be non-empty");
  if ((phi_.array() < 0.0).any()) Fail("phi has negative entries");
  for (Eigen::Index k = 0; k < phi_.rows(); ++k) {
    if (std::abs(phi_.row(k).sum() - 1.0) > 1e-9) {
      Fail("phi row " + std::to_string(k) + " does not sum to 1");
    }
  }
  if (variant_ == Variant::kCtm) {
    const Eigen::Index k = phi_.rows();
    if (mu_.size() != k || sigma_.rows() != k || sigma_.cols() != k) {
      Fail("mu/sigma dimensions do not match K");
    }
    const double scale = std::max(1.0, sigma_.cwiseAbs().maxCoeff());
    if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      Fail("sigma is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sigma_, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-9 * scale) {
      Fail("sigma is not positive semi-definite");
    }
  } else {
    if (alpha_.size() != phi_.rows()) Fail("alpha dimension does not match K");
    if ((alpha_.array() <= 0.0).any()) Fail("alpha must be positive");
  }
}

StyleModel Fit(const std::vector<AttributeBag>& corpus, int vocab_size,
               const FitConfig& config, FitReport* report) {
  if (corpus.empty()) Fail("empty corpus");
  if (config.num_topics < 1) Fail("number of topics must be at least 1");
  if (vocab_size < 1) Fail("vocabulary must be non-empty");
  if (config.beta <= 0.0) Fail("beta must be positive");
  for (const auto& doc : corpus) CheckDocument(doc, vocab_size);
  if (config.variant == Variant::kLda) {
    if (config.burn_in < 0 || config.burn_in >= config.iterations) {
      Fail("burn-in must be smaller than the iteration count");
    }
    if (config.sample_count < 1) Fail("sample count must be at least 1");
    return FitLda(corpus, vocab_size, config, report);
  }
  return FitCtm(corpus, vocab_size, config, report);
}

Eigen::VectorXd InferTheta(const StyleModel& model, const AttributeBag& doc,
                           const InferenceConfig& config, std::uint64_t seed) {
  CheckDocument(doc, model.vocab_size());
  if (model.num_topics() == 1) return VectorXd::Ones(1);
  if (model.variant() == Variant::kCtm) {
    return internal::Softmax(CtmDocumentPosterior(model, Collapse(doc)).lambda);
  }
  return LdaGibbsTheta(model, doc, config, seed);
}

DocumentScore ScoreDocument(const StyleModel& model, const AttributeBag& doc,
                            const InferenceConfig& config,
                            std::uint64_t likelihood_seed,
                            std::uint64_t theta_seed) {
  if (model.variant() != Variant::kCtm || model.num_topics() == 1) {
    return {LogLikelihood(model, doc, config, likelihood_seed),
            InferTheta(model, doc, config, theta_seed)};
  }
  CheckDocument(doc, model.vocab_size());
  const WordCounts wc = Collapse(doc);
  const CtmPosterior q = CtmDocumentPosterior(model, wc);
  return {CtmLogLikelihood(model, wc, q, config, likelihood_seed) /
              static_cast<double>(doc.size()),
          internal::Softmax(q.lambda)};
}

double LogLikelihood(const StyleModel& model, const AttributeBag& doc,
                     const InferenceConfig& config, std::uint64_t seed) {
  CheckDocument(doc, model.vocab_size());
  const auto len = static_cast<double>(doc.size());
  const WordCounts wc = Collapse(doc);
  if (model.num_topics() == 1) {
    return LogLikelihoodGivenLogTheta(model, wc, VectorXd::Zero(1)) / len;
  }
  if (model.variant() == Variant::kCtm) {
    return CtmLogLikelihood(model, wc, CtmDocumentPosterior(model, wc), config,
                            seed) /
           len;
  }
  if (len * std::log(model.num_topics()) <=
      std::log(config.exact_enumeration_limit)) {
    return LdaExactLogLikelihood(model, doc) / len;
  }
  return LdaSampledLogLikelihood(model, wc, config, seed) / len;
}

Eigen::VectorXd UserPreference(const StyleModel& model,
                               const std::vector<AttributeBag>& outfits,
                               const InferenceConfig& config,
                               std::uint64_t seed) {
  if (outfits.empty()) Fail("user preference needs at least one outfit");
  VectorXd w = VectorXd::Zero(model.num_topics());
  for (std::size_t i = 0; i < outfits.size(); ++i) {
    const std::uint32_t index[] = {static_cast<std::uint32_t>(i)};
    w += InferTheta(model, outfits[i], config, DeriveSeed(seed, index));
  }
  w /= static_cast<double>(outfits.size());
  return w / w.sum();
}

nlohmann::json ModelToJson(const StyleModel& model) {
  nlohmann::json j = {{"variant", VariantName(model.variant())},
                      {"K", model.num_topics()},
                      {"V", model.vocab_size()},
                      {"phi", Flatten(model.phi())},
                      {"beta", model.beta()},
                      {"vocab", model.vocab()}};
  if (model.variant() == Variant::kCtm) {
    j["mu"] = std::vector<double>(model.mu().data(),
                                  model.mu().data() + model.mu().size());
    j["sigma"] = Flatten(model.sigma());
  } else {
    j["alpha"] = std::vector<double>(
        model.alpha().data(), model.alpha().data() + model.alpha().size());
  }
  return j;
}

StyleModel ModelFromJson(const nlohmann::json& j) {
  try {
    const Variant variant = ParseVariant(j.at("variant").get<std::string>());
    const int k = j.at("K").get<int>();
    const int v = j.at("V").get<int>();
    if (k < 1 || v < 1) Fail("model K and V must be positive");
    MatrixXd phi = Unflatten(j.at("phi").get<std::vector<double>>(), k, v,
                             "phi");
    const double beta = j.at("beta").get<double>();
    StyleModel model;
    if (variant == Variant::kCtm) {
      const auto mu = j.at("mu").get<std::vector<double>>();
      if (static_cast<int>(mu.size()) != k) Fail("model field mu has wrong size");
      model = StyleModel::Ctm(
          std::move(phi), Eigen::Map<const VectorXd>(mu.data(), k),
          Unflatten(j.at("sigma").get<std::vector<double>>(), k, k, "sigma"),
          beta);
    } else {
      const auto alpha = j.at("alpha").get<std::vector<double>>();
      if (static_cast<int>(alpha.size()) != k) {
        Fail("model field alpha has wrong size");
      }
      model = StyleModel::Lda(std::move(phi),
                              Eigen::Map<const VectorXd>(alpha.data(), k), beta);
    }
    if (j.contains("vocab")) {
      auto vocab = j.at("vocab").get<std::vector<std::string>>();
      if (!vocab.empty() && static_cast<int>(vocab.size()) != v) {
        Fail("model vocabulary size does not match V");
      }
      model.set_vocab(std::move(vocab));
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    Fail(std::string("malformed model: ") + e.what());
  }
}

StyleModel LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail("cannot read model file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    Fail("cannot parse model file " + path.string() + ": " + e.what());
  }
  return ModelFromJson(j);
}

}  // namespace wardrobe
