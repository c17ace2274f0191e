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

#ifndef WARDROBE_SRC_NUMERIC_H_
#define WARDROBE_SRC_NUMERIC_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <span>

#include <Eigen/Dense>

namespace wardrobe::internal {

inline constexpr double kLog2Pi = 1.8378770664093454836;

inline double LogSumExp(std::span<const double> x) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

inline double LogSumExp(const Eigen::VectorXd& x) {
  return LogSumExp(std::span<const double>(x.data(), x.size()));
}

inline Eigen::VectorXd Softmax(const Eigen::VectorXd& x) {
  const double lse = LogSumExp(x);
  return (x.array() - lse).exp().matrix();
}

// Index drawn proportionally to non-negative `weights` (not normalized).
template <typename Rng>
int SampleDiscrete(std::span<const double> weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
    u -= weights[k];
    if (u < 0.0) return static_cast<int>(k);
  }
  return static_cast<int>(weights.size()) - 1;
}

// log of a Gamma(shape, 1) draw, stable for small shapes.
template <typename Rng>
double LogGammaDraw(double shape, Rng& rng) {
  if (shape >= 1.0) {
    return std::log(std::gamma_distribution<double>(shape, 1.0)(rng));
  }
  const double g = std::gamma_distribution<double>(shape + 1.0, 1.0)(rng);
  const double u = std::uniform_real_distribution<double>(
      std::numeric_limits<double>::min(), 1.0)(rng);
  return std::log(g) + std::log(u) / shape;
}

// log Dir(x | a) given log x.
inline double LogDirichletDensity(const Eigen::VectorXd& log_x,
                                  const Eigen::VectorXd& a) {
  double r = std::lgamma(a.sum());
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    r += (a[k] - 1.0) * log_x[k] - std::lgamma(a[k]);
  }
  return r;
}

}  // namespace wardrobe::internal

#endif  // WARDROBE_SRC_NUMERIC_H_
