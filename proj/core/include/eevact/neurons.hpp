// Copyright 2026 The eevact Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EEVACT_NEURONS_HPP_
#define EEVACT_NEURONS_HPP_

#include <cstdint>
#include <random>

#include "eevact/tensor.hpp"

namespace eevact {

// Where the adLIF adaptation variable reads the membrane for its coupling
// term a * u: the previous step's post-reset membrane v[t-1], or the current
// step's post-reset membrane v[t].
enum class AdlifCoupling { previous_membrane, current_membrane };

struct SpikeConfig {
  float threshold = 1.0f;
  Surrogate surrogate{};
  AdlifCoupling coupling = AdlifCoupling::previous_membrane;
};

// Decays are stored as unconstrained raw values r with decay = sigmoid(r).
// Projection keeps |r| <= kRawDecayLimit so the float sigmoid stays strictly
// inside (0, 1).
inline constexpr float kRawDecayLimit = 15.0f;
float raw_from_decay(float decay);

// PLIF: one trainable decay per layer.
struct PlifParams {
  Tensor raw_alpha;  // [1]

  static PlifParams make(float alpha = 0.9f);
  Tensor alpha() const;
  std::size_t parameter_count() const { return raw_alpha.numel(); }
  void project();
};

// adLIF: per-channel decays alpha_v, beta_w, coupling a in [0, 1] and spike
// feedback b in [0, 2].
struct AdlifParams {
  Tensor raw_alpha;  // [C]
  Tensor raw_beta;   // [C]
  Tensor a;          // [C]
  Tensor b;          // [C]

  static AdlifParams make(std::size_t channels, std::mt19937_64& rng, float alpha = 0.9f, float beta = 0.95f);
  std::size_t channels() const { return a.numel(); }
  std::size_t parameter_count() const { return 4 * channels(); }
  void project();
};

// Resolved adLIF coefficients for one forward pass.
struct AdlifCoefficients {
  Tensor alpha, beta, a, b;
};
AdlifCoefficients resolve(const AdlifParams& params);

struct PlifStep {
  Tensor v;  // post-reset membrane
  Tensor s;  // spikes in {0, 1}
};

// v' = alpha * v + (1 - alpha) * x; s = v' >= threshold; v' <- v' * (1 - s).
// alpha has shape [1]. Gradients flow through the update, the spike (via the
// surrogate) and the reset.
PlifStep plif_step(const Tensor& v, const Tensor& x, const Tensor& alpha, const SpikeConfig& config);

struct AdlifStep {
  Tensor v;
  Tensor w;
  Tensor s;
};

// v' = alpha * v + (1 - alpha) * (x - w); spike and reset as PLIF; then
// w' = beta * w + (1 - beta) * (a * u + b * s) with u chosen by config.coupling.
// Coefficients are [C] along dimension 1 of the state.
AdlifStep adlif_step(const Tensor& v, const Tensor& w, const Tensor& x, const AdlifCoefficients& coeffs,
                     const SpikeConfig& config);

// Leaky-integrator readout: linear projection then
// v' = alpha * v + (1 - alpha) * Linear(e), alpha per output class.
struct LiParams {
  Tensor weight;     // [C, F]
  Tensor bias;       // [C]
  Tensor raw_alpha;  // [C]

  static LiParams make(std::size_t in_features, std::size_t classes, std::mt19937_64& rng, float alpha = 0.9f);
  std::size_t parameter_count() const { return weight.numel() + bias.numel() + raw_alpha.numel(); }
  void project();
};

Tensor li_step(const Tensor& v, const Tensor& e, const LiParams& params, const Tensor& alpha);

}  // namespace eevact

#endif  // EEVACT_NEURONS_HPP_
