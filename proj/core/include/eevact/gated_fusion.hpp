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

#ifndef EEVACT_GATED_FUSION_HPP_
#define EEVACT_GATED_FUSION_HPP_

#include <random>

#include "eevact/tensor.hpp"

namespace eevact {

// Internal state c and the previous event output, both [N, F].
struct GatedState {
  Tensor c;
  Tensor e_prev;

  static GatedState zeros(std::size_t batch, std::size_t features);
};

struct GatedStep {
  GatedState state;
  Tensor e;  // events: c where c >= theta, else 0
  Tensor u;  // update gate
  Tensor z;  // candidate
  Tensor r;  // reset gate (EGRU only)
};

// Event-based gated unit. Gates read the input only:
//   u = sigmoid(W_u s + b_u), z = W_z s + b_z,
//   c' = u * c + (1 - u) * z - e_prev, e = c' * H(c' - theta).
struct EguParams {
  Tensor wu, bu;
  Tensor wz, bz;
  Tensor theta;  // [F], trainable unless fixed at construction

  static EguParams make(std::size_t in_features, std::size_t hidden, std::mt19937_64& rng, bool trainable_theta = true);
  std::size_t in_features() const { return wu.dim(1); }
  std::size_t hidden() const { return wu.dim(0); }
  std::size_t parameter_count() const;
  void project();
};

// Event-based GRU with input and recurrent maps:
//   u = sigmoid(W_u s + b_u + U_u c), r = sigmoid(W_r s + b_r + U_r c),
//   z = tanh(W_z s + b_z + U_z (r * c)),
//   c' = u * c + (1 - u) * z - e_prev, e = c' * H(c' - theta).
struct EgruParams {
  Tensor wu, bu, wr, br, wz, bz;
  Tensor uu, ur, uz;
  Tensor theta;

  static EgruParams make(std::size_t in_features, std::size_t hidden, std::mt19937_64& rng, bool trainable_theta = true);
  std::size_t in_features() const { return wu.dim(1); }
  std::size_t hidden() const { return wu.dim(0); }
  std::size_t parameter_count() const;
  void project();
};

GatedStep egu_step(const EguParams& params, const GatedState& state, const Tensor& s, const Surrogate& surrogate);
GatedStep egru_step(const EgruParams& params, const GatedState& state, const Tensor& s, const Surrogate& surrogate);

}  // namespace eevact

#endif  // EEVACT_GATED_FUSION_HPP_
