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

#include "eevact/gated_fusion.hpp"

#include <algorithm>
#include <cmath>

#include "eevact/error.hpp"
#include "eevact/ops.hpp"

namespace eevact {
namespace {

Tensor uniform_weight(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  const float bound = 1.0f / std::sqrt(static_cast<float>(cols));
  std::uniform_real_distribution<float> dist(-bound, bound);
  std::vector<float> w(rows * cols);
  for (float& x : w) x = dist(rng);
  return Tensor({rows, cols}, std::move(w), true);
}

std::size_t trainable(const Tensor& t) { return t.requires_grad() ? t.numel() : 0; }

void check_inputs(const GatedState& state, const Tensor& s, std::size_t in, std::size_t hidden, const char* op) {
  if (s.rank() != 2 || s.dim(1) != in) {
    throw ArgumentError(std::string(op) + ": input " + shape_str(s.shape()) + " does not have " + std::to_string(in) +
                        " features");
  }
  const Shape expected{s.dim(0), hidden};
  if (state.c.shape() != expected || state.e_prev.shape() != expected) {
    throw ArgumentError(std::string(op) + ": state shape " + shape_str(state.c.shape()) + " expected " +
                        shape_str(expected));
  }
}

// u * c + (1 - u) * z - e_prev, then the event gate.
GatedStep integrate(const GatedState& state, Tensor u, Tensor z, Tensor r, const Tensor& theta,
                    const Surrogate& surrogate) {
  const Tensor blend = ops::add(ops::mul(u, state.c), ops::mul(ops::affine(u, -1.0f, 1.0f), z));
  Tensor c = ops::sub(blend, state.e_prev);
  Tensor e = ops::event_gate(c, theta, surrogate);
  return {{c, e}, e, std::move(u), std::move(z), std::move(r)};
}

}  // namespace

GatedState GatedState::zeros(std::size_t batch, std::size_t features) {
  return {Tensor::zeros({batch, features}), Tensor::zeros({batch, features})};
}

EguParams EguParams::make(std::size_t in_features, std::size_t hidden, std::mt19937_64& rng, bool trainable_theta) {
  EguParams p;
  p.wu = uniform_weight(hidden, in_features, rng);
  p.bu = Tensor::zeros({hidden}, true);
  p.wz = uniform_weight(hidden, in_features, rng);
  p.bz = Tensor::zeros({hidden}, true);
  p.theta = Tensor::zeros({hidden}, trainable_theta);
  return p;
}

std::size_t EguParams::parameter_count() const {
  return wu.numel() + bu.numel() + wz.numel() + bz.numel() + trainable(theta);
}

void EguParams::project() {
  for (float& t : theta.mutable_data()) t = std::max(t, 0.0f);
}

EgruParams EgruParams::make(std::size_t in_features, std::size_t hidden, std::mt19937_64& rng, bool trainable_theta) {
  EgruParams p;
  p.wu = uniform_weight(hidden, in_features, rng);
  p.bu = Tensor::zeros({hidden}, true);
  p.wr = uniform_weight(hidden, in_features, rng);
  p.br = Tensor::zeros({hidden}, true);
  p.wz = uniform_weight(hidden, in_features, rng);
  p.bz = Tensor::zeros({hidden}, true);
  p.uu = uniform_weight(hidden, hidden, rng);
  p.ur = uniform_weight(hidden, hidden, rng);
  p.uz = uniform_weight(hidden, hidden, rng);
  p.theta = Tensor::zeros({hidden}, trainable_theta);
  return p;
}

std::size_t EgruParams::parameter_count() const {
  return wu.numel() + bu.numel() + wr.numel() + br.numel() + wz.numel() + bz.numel() + uu.numel() + ur.numel() +
         uz.numel() + trainable(theta);
}

void EgruParams::project() {
  for (float& t : theta.mutable_data()) t = std::max(t, 0.0f);
}

GatedStep egu_step(const EguParams& params, const GatedState& state, const Tensor& s, const Surrogate& surrogate) {
  check_inputs(state, s, params.in_features(), params.hidden(), "egu_step");
  Tensor u = ops::sigmoid(ops::linear(s, params.wu, params.bu));
  Tensor z = ops::linear(s, params.wz, params.bz);
  return integrate(state, std::move(u), std::move(z), {}, params.theta, surrogate);
}

GatedStep egru_step(const EgruParams& params, const GatedState& state, const Tensor& s, const Surrogate& surrogate) {
  check_inputs(state, s, params.in_features(), params.hidden(), "egru_step");
  Tensor u = ops::sigmoid(ops::add(ops::linear(s, params.wu, params.bu), ops::linear(state.c, params.uu)));
  Tensor r = ops::sigmoid(ops::add(ops::linear(s, params.wr, params.br), ops::linear(state.c, params.ur)));
  Tensor z = ops::tanh(ops::add(ops::linear(s, params.wz, params.bz), ops::linear(ops::mul(r, state.c), params.uz)));
  return integrate(state, std::move(u), std::move(z), std::move(r), params.theta, surrogate);
}

}  // namespace eevact
