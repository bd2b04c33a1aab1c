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

#ifndef EEVACT_OPS_HPP_
#define EEVACT_OPS_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "eevact/tensor.hpp"

// Differentiable primitives. Every op validates shapes (ArgumentError on
// mismatch) and records a backward node when a tape is active and an input
// requires grad.
namespace eevact::ops {

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
// scale * a + shift
Tensor affine(const Tensor& a, float scale, float shift = 0.0f);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);

// Concatenates along `axis`; all other dimensions must agree.
Tensor concat(std::span<const Tensor> parts, std::size_t axis);
// Stacks equally shaped tensors along a new leading axis.
Tensor stack(std::span<const Tensor> parts);
// Rows [begin, end) of the leading axis.
Tensor slice(const Tensor& a, std::size_t begin, std::size_t end);
Tensor reshape(const Tensor& a, Shape shape);

// Reductions removing `axis`.
Tensor sum(const Tensor& a, std::size_t axis);
Tensor mean(const Tensor& a, std::size_t axis);
Tensor sum_all(const Tensor& a);
Tensor mean_all(const Tensor& a);

// Gradient barrier: same values, never tracked.
Tensor detach(const Tensor& a);

// input [N, F_in], weight [F_out, F_in], optional bias [F_out] -> [N, F_out]
Tensor linear(const Tensor& input, const Tensor& weight, const Tensor& bias = {});

// Cross-correlation; input [N, C_in, H, W], weight [C_out, C_in, k, k].
// Output size floor((H + 2 * padding - k) / stride) + 1.
Tensor conv2d(const Tensor& input, const Tensor& weight, int stride, int padding);

struct BatchNormStats {
  std::vector<float> running_mean;
  std::vector<float> running_var;
  float momentum = 0.1f;
  float eps = 1e-5f;

  static BatchNormStats identity(std::size_t channels);
};

enum class Mode { train, eval };

// Per-channel normalisation over every axis except 1 (input [N, C] or
// [N, C, H, W]). Train mode uses batch statistics and updates `stats`; eval
// mode uses the running statistics.
Tensor batch_norm(const Tensor& input, const Tensor& gamma, const Tensor& beta, BatchNormStats& stats,
                  Mode mode);

// Inverted dropout; identity in eval mode or when rate == 0.
Tensor dropout(const Tensor& input, float rate, std::mt19937_64& rng, Mode mode);

// Heaviside(v - threshold) with v == threshold mapping to 1. Backward uses the
// surrogate derivative.
Tensor spike(const Tensor& v, float threshold, const Surrogate& surrogate);

// c * H(c - theta) per unit; c [N, F], theta [F]. Values at or above the
// threshold pass through unchanged, everything else becomes 0.
Tensor event_gate(const Tensor& c, const Tensor& theta, const Surrogate& surrogate);

// alpha * v + (1 - alpha) * x with alpha of shape [1] or [C] (C = dim 1).
Tensor leaky_integrate(const Tensor& v, const Tensor& x, const Tensor& alpha);

// Mean softmax cross-entropy of logits [N, C] against integer labels.
Tensor cross_entropy(const Tensor& logits, std::span<const int> labels);

}  // namespace eevact::ops

#endif  // EEVACT_OPS_HPP_
