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

#include "eevact/ops.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "eevact/error.hpp"
#include "oracles.hpp"

namespace eevact {
namespace {

using testing::check_gradient;
using testing::random_tensor;

constexpr int kSeeds = 10;
constexpr double kTol = 1e-3;

// Runs a gradient check for `kSeeds` seeds with freshly drawn inputs.
template <typename MakeInputs>
void expect_gradients(const char* what, const testing::TensorFn& f, MakeInputs make, double step = 1e-2,
                      const testing::ReferenceFn& reference = {}, std::vector<std::size_t> wrt = {}) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    const auto r = check_gradient(f, make(rng), seed, step, reference, wrt);
    EXPECT_LT(r.worst, kTol) << what << " seed " << seed << " input " << r.worst_input;
  }
}

auto shapes(std::vector<Shape> list, float scale = 1.0f) {
  return [list = std::move(list), scale](std::mt19937_64& rng) {
    std::vector<Tensor> out;
    for (const auto& s : list) out.push_back(random_tensor(s, rng, scale));
    return out;
  };
}

TEST(OpsGradient, Elementwise) {
  expect_gradients("add", [](const auto& x) { return ops::add(x[0], x[1]); }, shapes({{3, 4}, {3, 4}}));
  expect_gradients("sub", [](const auto& x) { return ops::sub(x[0], x[1]); }, shapes({{3, 4}, {3, 4}}));
  expect_gradients("mul", [](const auto& x) { return ops::mul(x[0], x[1]); }, shapes({{3, 4}, {3, 4}}));
  expect_gradients("affine", [](const auto& x) { return ops::affine(x[0], -1.7f, 0.3f); }, shapes({{5}}));
  expect_gradients("sigmoid", [](const auto& x) { return ops::sigmoid(x[0]); }, shapes({{4, 3}}, 2.0f));
  expect_gradients("tanh", [](const auto& x) { return ops::tanh(x[0]); }, shapes({{4, 3}}, 2.0f));
}

TEST(OpsGradient, Structural) {
  expect_gradients("concat0", [](const auto& x) { return ops::concat(x, 0); }, shapes({{2, 3}, {4, 3}}));
  expect_gradients("concat1", [](const auto& x) { return ops::concat(x, 1); }, shapes({{2, 3, 2}, {2, 1, 2}}));
  expect_gradients("stack", [](const auto& x) { return ops::stack(x); }, shapes({{2, 3}, {2, 3}, {2, 3}}));
  expect_gradients("slice", [](const auto& x) { return ops::slice(x[0], 1, 3); }, shapes({{4, 2}}));
  expect_gradients("reshape", [](const auto& x) { return ops::reshape(x[0], {6, 2}); }, shapes({{3, 4}}));
  expect_gradients("sum", [](const auto& x) { return ops::sum(x[0], 1); }, shapes({{2, 3, 4}}));
  expect_gradients("mean", [](const auto& x) { return ops::mean(x[0], 0); }, shapes({{3, 4}}));
  expect_gradients("sum_all", [](const auto& x) { return ops::sum_all(x[0]); }, shapes({{3, 4}}));
  expect_gradients("mean_all", [](const auto& x) { return ops::mean_all(x[0]); }, shapes({{3, 4}}));
}

TEST(OpsGradient, LinearAndConv) {
  expect_gradients("linear", [](const auto& x) { return ops::linear(x[0], x[1], x[2]); },
                   shapes({{3, 5}, {4, 5}, {4}}));
  expect_gradients("linear_nobias", [](const auto& x) { return ops::linear(x[0], x[1]); }, shapes({{2, 3}, {4, 3}}));
  expect_gradients("conv_s1", [](const auto& x) { return ops::conv2d(x[0], x[1], 1, 1); },
                   shapes({{2, 2, 5, 5}, {3, 2, 3, 3}}));
  expect_gradients("conv_s2", [](const auto& x) { return ops::conv2d(x[0], x[1], 2, 1); },
                   shapes({{2, 3, 6, 7}, {2, 3, 3, 3}}));
  expect_gradients("conv_nopad", [](const auto& x) { return ops::conv2d(x[0], x[1], 2, 0); },
                   shapes({{1, 2, 7, 7}, {2, 2, 3, 3}}));
}

TEST(OpsGradient, BatchNorm) {
  for (auto mode : {ops::Mode::train, ops::Mode::eval}) {
    expect_gradients(
        mode == ops::Mode::train ? "bn_train" : "bn_eval",
        [mode](const auto& x) {
          auto stats = ops::BatchNormStats::identity(3);
          stats.running_mean = {0.1f, -0.2f, 0.3f};
          stats.running_var = {0.5f, 1.5f, 2.0f};
          return ops::batch_norm(x[0], x[1], x[2], stats, mode);
        },
        shapes({{4, 3, 2, 2}, {3}, {3}}));
  }
}

TEST(OpsGradient, DropoutWithFixedMask) {
  expect_gradients(
      "dropout",
      [](const auto& x) {
        std::mt19937_64 rng(77);
        return ops::dropout(x[0], 0.3f, rng, ops::Mode::train);
      },
      shapes({{5, 6}}));
}

TEST(OpsGradient, LeakyIntegrate) {
  auto with_alpha = [](Shape alpha_shape) {
    return [alpha_shape](std::mt19937_64& rng) {
      std::uniform_real_distribution<float> u(0.05f, 0.95f);
      std::vector<float> a(shape_numel(alpha_shape));
      for (float& v : a) v = u(rng);
      return std::vector<Tensor>{random_tensor({2, 3, 2}, rng), random_tensor({2, 3, 2}, rng),
                                 Tensor(alpha_shape, a)};
    };
  };
  const testing::TensorFn f = [](const auto& x) { return ops::leaky_integrate(x[0], x[1], x[2]); };
  expect_gradients("li_scalar", f, with_alpha({1}));
  expect_gradients("li_channel", f, with_alpha({3}));
}

TEST(OpsGradient, CrossEntropy) {
  const std::vector<int> labels{2, 0, 3};
  expect_gradients("ce", [&](const auto& x) { return ops::cross_entropy(x[0], labels); }, shapes({{3, 4}}, 2.0f));
}

// Spike nodes: the taped gradient equals the finite-difference gradient of
// the same graph with the Heaviside replaced by the surrogate's primitive.
TEST(OpsGradient, SpikeMatchesSmoothedForward) {
  const Surrogate sg{2.0f};
  const testing::TensorFn hard = [sg](const auto& x) { return ops::spike(ops::linear(x[0], x[1]), 1.0f, sg); };
  const testing::ReferenceFn smooth = [](const auto& x) {
    const std::size_t n = x[0].dim(0), k = x[0].dim(1), m = x[1].dim(0);
    std::vector<double> out(n * m);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        double pre = 0.0;
        for (std::size_t q = 0; q < k; ++q) pre += static_cast<double>(x[0][i * k + q]) * x[1][j * k + q];
        out[i * m + j] = testing::smooth_step(pre - 1.0, 2.0);
      }
    }
    return out;
  };
  expect_gradients("spike", hard, shapes({{3, 4}, {5, 4}}, 0.7f), 1e-3, smooth);
}

TEST(OpsGradient, EventGateThresholdMatchesSmoothedForward) {
  const Surrogate sg{2.0f};
  const testing::TensorFn hard = [sg](const auto& x) { return ops::event_gate(x[0], x[1], sg); };
  const testing::ReferenceFn smooth = [](const auto& x) {
    std::vector<double> out(x[0].numel());
    const std::size_t f = x[1].numel();
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = x[0][i] * testing::smooth_step(static_cast<double>(x[0][i]) - x[1][i % f], 2.0);
    }
    return out;
  };
  auto make = [](std::mt19937_64& rng) {
    std::vector<Tensor> in{random_tensor({4, 3}, rng), random_tensor({3}, rng, 0.3f)};
    for (float& t : in[1].mutable_data()) t = std::abs(t);
    return in;
  };
  expect_gradients("event_gate_theta", hard, make, 1e-3, smooth, {1});
}

TEST(OpsGradient, EventGateStateUsesStraightThroughGate) {
  Tensor c({1, 3}, {0.5f, -0.2f, 0.05f}, true);
  Tensor theta({3}, {0.1f, 0.1f, 0.1f});
  const Surrogate sg{2.0f};
  Tape tape;
  {
    TapeScope scope(tape);
    tape.backward(ops::sum_all(ops::event_gate(c, theta, sg)));
  }
  const auto g = c.grad();
  for (std::size_t j = 0; j < 3; ++j) {
    const float v = c[j];
    const float expect = (v >= 0.1f ? 1.0f : 0.0f) + v * sg.derivative(v - 0.1f);
    EXPECT_NEAR(g[j], expect, 1e-6);
  }
}

TEST(Ops, ConvMatchesNaiveOracle) {
  std::mt19937_64 rng(5);
  for (int stride : {1, 2}) {
    for (int pad : {0, 1, 2}) {
      const Tensor x = random_tensor({2, 3, 9, 8}, rng);
      const Tensor w = random_tensor({4, 3, 3, 3}, rng);
      const Tensor y = ops::conv2d(x, w, stride, pad);
      const auto ref = testing::naive_conv2d(x, w, stride, pad);
      ASSERT_EQ(y.numel(), ref.size());
      EXPECT_EQ(y.dim(2), static_cast<std::size_t>((9 + 2 * pad - 3) / stride + 1));
      for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(y[i], ref[i], 1e-4);
    }
  }
}

TEST(Ops, CrossEntropyValue) {
  const Tensor logits({2, 3}, {1.0f, 2.0f, 3.0f, 0.0f, 0.0f, 0.0f});
  const std::vector<int> labels{0, 2};
  const double l0 = std::log(std::exp(1.0) + std::exp(2.0) + std::exp(3.0)) - 1.0;
  const double l1 = std::log(3.0);
  EXPECT_NEAR(ops::cross_entropy(logits, labels).item(), (l0 + l1) / 2.0, 1e-6);
  EXPECT_THROW(ops::cross_entropy(logits, std::vector<int>{0, 3}), ArgumentError);
}

TEST(Ops, BatchNormTracksRunningStatistics) {
  auto stats = ops::BatchNormStats::identity(1);
  const Tensor x({4, 1}, {1.0f, 2.0f, 3.0f, 4.0f});
  const Tensor y = ops::batch_norm(x, Tensor({1}, {1.0f}), Tensor({1}, {0.0f}), stats, ops::Mode::train);
  EXPECT_NEAR(stats.running_mean[0], 0.1f * 2.5f, 1e-6);
  EXPECT_NEAR(stats.running_var[0], 0.9f + 0.1f * (5.0f / 3.0f), 1e-6);
  double mean = 0.0;
  for (float v : y.data()) mean += v;
  EXPECT_NEAR(mean, 0.0, 1e-5);
}

TEST(Ops, DropoutRateAndScaling) {
  std::mt19937_64 rng(9);
  const Tensor x = Tensor::full({100000}, 1.0f);
  const Tensor y = ops::dropout(x, 0.25f, rng, ops::Mode::train);
  std::size_t zeros = 0;
  for (float v : y.data()) {
    if (v == 0.0f) ++zeros;
    else EXPECT_FLOAT_EQ(v, 1.0f / 0.75f);
  }
  EXPECT_NEAR(static_cast<double>(zeros) / 100000.0, 0.25, 0.01);
  EXPECT_EQ(ops::dropout(x, 0.25f, rng, ops::Mode::eval).data().data(), x.data().data());
  EXPECT_THROW(ops::dropout(x, 1.0f, rng, ops::Mode::train), ArgumentError);
}

TEST(Ops, ShapeErrors) {
  const Tensor a = Tensor::zeros({2, 3}), b = Tensor::zeros({3, 2});
  EXPECT_THROW(ops::add(a, b), ArgumentError);
  EXPECT_THROW(ops::linear(a, Tensor::zeros({4, 2})), ArgumentError);
  EXPECT_THROW(ops::slice(a, 1, 3), ArgumentError);
  EXPECT_THROW(ops::reshape(a, {4}), ArgumentError);
  EXPECT_THROW(ops::leaky_integrate(a, a, Tensor::zeros({2})), ArgumentError);
}

TEST(Tape, NoRecordingWithoutTapeOrGradInputs) {
  const Tensor a = Tensor::full({2}, 1.0f, true);
  EXPECT_FALSE(ops::sigmoid(a).requires_grad());
  Tape tape;
  TapeScope scope(tape);
  ops::sigmoid(Tensor::full({2}, 1.0f));
  EXPECT_EQ(tape.size(), 0u);
  ops::sigmoid(a);
  EXPECT_EQ(tape.size(), 1u);
}

TEST(Tape, GradientsAccumulateAcrossUses) {
  Tensor a({2}, {1.0f, 2.0f}, true);
  Tape tape;
  {
    TapeScope scope(tape);
    tape.backward(ops::sum_all(ops::add(ops::mul(a, a), a)));
  }
  EXPECT_EQ(a.grad(), (std::vector<float>{3.0f, 5.0f}));
}

TEST(Surrogate, PeakAndPrimitive) {
  const Surrogate sg{2.0f};
  EXPECT_NEAR(sg.derivative(0.0f), 1.0 / std::numbers::pi, 1e-7);
  for (double u : {-0.7, -0.1, 0.0, 0.2, 1.5}) {
    const double h = 1e-5;
    EXPECT_NEAR((sg.primitive(u + h) - sg.primitive(u - h)) / (2 * h), sg.derivative(static_cast<float>(u)), 1e-6);
  }
}

}  // namespace
}  // namespace eevact
