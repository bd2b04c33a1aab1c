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

#include "eevact/neurons.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "eevact/ops.hpp"
#include "oracles.hpp"

namespace eevact {
namespace {

using testing::random_tensor;

TEST(Plif, GeometricTrajectoryWithoutSpikes) {
  const float alpha = 0.83f;
  const SpikeConfig cfg;
  Tensor v = Tensor::zeros({1, 3});
  const Tensor x({1, 3}, {0.9f, -0.4f, 0.2f});
  const Tensor a = Tensor::scalar(alpha);
  for (int t = 1; t <= 100; ++t) {
    const auto step = plif_step(v, x, a, cfg);
    v = step.v;
    for (std::size_t i = 0; i < 3; ++i) {
      ASSERT_EQ(step.s[i], 0.0f);
      const double want = (1.0 - std::pow(static_cast<double>(alpha), t)) * x[i];
      ASSERT_NEAR(v[i], want, 1e-5) << "t=" << t;
    }
  }
}

TEST(Adlif, ClosedFormTrajectoryWithoutSpikes) {
  const std::vector<float> alpha{0.8f, 0.9f}, beta{0.95f, 0.7f}, a{0.6f, 1.0f};
  const Tensor x({1, 2}, {0.7f, 0.5f});
  AdlifCoefficients k{Tensor({2}, alpha), Tensor({2}, beta), Tensor({2}, a), Tensor({2}, {0.3f, 1.2f})};
  const SpikeConfig cfg;
  Tensor v = Tensor::zeros({1, 2}), w = Tensor::zeros({1, 2});
  std::vector<testing::AdlifClosedForm> ref;
  for (int c = 0; c < 2; ++c) ref.emplace_back(alpha[c], beta[c], a[c], x[c]);
  for (int t = 1; t <= 100; ++t) {
    const auto step = adlif_step(v, w, x, k, cfg);
    v = step.v;
    w = step.w;
    for (int c = 0; c < 2; ++c) {
      ASSERT_EQ(step.s[c], 0.0f);
      const auto [vr, wr] = ref[c].at(t);
      ASSERT_NEAR(v[c], vr, 1e-5) << "t=" << t << " c=" << c;
      ASSERT_NEAR(w[c], wr, 1e-5) << "t=" << t << " c=" << c;
    }
  }
}

TEST(Li, GeometricTrajectory) {
  std::mt19937_64 rng(3);
  LiParams p = LiParams::make(4, 3, rng, 0.75f);
  const Tensor e({2, 4}, {1, 0, 0.5f, 2, 0, 1, 1, 0});
  const Tensor alpha = ops::sigmoid(p.raw_alpha);
  const Tensor drive = ops::linear(e, p.weight, p.bias);
  Tensor v = Tensor::full({2, 3}, 0.4f);
  for (int t = 1; t <= 100; ++t) {
    v = li_step(v, e, p, alpha);
    for (std::size_t i = 0; i < v.numel(); ++i) {
      const double at = std::pow(static_cast<double>(alpha[i % 3]), t);
      ASSERT_NEAR(v[i], at * 0.4 + (1.0 - at) * drive[i], 1e-5) << "t=" << t;
    }
  }
}

TEST(Adlif, ReducesToPlifBitExactly) {
  std::mt19937_64 rng(11);
  const std::size_t channels = 4;
  const float alpha = 0.87f;
  const Tensor a_scalar = Tensor::scalar(alpha);
  AdlifCoefficients k{Tensor::full({channels}, alpha), Tensor::full({channels}, 0.6f), Tensor::zeros({channels}),
                      Tensor::zeros({channels})};
  const SpikeConfig cfg;
  Tensor vp = Tensor::zeros({3, channels, 2}), va = vp, w = vp;
  for (int t = 0; t < 200; ++t) {
    const Tensor x = random_tensor({3, channels, 2}, rng, 1.5f);
    const auto p = plif_step(vp, x, a_scalar, cfg);
    const auto q = adlif_step(va, w, x, k, cfg);
    ASSERT_EQ(std::vector<float>(p.v.data().begin(), p.v.data().end()),
              std::vector<float>(q.v.data().begin(), q.v.data().end()));
    ASSERT_EQ(std::vector<float>(p.s.data().begin(), p.s.data().end()),
              std::vector<float>(q.s.data().begin(), q.s.data().end()));
    vp = p.v;
    va = q.v;
    w = q.w;
  }
}

TEST(Neurons, ResetInvariantHolds) {
  std::mt19937_64 rng(21);
  const SpikeConfig cfg;
  AdlifParams ap = AdlifParams::make(3, rng, 0.7f);
  const auto k = resolve(ap);
  Tensor v = Tensor::zeros({2, 3}), va = v, w = v;
  std::size_t spikes = 0;
  for (int t = 0; t < 10000; ++t) {
    const Tensor x = random_tensor({2, 3}, rng, 2.0f);
    const auto p = plif_step(v, x, Tensor::scalar(0.6f), cfg);
    const auto q = adlif_step(va, w, x, k, cfg);
    for (std::size_t i = 0; i < 6; ++i) {
      ASSERT_EQ(p.v[i] * p.s[i], 0.0f);
      ASSERT_EQ(q.v[i] * q.s[i], 0.0f);
      spikes += static_cast<std::size_t>(p.s[i] + q.s[i]);
    }
    v = p.v;
    va = q.v;
    w = q.w;
  }
  EXPECT_GT(spikes, 1000u);
}

TEST(Neurons, ProjectionClampsTrainableRanges) {
  std::mt19937_64 rng(1);
  AdlifParams p = AdlifParams::make(2, rng);
  p.raw_alpha.mutable_data()[0] = 40.0f;
  p.a.mutable_data()[0] = -1.0f;
  p.b.mutable_data()[1] = 5.0f;
  p.project();
  EXPECT_EQ(p.raw_alpha[0], kRawDecayLimit);
  EXPECT_EQ(p.a[0], 0.0f);
  EXPECT_EQ(p.b[1], 2.0f);
  EXPECT_NEAR(ops::sigmoid(PlifParams::make(0.3f).raw_alpha).item(), 0.3f, 1e-6);
}

TEST(NeuronGradient, PlifSpikeMatchesSmoothedForward) {
  const SpikeConfig cfg;
  const testing::TensorFn hard = [cfg](const auto& x) { return plif_step(x[0], x[1], x[2], cfg).s; };
  const testing::ReferenceFn smooth = [](const auto& x) {
    const double a = x[2].item();
    std::vector<double> s(x[0].numel());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = testing::smooth_step(a * x[0][i] + (1.0 - a) * x[1][i] - 1.0, 2.0);
    return s;
  };
  for (int seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::vector<Tensor> in{random_tensor({2, 5}, rng), random_tensor({2, 5}, rng, 1.5f),
                           Tensor::scalar(0.2f + 0.06f * seed)};
    EXPECT_LT(testing::check_gradient(hard, in, seed, 1e-3, smooth).worst, 1e-3) << seed;
  }
}

TEST(NeuronGradient, AdlifSpikeMatchesSmoothedForward) {
  const SpikeConfig cfg;
  // inputs: v, w, x, alpha, beta, a, b
  const testing::TensorFn hard = [cfg](const auto& x) {
    return adlif_step(x[0], x[1], x[2], AdlifCoefficients{x[3], x[4], x[5], x[6]}, cfg).s;
  };
  const testing::ReferenceFn smooth = [](const auto& x) {
    std::vector<double> s(x[0].numel());
    const std::size_t c = x[3].numel();
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double al = x[3][i % c];
      s[i] = testing::smooth_step(al * x[0][i] + (1.0 - al) * (static_cast<double>(x[2][i]) - x[1][i]) - 1.0, 2.0);
    }
    return s;
  };
  for (int seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(0.1f, 0.9f);
    std::vector<Tensor> in{random_tensor({2, 3}, rng), random_tensor({2, 3}, rng, 0.5f),
                           random_tensor({2, 3}, rng, 1.5f)};
    for (int k = 0; k < 4; ++k) in.push_back(Tensor({3}, {u(rng), u(rng), u(rng)}));
    EXPECT_LT(testing::check_gradient(hard, in, seed, 1e-3, smooth, {0, 1, 2, 3}).worst, 1e-3) << seed;
  }
}

// The adaptation update sees the spike linearly through b * s: inputs that
// reach w through the spike are checked against the smoothed forward, while
// beta and b only see the spike's value and are exact on the hard forward.
TEST(NeuronGradient, AdlifAdaptationPath) {
  const SpikeConfig cfg;
  const testing::TensorFn hard = [cfg](const auto& x) {
    return adlif_step(x[0], x[1], x[2], AdlifCoefficients{x[3], x[4], x[5], x[6]}, cfg).w;
  };
  const testing::ReferenceFn smooth = [](const auto& x) {
    std::vector<double> w(x[0].numel());
    const std::size_t c = x[3].numel();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double al = x[3][i % c], be = x[4][i % c], a = x[5][i % c], b = x[6][i % c];
      const double s =
          testing::smooth_step(al * x[0][i] + (1.0 - al) * (static_cast<double>(x[2][i]) - x[1][i]) - 1.0, 2.0);
      w[i] = be * x[1][i] + (1.0 - be) * (a * x[0][i] + b * s);
    }
    return w;
  };
  for (int seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(0.1f, 0.9f);
    std::vector<Tensor> in{random_tensor({2, 3}, rng, 0.2f), random_tensor({2, 3}, rng, 0.2f),
                           random_tensor({2, 3}, rng, 0.2f)};
    for (int k = 0; k < 4; ++k) in.push_back(Tensor({3}, {u(rng), u(rng), u(rng)}));
    EXPECT_LT(testing::check_gradient(hard, in, seed, 1e-3, smooth, {0, 1, 2, 3, 5}).worst, 1e-3) << seed;
    EXPECT_LT(testing::check_gradient(hard, in, seed, 1e-2, {}, {4, 6}).worst, 1e-3) << seed;
  }
}

}  // namespace
}  // namespace eevact
