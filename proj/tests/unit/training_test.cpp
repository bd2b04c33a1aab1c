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

#include "eevact/training.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "eevact/error.hpp"
#include "oracles.hpp"

namespace eevact {
namespace {

using testing::random_tensor;

double ce_oracle(const std::vector<double>& logits, int label) {
  double m = logits[0];
  for (double v : logits) m = std::max(m, v);
  double z = 0.0;
  for (double v : logits) z += std::exp(v - m);
  return std::log(z) + m - logits[label];
}

// Mean over the batch of CE at the given steps, averaged over steps.
double tet_oracle(const Tensor& h, const std::vector<int>& y, const std::vector<std::size_t>& steps) {
  const std::size_t n = h.dim(1), c = h.dim(2);
  double total = 0.0;
  for (std::size_t t : steps) {
    for (std::size_t b = 0; b < n; ++b) {
      std::vector<double> row(c);
      for (std::size_t k = 0; k < c; ++k) row[k] = h[(t * n + b) * c + k];
      total += ce_oracle(row, y[b]);
    }
  }
  return total / static_cast<double>(steps.size() * n);
}

double cem_oracle(const Tensor& h, const std::vector<int>& y) {
  const std::size_t steps = h.dim(0), n = h.dim(1), c = h.dim(2);
  double total = 0.0;
  for (std::size_t b = 0; b < n; ++b) {
    std::vector<double> mean(c, 0.0);
    for (std::size_t t = 0; t < steps; ++t)
      for (std::size_t k = 0; k < c; ++k) mean[k] += h[(t * n + b) * c + k] / static_cast<double>(steps);
    total += ce_oracle(mean, y[b]);
  }
  return total / static_cast<double>(n);
}

TEST(LossSpec, SampleStepsFollowFloorRule) {
  for (std::size_t t = 1; t <= 64; ++t) {
    for (std::size_t n = 1; n <= t; ++n) {
      LossSpec spec;
      spec.tet_samples = n;
      const auto steps = spec.sample_steps(t);
      ASSERT_EQ(steps.size(), n);
      for (std::size_t i = 0; i < n; ++i) {
        ASSERT_EQ(steps[i], static_cast<std::size_t>(std::floor(static_cast<double>((i + 1) * t) / n)) - 1);
        if (i > 0) ASSERT_GT(steps[i], steps[i - 1]);
      }
      ASSERT_EQ(steps.back(), t - 1);
    }
  }
  LossSpec all;
  EXPECT_EQ(all.sample_steps(4), (std::vector<std::size_t>{0, 1, 2, 3}));
  LossSpec bad;
  bad.tet_samples = 5;
  EXPECT_THROW(bad.sample_steps(4), ArgumentError);
  bad.tet_samples = 0;
  EXPECT_THROW(bad.sample_steps(4), ArgumentError);
}

TEST(Loss, ValuesMatchOracles) {
  std::mt19937_64 rng(3);
  const Tensor h = random_tensor({6, 3, 4}, rng, 2.0f);
  const std::vector<int> y{1, 3, 0};
  const std::vector<std::size_t> steps{1, 3, 5};
  EXPECT_NEAR(loss_cem(h, y).item(), cem_oracle(h, y), 1e-5);
  EXPECT_NEAR(loss_tet(h, y, steps).item(), tet_oracle(h, y, steps), 1e-5);
  EXPECT_NEAR(loss_combined(h, y, steps).item(), cem_oracle(h, y) + tet_oracle(h, y, steps), 1e-5);
  LossSpec spec{LossKind::tet, 3};
  EXPECT_NEAR(compute_loss(spec, h, y).item(), tet_oracle(h, y, spec.sample_steps(6)), 1e-5);
  spec.kind = LossKind::cem;
  EXPECT_NEAR(compute_loss(spec, h, y).item(), cem_oracle(h, y), 1e-5);
}

TEST(Loss, GradientsMatchFiniteDifferences) {
  const std::vector<int> y{2, 0};
  const std::vector<std::size_t> steps{0, 2, 4};
  const std::vector<std::pair<const char*, testing::TensorFn>> losses{
      {"cem", [&](const auto& x) { return loss_cem(x[0], y); }},
      {"tet", [&](const auto& x) { return loss_tet(x[0], y, steps); }},
      {"combined", [&](const auto& x) { return loss_combined(x[0], y, steps); }},
  };
  for (const auto& [name, f] : losses) {
    for (int seed = 0; seed < 10; ++seed) {
      std::mt19937_64 rng(seed);
      EXPECT_LT(testing::check_gradient(f, {random_tensor({5, 2, 3}, rng, 1.5f)}, seed).worst, 1e-3)
          << name << " seed " << seed;
    }
  }
}

TEST(Loss, RejectsBadInputs) {
  const Tensor h = Tensor::zeros({4, 2, 3});
  EXPECT_THROW(loss_cem(h, std::vector<int>{0}), ArgumentError);
  EXPECT_THROW(loss_tet(h, std::vector<int>{0, 1}, std::vector<std::size_t>{}), ArgumentError);
  EXPECT_THROW(loss_tet(h, std::vector<int>{0, 1}, std::vector<std::size_t>{4}), ArgumentError);
  EXPECT_THROW(loss_cem(Tensor::zeros({2, 3}), std::vector<int>{0, 1}), ArgumentError);
  EXPECT_EQ(parse_loss_kind("combined"), LossKind::combined);
  EXPECT_THROW(parse_loss_kind("mse"), ArgumentError);
}

std::vector<EventStream> tiny_dataset(std::size_t per_class, std::uint64_t seed) {
  std::vector<EventStream> out;
  for (std::size_t i = 0; i < per_class; ++i) {
    for (int label : {0, 1}) {
      EventStream s = generate_synthetic(label ? Pattern::bar_right : Pattern::bar_left, {32, 32}, 40000, 40000.0,
                                         mix_seed(seed, 2 * i + label));
      s.label = label;
      out.push_back(std::move(s));
    }
  }
  return out;
}

TrainConfig tiny_train_config() {
  TrainConfig t;
  t.epochs = 2;
  t.batch_size = 4;
  t.window_us = 40000;
  t.eval_window_us = 40000;
  t.encoding = EncodingSpec{32, 32, 32, 2000};
  t.augment = AugmentSpec{1, 1.0, 1.0, 0.0};
  t.eval_time_chunk = 5;
  t.seed = 7;
  return t;
}

std::vector<std::vector<float>> snapshot(const Network& net) {
  std::vector<std::vector<float>> out;
  for (const ParamRef& p : net.parameters()) out.emplace_back(p.tensor.data().begin(), p.tensor.data().end());
  return out;
}

TEST(Train, ZeroLearningRateLeavesWeightsUnchanged) {
  Network net = Network::build(NetworkConfig::desk_scale(), 1);
  const auto before = snapshot(net);
  TrainConfig t = tiny_train_config();
  t.learning_rate = 0.0;
  const auto data = tiny_dataset(4, 1);
  const TrainResult r = train(net, data, data, t, LossSpec{});
  EXPECT_EQ(r.log.size(), 2u);
  EXPECT_EQ(snapshot(net), before);
}

TEST(Train, SeededRunsAreIdentical) {
  const auto data = tiny_dataset(4, 2);
  auto run = [&] {
    Network net = Network::build(NetworkConfig::desk_scale(), 3);
    const TrainResult r = train(net, data, data, tiny_train_config(), LossSpec{});
    return std::make_pair(r, snapshot(net));
  };
  const auto [a, wa] = run();
  const auto [b, wb] = run();
  EXPECT_EQ(wa, wb);
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(a.log[i].train_loss, b.log[i].train_loss);
    EXPECT_EQ(a.log[i].eval_top1, b.log[i].eval_top1);
    EXPECT_EQ(a.log[i].eval_top5, b.log[i].eval_top5);
    EXPECT_TRUE(std::isfinite(a.log[i].train_loss));
  }
}

TEST(Train, NonFiniteStateRaisesDivergence) {
  Network net = Network::build(NetworkConfig::desk_scale(), 1);
  for (ParamRef& p : net.parameters()) {
    if (p.name == "readout.bias") p.tensor.mutable_data()[0] = std::numeric_limits<float>::quiet_NaN();
  }
  const auto data = tiny_dataset(2, 1);
  EXPECT_THROW(train(net, data, data, tiny_train_config(), LossSpec{}), DivergenceError);
}

TEST(Train, ValidatesInputs) {
  Network net = Network::build(NetworkConfig::desk_scale(), 1);
  auto data = tiny_dataset(2, 1);
  TrainConfig t = tiny_train_config();
  t.epochs = 0;
  EXPECT_THROW(train(net, data, data, t, LossSpec{}), ValidationError);
  t = tiny_train_config();
  t.encoding.out_height = 16;
  EXPECT_THROW(train(net, data, data, t, LossSpec{}), ValidationError);
  t = tiny_train_config();
  data[0].label.reset();
  EXPECT_THROW(train(net, data, data, t, LossSpec{}), ValidationError);
  data[0].label = 5;
  EXPECT_THROW(train(net, data, data, t, LossSpec{}), ValidationError);
}

TEST(Train, MetricsCsv) {
  testing::TempDir dir("metrics");
  const std::vector<EpochMetrics> log{{1, 0.5, 0.25, 1.0, 2.0}, {2, 0.125, 0.75, 1.0, 1.5}};
  write_metrics_csv(log, dir / "m.csv");
  EXPECT_EQ(testing::read_file(dir / "m.csv"),
            "epoch,train_loss,eval_top1,eval_top5,wall_seconds\n1,0.5,0.25,1,2.000\n2,0.125,0.75,1,1.500\n");
}

TEST(Seeds, MixSeedSpreadsNeighbours) {
  EXPECT_EQ(mix_seed(1, 2), mix_seed(1, 2));
  EXPECT_NE(mix_seed(1, 2), mix_seed(2, 1));
  EXPECT_NE(mix_seed(0, 0), mix_seed(0, 1));
}

}  // namespace
}  // namespace eevact
