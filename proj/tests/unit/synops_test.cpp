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

#include "eevact/synops.hpp"

#include <gtest/gtest.h>

#include "eevact/error.hpp"
#include "eevact/network.hpp"
#include "eevact/preprocess.hpp"
#include "oracles.hpp"

namespace eevact {
namespace {

std::vector<FrameSequence> tiny_batch() {
  std::vector<FrameSequence> out;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const EventStream s = generate_synthetic(seed % 2 ? Pattern::bar_right : Pattern::bar_left, {32, 32}, 40000,
                                             40000.0, seed);
    out.push_back(encode(s, EncodingSpec{32, 32, 32, 2000}, 0, 40000));
  }
  return out;
}

class SynOpsOracleTest : public ::testing::TestWithParam<std::tuple<FusionKind, NeuronKind>> {};

TEST_P(SynOpsOracleTest, EffectiveCountsEqualActivityMaskBruteForce) {
  NetworkConfig c = NetworkConfig::desk_scale();
  c.fusion = std::get<0>(GetParam());
  c.neuron = std::get<1>(GetParam());
  // Lower threshold so every layer carries spikes.
  c.threshold = 0.3f;
  Network net = Network::build(c, 4);
  const auto batch = tiny_batch();
  const ForwardTrace tr = net.forward(batch, ops::Mode::eval, TraceOptions{true, 1});
  ASSERT_EQ(tr.steps, 20u);

  const testing::SynOpsOracle oracle = testing::synops_from_activity(tr, net);
  EXPECT_EQ(tr.synops, oracle.ops);

  const SynOpsReport r = count_synops(tr, net);
  EXPECT_NEAR(r.macs * 3.0, static_cast<double>(oracle.macs), 1e-9 * static_cast<double>(oracle.macs));
  EXPECT_NEAR(r.acs * 3.0, static_cast<double>(oracle.acs), 1e-9 * static_cast<double>(oracle.acs));
  EXPECT_GT(r.acs, 0.0);

  const auto& conns = net.connections();
  for (std::size_t i = 0; i < conns.size(); ++i) {
    EXPECT_EQ(conns[i].kind, testing::expected_op_kind(conns[i].name, c)) << conns[i].name;
  }

  // The first connection's mask is the input's nonzero pattern.
  const Tensor input = batch_frames(batch);
  for (std::size_t t = 0; t < tr.steps; ++t) {
    const auto& mask = tr.activity[0][t];
    for (std::size_t k = 0; k < mask.size(); ++k) {
      ASSERT_EQ(mask[k], input[t * mask.size() + k] != 0.0f ? 1 : 0);
    }
  }
  // Masks downstream of the common block count its spikes.
  const auto names = net.layer_names();
  for (std::size_t i = 0; i < conns.size(); ++i) {
    if (conns[i].name != "ventral.0.conv" && conns[i].name != "dorsal.0.conv") continue;
    for (std::size_t t = 0; t < tr.steps; ++t) {
      std::uint64_t active = 0;
      for (auto m : tr.activity[i][t]) active += m;
      EXPECT_EQ(active, tr.spike_counts[0][t]);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Fusions, SynOpsOracleTest,
                         ::testing::Combine(::testing::Values(FusionKind::egru, FusionKind::egu, FusionKind::plif,
                                                              FusionKind::none),
                                            ::testing::Values(NeuronKind::plif, NeuronKind::adlif)));

TEST(SynOps, ConvFanoutMatchesSlidingWindow) {
  for (int stride : {1, 2}) {
    for (int pad : {0, 1}) {
      const ConvGeometry g{2, 7, 6, 3, (7 + 2 * pad - 3) / stride + 1, (6 + 2 * pad - 3) / stride + 1, 3, stride, pad};
      const auto fan = conv_fanout(g);
      std::vector<std::uint32_t> brute(g.in_elements(), 0);
      for (int oc = 0; oc < g.out_channels; ++oc)
        for (int oy = 0; oy < g.out_height; ++oy)
          for (int ox = 0; ox < g.out_width; ++ox)
            for (int ky = 0; ky < 3; ++ky)
              for (int kx = 0; kx < 3; ++kx) {
                const int iy = oy * stride - pad + ky, ix = ox * stride - pad + kx;
                if (iy < 0 || ix < 0 || iy >= 7 || ix >= 6) continue;
                for (int ic = 0; ic < 2; ++ic) ++brute[(ic * 7 + iy) * 6 + ix];
              }
      EXPECT_EQ(fan, brute) << "stride " << stride << " pad " << pad;
    }
  }
}

TEST(SynOps, DenseCountBoundsEffectiveCount) {
  Network net = Network::build(NetworkConfig::desk_scale(), 1);
  const ForwardTrace tr = net.forward(tiny_batch(), ops::Mode::eval);
  const SynOpsReport eff = count_synops(tr, net);
  const SynOpsReport dense = dense_synops(net, tr.steps);
  EXPECT_LE(eff.macs, dense.macs);
  EXPECT_LE(eff.acs, dense.acs);
  EXPECT_NEAR(eff.cumulative_macs(tr.steps - 1), eff.macs, 1e-6 * eff.macs);
  for (std::size_t i = 0; i < eff.connection_totals.size(); ++i) {
    EXPECT_LE(eff.connection_totals[i], dense.connection_totals[i]) << eff.connection_names[i];
  }
}

TEST(SynOps, RejectsTrainTracesAndForeignNetworks) {
  Network net = Network::build(NetworkConfig::desk_scale(), 1);
  const auto batch = tiny_batch();
  EXPECT_THROW(count_synops(net.forward(batch, ops::Mode::train), net), ArgumentError);
  NetworkConfig other = NetworkConfig::desk_scale();
  other.fusion = FusionKind::none;
  const Network small = Network::build(other, 1);
  EXPECT_THROW(count_synops(net.forward(batch, ops::Mode::eval), small), ArgumentError);
}

}  // namespace
}  // namespace eevact
