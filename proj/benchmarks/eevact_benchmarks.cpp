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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "eevact/event_io.hpp"
#include "eevact/network.hpp"
#include "eevact/ops.hpp"
#include "eevact/preprocess.hpp"
#include "eevact/synops.hpp"
#include "eevact/tensor.hpp"

namespace eevact {
namespace {

Tensor random(const Shape& shape, std::uint64_t seed, bool requires_grad = false) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> dist(0.0f, 1.0f);
  std::vector<float> v(shape_numel(shape));
  for (float& x : v) x = dist(rng);
  return Tensor(shape, std::move(v), requires_grad);
}

// Args: channels, spatial size.
void BM_Conv2dForward(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0)), hw = static_cast<std::size_t>(state.range(1));
  const Tensor x = random({8, c, hw, hw}, 1);
  const Tensor w = random({c, c, 3, 3}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(ops::conv2d(x, w, 1, 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(8 * c * c * 9 * hw * hw));
}
BENCHMARK(BM_Conv2dForward)->Args({4, 32})->Args({16, 16})->Args({32, 8});

void BM_Conv2dBackward(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0)), hw = static_cast<std::size_t>(state.range(1));
  Tensor x = random({8, c, hw, hw}, 1, true);
  Tensor w = random({c, c, 3, 3}, 2, true);
  for (auto _ : state) {
    Tape tape;
    TapeScope scope(tape);
    tape.backward(ops::sum_all(ops::conv2d(x, w, 1, 1)));
  }
}
BENCHMARK(BM_Conv2dBackward)->Args({4, 32})->Args({16, 16});

std::vector<FrameSequence> desk_batch(std::size_t n, std::uint64_t duration_us) {
  std::vector<FrameSequence> out;
  for (std::size_t i = 0; i < n; ++i) {
    const EventStream s =
        generate_synthetic(i % 2 ? Pattern::bar_right : Pattern::bar_left, {32, 32}, duration_us, 20000.0, i + 1);
    out.push_back(encode(s, EncodingSpec{32, 32, 32, 2000}, 0, duration_us));
  }
  return out;
}

// Streaming inference of the desk-scale net, reported per time step.
void BM_NetworkStep(benchmark::State& state) {
  NetworkConfig c = NetworkConfig::desk_scale(2);
  c.fusion = static_cast<FusionKind>(state.range(0));
  Network net = Network::build(c, 0);
  const auto batch = desk_batch(16, 40000);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(batch, ops::Mode::eval, TraceOptions{false, 1}));
  state.SetItemsProcessed(state.iterations() * 20);
  state.SetLabel(std::string(to_string(c.fusion)));
}
BENCHMARK(BM_NetworkStep)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

void BM_Encode(benchmark::State& state) {
  const EventStream s = generate_synthetic(Pattern::dot_cw, {128, 128}, 500000, 200000.0, 3);
  const EncodingSpec spec{128, 64, 64, 2000};
  for (auto _ : state) benchmark::DoNotOptimize(encode(s, spec, 0, 500000));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.events.size()));
}
BENCHMARK(BM_Encode);

void BM_CountSynops(benchmark::State& state) {
  Network net = Network::build(NetworkConfig::desk_scale(2), 0);
  const ForwardTrace trace = net.forward(desk_batch(8, 40000), ops::Mode::eval, TraceOptions{false, 1});
  for (auto _ : state) benchmark::DoNotOptimize(count_synops(trace, net));
}
BENCHMARK(BM_CountSynops);

}  // namespace
}  // namespace eevact

BENCHMARK_MAIN();
