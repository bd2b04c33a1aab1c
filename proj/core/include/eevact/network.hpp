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

#ifndef EEVACT_NETWORK_HPP_
#define EEVACT_NETWORK_HPP_

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "eevact/gated_fusion.hpp"
#include "eevact/network_config.hpp"
#include "eevact/neurons.hpp"
#include "eevact/ops.hpp"
#include "eevact/preprocess.hpp"
#include "eevact/synops.hpp"
#include "eevact/tensor.hpp"

namespace eevact {

// Optimizer treatment differs per group: dynamics and thresholds are exempt
// from weight decay.
enum class ParamGroup { weight, bias, norm, dynamics, threshold };

struct ParamRef {
  std::string name;
  Tensor tensor;
  ParamGroup group = ParamGroup::weight;
};

struct BufferRef {
  std::string name;
  std::vector<float>* values = nullptr;
};

struct TraceOptions {
  // Keep per-step presynaptic activity masks for every connection.
  bool record_activity = false;
  // Bins pushed through the whole pipeline per layer call in eval mode; 1 is
  // the per-bin streaming update. Train mode always processes the full
  // sequence layer by layer so batch statistics span time.
  std::size_t time_chunk = 1;
};

struct ForwardTrace {
  std::size_t steps = 0;
  std::size_t batch = 0;
  ops::Mode mode = ops::Mode::eval;
  Tensor readout;  // [T, N, num_classes]
  std::vector<std::string> layer_names;
  std::vector<std::vector<std::uint64_t>> spike_counts;  // [layer][t], summed over the batch
  std::vector<std::string> connection_names;
  std::vector<std::vector<std::uint64_t>> synops;  // [connection][t], summed over the batch
  // [connection][t] -> N * in_elements flags; empty unless requested.
  std::vector<std::vector<std::vector<std::uint8_t>>> activity;
};

class Network {
 public:
  // Throws ValidationError when the config is inconsistent.
  static Network build(const NetworkConfig& config, std::uint64_t seed);

  Network(Network&&) noexcept;
  Network& operator=(Network&&) noexcept;
  ~Network();

  const NetworkConfig& config() const;
  const StreamLayout& layout() const;

  ForwardTrace forward(const FrameSequence& seq, ops::Mode mode, const TraceOptions& options = {});
  ForwardTrace forward(std::span<const FrameSequence> batch, ops::Mode mode, const TraceOptions& options = {});
  // frames: [T, N, C, H, W].
  ForwardTrace forward(const Tensor& frames, ops::Mode mode, const TraceOptions& options = {});

  // Trainable tensors in declaration order.
  std::vector<ParamRef> parameters() const;
  // Batch-norm running statistics in declaration order.
  std::vector<BufferRef> buffers();
  std::size_t count_parameters() const;
  // Clamp neuron and gate parameters into their valid ranges.
  void project();

  const std::vector<Connection>& connections() const;
  std::vector<std::string> layer_names() const;

  void seed_dropout(std::uint64_t seed);

 private:
  struct Impl;
  explicit Network(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

std::size_t count_parameters(const Network& net);

// Stacks sequences into a [T, N, 2, H, W] tensor; all must share extents.
Tensor batch_frames(std::span<const FrameSequence> batch);

}  // namespace eevact

#endif  // EEVACT_NETWORK_HPP_
