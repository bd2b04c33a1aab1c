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

#ifndef EEVACT_TRAINING_HPP_
#define EEVACT_TRAINING_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eevact/event_io.hpp"
#include "eevact/network.hpp"
#include "eevact/preprocess.hpp"

namespace eevact {

enum class LossKind { cem, tet, combined };

LossKind parse_loss_kind(std::string_view name);
std::string_view to_string(LossKind kind);

struct LossSpec {
  LossKind kind = LossKind::combined;
  // Number of evenly spaced readout samples for the TET term; nullopt uses
  // every step.
  std::optional<std::size_t> tet_samples;

  // Steps n_i = floor((i + 1) * T / N) - 1, i = 0..N-1, so the last sample
  // is always the final step. Throws ArgumentError unless 1 <= N <= T.
  std::vector<std::size_t> sample_steps(std::size_t steps) const;
};

// v_history: [T, N, C]; labels: N entries.
Tensor loss_cem(const Tensor& v_history, std::span<const int> labels);
Tensor loss_tet(const Tensor& v_history, std::span<const int> labels, std::span<const std::size_t> sample_steps);
Tensor loss_combined(const Tensor& v_history, std::span<const int> labels,
                     std::span<const std::size_t> sample_steps);
Tensor compute_loss(const LossSpec& spec, const Tensor& v_history, std::span<const int> labels);

struct TrainConfig {
  int epochs = 30;
  std::size_t batch_size = 16;
  double learning_rate = 1e-3;
  double final_learning_rate = 1e-5;  // cosine decay target
  double weight_decay = 0.0;          // decoupled, conv/linear weights only
  double clip_norm = 10.0;            // <= 0 disables clipping
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t window_us = 1'000'000;  // random training crop
  std::uint64_t eval_window_us = 1'000'000;  // evaluated from the stream start
  EncodingSpec encoding;
  AugmentSpec augment = AugmentSpec::defaults();
  std::size_t eval_time_chunk = 32;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double eval_top1 = 0.0;
  double eval_top5 = 0.0;
  double wall_seconds = 0.0;
};

struct TrainResult {
  std::vector<EpochMetrics> log;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

// Every stream must carry a label in [0, num_classes). `eval_set` may be
// empty, in which case eval accuracies are logged as NaN.
TrainResult train(Network& net, std::span<const EventStream> train_set, std::span<const EventStream> eval_set,
                  const TrainConfig& config, const LossSpec& loss, const EpochCallback& on_epoch = {});

// Top-1 / Top-5 (k clamped to the class count) of the mean readout over
// [0, window_us) for each stream.
struct Accuracy {
  double top1 = 0.0;
  double top5 = 0.0;
};
Accuracy evaluate_accuracy(Network& net, std::span<const EventStream> streams, const EncodingSpec& encoding,
                           std::uint64_t window_us, std::size_t batch_size, std::size_t time_chunk);

// Columns: epoch, train_loss, eval_top1, eval_top5, wall_seconds.
void write_metrics_csv(std::span<const EpochMetrics> log, const std::filesystem::path& path);

// Stateless 64-bit mixer used to derive per-epoch and per-sample seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace eevact

#endif  // EEVACT_TRAINING_HPP_
