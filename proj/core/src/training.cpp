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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "eevact/earlybench.hpp"
#include "eevact/error.hpp"

namespace eevact {
namespace {

void check_history(const Tensor& v, std::span<const int> labels, const char* op) {
  if (!v.defined() || v.rank() != 3 || v.dim(0) == 0) {
    throw ArgumentError(std::string(op) + ": expected a [T, N, C] readout history with T >= 1");
  }
  if (labels.size() != v.dim(1)) {
    throw ArgumentError(std::string(op) + ": " + std::to_string(labels.size()) + " labels for batch of " +
                        std::to_string(v.dim(1)));
  }
}

// Rows of v at the given steps, flattened to [S * N, C] with matching labels.
Tensor gather_steps(const Tensor& v, std::span<const std::size_t> steps) {
  std::vector<Tensor> parts;
  parts.reserve(steps.size());
  for (std::size_t t : steps) parts.push_back(ops::slice(v, t, t + 1));
  const Tensor picked = parts.size() == 1 ? parts.front() : ops::concat(parts, 0);
  return ops::reshape(picked, {steps.size() * v.dim(1), v.dim(2)});
}

class Adam {
 public:
  Adam(std::vector<ParamRef> params, const TrainConfig& c) : params_(std::move(params)), c_(c) {
    for (const auto& p : params_) {
      m_.emplace_back(p.tensor.numel(), 0.0f);
      v_.emplace_back(p.tensor.numel(), 0.0f);
    }
  }

  // Global L2 norm of all gradients.
  double grad_norm() const {
    double sq = 0.0;
    for (const auto& p : params_) {
      if (!p.tensor.has_grad()) continue;
      for (float g : p.tensor.grad()) sq += static_cast<double>(g) * g;
    }
    return std::sqrt(sq);
  }

  void step(double lr, double grad_scale) {
    ++t_;
    const double bc1 = 1.0 - std::pow(c_.adam_beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(c_.adam_beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
      Tensor& p = params_[i].tensor;
      if (!p.has_grad()) continue;
      const auto g = p.mutable_grad();
      auto w = p.mutable_data();
      const bool decay = c_.weight_decay > 0.0 && params_[i].group == ParamGroup::weight;
      for (std::size_t j = 0; j < w.size(); ++j) {
        const double gj = static_cast<double>(g[j]) * grad_scale;
        m_[i][j] = static_cast<float>(c_.adam_beta1 * m_[i][j] + (1.0 - c_.adam_beta1) * gj);
        v_[i][j] = static_cast<float>(c_.adam_beta2 * v_[i][j] + (1.0 - c_.adam_beta2) * gj * gj);
        const double mh = m_[i][j] / bc1, vh = v_[i][j] / bc2;
        double update = mh / (std::sqrt(vh) + c_.adam_eps);
        if (decay) update += c_.weight_decay * w[j];
        w[j] = static_cast<float>(w[j] - lr * update);
      }
    }
  }

  void zero_grad() {
    for (auto& p : params_) p.tensor.zero_grad();
  }

 private:
  std::vector<ParamRef> params_;
  TrainConfig c_;
  std::vector<std::vector<float>> m_, v_;
  std::uint64_t t_ = 0;
};

std::vector<int> labels_of(std::span<const EventStream> streams, int num_classes, const char* what) {
  std::vector<int> labels;
  labels.reserve(streams.size());
  for (std::size_t i = 0; i < streams.size(); ++i) {
    const auto& l = streams[i].label;
    if (!l || *l < 0 || *l >= num_classes) {
      throw ValidationError(std::string(what) + " sample " + std::to_string(i) + " has " +
                            (l ? "label " + std::to_string(*l) : std::string("no label")) + " outside [0, " +
                            std::to_string(num_classes) + ")");
    }
    labels.push_back(*l);
  }
  return labels;
}

}  // namespace

LossKind parse_loss_kind(std::string_view name) {
  if (name == "cem") return LossKind::cem;
  if (name == "tet") return LossKind::tet;
  if (name == "combined") return LossKind::combined;
  throw ArgumentError("unknown loss '" + std::string(name) + "' (expected one of: cem tet combined)");
}

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::cem:
      return "cem";
    case LossKind::tet:
      return "tet";
    case LossKind::combined:
      return "combined";
  }
  return "?";
}

std::vector<std::size_t> LossSpec::sample_steps(std::size_t steps) const {
  const std::size_t n = tet_samples.value_or(steps);
  if (n < 1 || n > steps) {
    throw ArgumentError("tet sample count " + std::to_string(n) + " outside [1, " + std::to_string(steps) + "]");
  }
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (i + 1) * steps / n - 1;
  return out;
}

Tensor loss_cem(const Tensor& v_history, std::span<const int> labels) {
  check_history(v_history, labels, "loss_cem");
  return ops::cross_entropy(ops::mean(v_history, 0), labels);
}

Tensor loss_tet(const Tensor& v_history, std::span<const int> labels, std::span<const std::size_t> sample_steps) {
  check_history(v_history, labels, "loss_tet");
  if (sample_steps.empty()) throw ArgumentError("loss_tet: empty sample set");
  for (std::size_t t : sample_steps) {
    if (t >= v_history.dim(0)) {
      throw ArgumentError("loss_tet: sample step " + std::to_string(t) + " outside [0, " +
                          std::to_string(v_history.dim(0)) + ")");
    }
  }
  // Mean over S * N rows equals the mean over steps of the per-step batch means.
  std::vector<int> repeated;
  repeated.reserve(sample_steps.size() * labels.size());
  for (std::size_t s = 0; s < sample_steps.size(); ++s) repeated.insert(repeated.end(), labels.begin(), labels.end());
  return ops::cross_entropy(gather_steps(v_history, sample_steps), repeated);
}

Tensor loss_combined(const Tensor& v_history, std::span<const int> labels,
                     std::span<const std::size_t> sample_steps) {
  return ops::add(loss_cem(v_history, labels), loss_tet(v_history, labels, sample_steps));
}

Tensor compute_loss(const LossSpec& spec, const Tensor& v_history, std::span<const int> labels) {
  check_history(v_history, labels, "compute_loss");
  switch (spec.kind) {
    case LossKind::cem:
      return loss_cem(v_history, labels);
    case LossKind::tet: {
      const auto steps = spec.sample_steps(v_history.dim(0));
      return loss_tet(v_history, labels, steps);
    }
    case LossKind::combined: {
      const auto steps = spec.sample_steps(v_history.dim(0));
      return loss_combined(v_history, labels, steps);
    }
  }
  throw ArgumentError("compute_loss: bad loss kind");
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ValidationError("train." + field + ": " + why);
  };
  if (epochs < 1) fail("epochs", "must be >= 1");
  if (batch_size < 1) fail("batch_size", "must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) fail("learning_rate", "must be finite and >= 0");
  if (!(final_learning_rate >= 0.0) || !std::isfinite(final_learning_rate)) {
    fail("final_learning_rate", "must be finite and >= 0");
  }
  if (!(weight_decay >= 0.0)) fail("weight_decay", "must be >= 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) fail("adam_beta1", "must be in [0, 1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) fail("adam_beta2", "must be in [0, 1)");
  if (!(adam_eps > 0.0)) fail("adam_eps", "must be > 0");
  if (window_us == 0) fail("window_us", "must be > 0");
  if (eval_window_us == 0) fail("eval_window_us", "must be > 0");
  if (encoding.bin_us == 0) fail("encoding.bin_us", "must be > 0");
  if (encoding.crop_side < 1 || encoding.out_height < 1 || encoding.out_width < 1) {
    fail("encoding", "crop and output extents must be >= 1");
  }
  if (augment.shift_cells < 0) fail("augment.shift_cells", "must be >= 0");
  if (!(augment.zoom_min > 0.0 && augment.zoom_min <= augment.zoom_max)) {
    fail("augment.zoom_min", "must satisfy 0 < zoom_min <= zoom_max");
  }
  if (!(augment.hflip_prob >= 0.0 && augment.hflip_prob <= 1.0)) fail("augment.hflip_prob", "must be in [0, 1]");
  if (eval_time_chunk < 1) fail("eval_time_chunk", "must be >= 1");
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over a combined word.
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Accuracy evaluate_accuracy(Network& net, std::span<const EventStream> streams, const EncodingSpec& encoding,
                           std::uint64_t window_us, std::size_t batch_size, std::size_t time_chunk) {
  const int classes = net.config().num_classes;
  const std::vector<int> labels = labels_of(streams, classes, "eval");
  if (streams.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  const int k5 = std::min(5, classes);
  std::size_t c1 = 0, c5 = 0;
  for (std::size_t b0 = 0; b0 < streams.size(); b0 += batch_size) {
    const std::size_t b1 = std::min(streams.size(), b0 + batch_size);
    std::vector<FrameSequence> frames;
    for (std::size_t i = b0; i < b1; ++i) frames.push_back(encode(streams[i], encoding, 0, window_us));
    const ForwardTrace trace = net.forward(frames, ops::Mode::eval, {.time_chunk = time_chunk});
    const Tensor mean = ops::mean(trace.readout, 0);
    const auto c = static_cast<std::size_t>(classes);
    for (std::size_t i = b0; i < b1; ++i) {
      const std::span<const float> scores = mean.data().subspan((i - b0) * c, c);
      c1 += topk_correct(scores, labels[i], 1) ? 1 : 0;
      c5 += topk_correct(scores, labels[i], k5) ? 1 : 0;
    }
  }
  const auto n = static_cast<double>(streams.size());
  return {static_cast<double>(c1) / n, static_cast<double>(c5) / n};
}

TrainResult train(Network& net, std::span<const EventStream> train_set, std::span<const EventStream> eval_set,
                  const TrainConfig& config, const LossSpec& loss, const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.empty()) throw ArgumentError("train: empty training set");
  const int classes = net.config().num_classes;
  const std::vector<int> labels = labels_of(train_set, classes, "training");
  labels_of(eval_set, classes, "eval");
  if (static_cast<std::uint64_t>(config.encoding.bin_us) != net.config().bin_us) {
    throw ValidationError("train.encoding.bin_us (" + std::to_string(config.encoding.bin_us) +
                          ") differs from network.bin_us (" + std::to_string(net.config().bin_us) + ")");
  }
  if (config.encoding.out_height != net.config().in_height || config.encoding.out_width != net.config().in_width) {
    throw ValidationError("train.encoding output extent does not match the network input");
  }

  Adam adam(net.parameters(), config);
  const std::size_t batches = (train_set.size() + config.batch_size - 1) / config.batch_size;
  const double total_steps = static_cast<double>(batches) * config.epochs;
  const double lr_max = config.learning_rate;
  const double lr_min = std::min(config.final_learning_rate, lr_max);
  std::size_t global_step = 0;

  TrainResult result;
  const auto started = std::chrono::steady_clock::now();
  std::vector<std::size_t> order(train_set.size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const std::uint64_t epoch_seed = mix_seed(config.seed, static_cast<std::uint64_t>(epoch));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 shuffle_rng(epoch_seed);
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    net.seed_dropout(mix_seed(epoch_seed, 0xd40u));

    double loss_sum = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t b0 = b * config.batch_size, b1 = std::min(train_set.size(), b0 + config.batch_size);
      std::vector<FrameSequence> frames;
      std::vector<int> batch_labels;
      for (std::size_t j = b0; j < b1; ++j) {
        const std::size_t idx = order[j];
        const std::uint64_t sample_seed = mix_seed(epoch_seed, idx);
        const CropWindow window = random_crop_window(train_set[idx], config.window_us, sample_seed);
        FrameSequence seq = encode(train_set[idx], config.encoding, window.start, window.end);
        frames.push_back(augment(seq, config.augment, mix_seed(sample_seed, 1)));
        batch_labels.push_back(labels[idx]);
      }

      Tape tape;
      double value = 0.0;
      {
        TapeScope scope(tape);
        const ForwardTrace trace = net.forward(frames, ops::Mode::train);
        const Tensor l = compute_loss(loss, trace.readout, batch_labels);
        value = l.item();
        if (!std::isfinite(value)) {
          throw DivergenceError("non-finite training loss at epoch " + std::to_string(epoch + 1) + ", batch " +
                                std::to_string(b + 1));
        }
        tape.backward(l);
      }
      tape.reset();
      const double norm = adam.grad_norm();
      if (!std::isfinite(norm)) {
        throw DivergenceError("non-finite gradient norm at epoch " + std::to_string(epoch + 1) + ", batch " +
                              std::to_string(b + 1));
      }
      const double scale = (config.clip_norm > 0.0 && norm > config.clip_norm) ? config.clip_norm / norm : 1.0;
      const double progress = static_cast<double>(global_step) / total_steps;
      const double lr = lr_min + 0.5 * (lr_max - lr_min) * (1.0 + std::cos(std::numbers::pi * progress));
      adam.step(lr, scale);
      adam.zero_grad();
      net.project();
      ++global_step;
      loss_sum += value * static_cast<double>(b1 - b0);
    }

    EpochMetrics m;
    m.epoch = epoch + 1;
    m.train_loss = loss_sum / static_cast<double>(train_set.size());
    const Accuracy acc = evaluate_accuracy(net, eval_set, config.encoding, config.eval_window_us, config.batch_size,
                                           config.eval_time_chunk);
    m.eval_top1 = acc.top1;
    m.eval_top5 = acc.top5;
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.log.push_back(m);
    if (on_epoch) on_epoch(m);
  }
  return result;
}

void write_metrics_csv(std::span<const EpochMetrics> log, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "epoch,train_loss,eval_top1,eval_top5,wall_seconds\n";
  char line[256];
  for (const auto& m : log) {
    std::snprintf(line, sizeof(line), "%d,%.17g,%.17g,%.17g,%.3f\n", m.epoch, m.train_loss, m.eval_top1, m.eval_top5,
                  m.wall_seconds);
    out << line;
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace eevact
