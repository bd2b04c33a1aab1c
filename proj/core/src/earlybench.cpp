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

#include "eevact/earlybench.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eevact/error.hpp"
#include "eevact/synops.hpp"

namespace eevact {
namespace {

// a outranks b.
bool outranks(float sa, int a, float sb, int b) { return sa > sb || (sa == sb && a < b); }

int argmax(std::span<const float> s) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(s.size()); ++i) {
    if (outranks(s[i], i, s[best], best)) best = i;
  }
  return best;
}

}  // namespace

bool topk_correct(std::span<const float> scores, int label, int k) {
  const int c = static_cast<int>(scores.size());
  if (k < 1 || k > c) throw ArgumentError("topk_correct: k = " + std::to_string(k) + " outside [1, " +
                                          std::to_string(c) + "]");
  if (label < 0 || label >= c) throw ArgumentError("topk_correct: label " + std::to_string(label) + " out of range");
  int ahead = 0;
  for (int i = 0; i < c; ++i) {
    if (i != label && outranks(scores[i], i, scores[label], label)) ++ahead;
  }
  return ahead < k;
}

std::vector<int> topk_indices(std::span<const float> scores, int k) {
  const int c = static_cast<int>(scores.size());
  if (k < 1 || k > c) throw ArgumentError("topk_indices: k = " + std::to_string(k) + " outside [1, " +
                                          std::to_string(c) + "]");
  std::vector<int> idx(static_cast<std::size_t>(c));
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                    [&](int a, int b) { return outranks(scores[a], a, scores[b], b); });
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

const std::vector<double>& EvalCurve::accuracy(int k) const {
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == k) return topk[i];
  }
  throw ArgumentError("curve has no Top-" + std::to_string(k) + " series");
}

std::size_t EvalCurve::index_at(double time_s) const {
  if (times_s.empty()) throw ArgumentError("empty curve");
  const long bins = std::lround(time_s / delta_t_s);
  if (bins < 1) return 0;
  return std::min(static_cast<std::size_t>(bins) - 1, times_s.size() - 1);
}

void EvalCurve::validate() const {
  const std::size_t n = times_s.size();
  if (topk.size() != ks.size()) throw ArgumentError("curve: one series per k required");
  if (macs_g.size() != n || acs_g.size() != n) throw ArgumentError("curve: synops length differs from times");
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && !(times_s[i] > times_s[i - 1])) throw ArgumentError("curve: times must be strictly increasing");
    if (i > 0 && (macs_g[i] < macs_g[i - 1] || acs_g[i] < acs_g[i - 1])) {
      throw ArgumentError("curve: cumulative synops must be non-decreasing");
    }
  }
  for (std::size_t j = 0; j < ks.size(); ++j) {
    if (topk[j].size() != n) throw ArgumentError("curve: accuracy length differs from times");
    for (std::size_t i = 0; i < n; ++i) {
      const double a = topk[j][i];
      if (!(a >= 0.0 && a <= 1.0)) throw ArgumentError("curve: accuracy outside [0, 1]");
      for (std::size_t l = 0; l < ks.size(); ++l) {
        if (ks[l] > ks[j] && topk[l][i] < a) throw ArgumentError("curve: Top-k accuracy must not fall as k grows");
      }
    }
  }
}

std::vector<std::vector<double>> evaluate_histories(std::span<const History> histories, ReadoutKind readout,
                                                    std::span<const int> ks) {
  if (histories.empty()) throw ArgumentError("evaluate_histories: no samples");
  const std::size_t steps = histories.front().steps, classes = histories.front().classes;
  std::vector<int> effective(ks.begin(), ks.end());
  for (int& k : effective) {
    if (k < 1) throw ArgumentError("evaluate_histories: k must be >= 1");
    k = std::min(k, static_cast<int>(classes));
  }
  std::vector<std::vector<std::size_t>> correct(ks.size(), std::vector<std::size_t>(steps, 0));
  std::vector<double> running(classes);
  std::vector<float> scores(classes);
  std::vector<bool> hit(ks.size());
  for (const History& h : histories) {
    if (h.steps != steps || h.classes != classes || h.v.size() != steps * classes) {
      throw ArgumentError("evaluate_histories: histories differ in shape");
    }
    std::fill(running.begin(), running.end(), 0.0);
    for (std::size_t t = 0; t < steps; ++t) {
      const float* row = h.v.data() + t * classes;
      for (std::size_t c = 0; c < classes; ++c) {
        running[c] += row[c];
        scores[c] = readout == ReadoutKind::mean ? static_cast<float>(running[c] / static_cast<double>(t + 1)) : row[c];
      }
      for (std::size_t j = 0; j < ks.size(); ++j) {
        hit[j] = topk_correct(scores, h.label, effective[j]);
        correct[j][t] += hit[j] ? 1 : 0;
      }
      for (std::size_t j = 0; j < ks.size(); ++j) {
        for (std::size_t l = 0; l < ks.size(); ++l) {
          if (effective[l] > effective[j] && hit[j] && !hit[l]) {
            throw StateError("Top-k monotonicity violated at step " + std::to_string(t));
          }
        }
      }
    }
  }
  std::vector<std::vector<double>> acc(ks.size(), std::vector<double>(steps));
  const auto n = static_cast<double>(histories.size());
  for (std::size_t j = 0; j < ks.size(); ++j) {
    for (std::size_t t = 0; t < steps; ++t) acc[j][t] = static_cast<double>(correct[j][t]) / n;
  }
  return acc;
}

std::uint64_t horizon_for(std::span<const double> times_s) {
  double m = 0.0;
  for (double t : times_s) m = std::max(m, t);
  return static_cast<std::uint64_t>(std::llround(m * 1e6));
}

EvalCurve evaluate_early(Network& net, std::span<const EventStream> dataset, const EarlyEvalOptions& options) {
  if (dataset.empty()) throw ArgumentError("evaluate_early: empty dataset");
  if (options.ks.empty()) throw ArgumentError("evaluate_early: no k requested");
  const std::uint64_t bin_us = options.encoding.bin_us;
  if (bin_us != net.config().bin_us) {
    throw ArgumentError("evaluate_early: encoding bin " + std::to_string(bin_us) + " us differs from network bin " +
                        std::to_string(net.config().bin_us) + " us");
  }
  std::uint64_t horizon = options.horizon_us;
  if (horizon == 0) {
    for (const auto& s : dataset) horizon = std::max(horizon, s.duration_us);
    horizon = std::max(horizon, bin_us);
  }
  const int classes = net.config().num_classes;

  EvalCurve curve;
  curve.readout = options.readout;
  curve.ks = options.ks;
  curve.delta_t_s = static_cast<double>(bin_us) * 1e-6;
  curve.parameters = net.count_parameters();
  curve.samples = dataset.size();

  std::vector<History> histories;
  histories.reserve(dataset.size());
  std::vector<double> macs, acs;
  const std::size_t batch = std::max<std::size_t>(options.batch_size, 1);
  for (std::size_t b0 = 0; b0 < dataset.size(); b0 += batch) {
    const std::size_t b1 = std::min(dataset.size(), b0 + batch);
    std::vector<FrameSequence> frames;
    for (std::size_t i = b0; i < b1; ++i) {
      const EventStream& s = dataset[i];
      if (!s.label || *s.label < 0 || *s.label >= classes) {
        throw ArgumentError("evaluate_early: sample " + std::to_string(i) + " lacks a valid label");
      }
      if (s.duration_us < horizon) ++curve.padded_samples;
      frames.push_back(encode(s, options.encoding, 0, horizon));
    }
    const ForwardTrace trace = net.forward(frames, ops::Mode::eval, {.time_chunk = options.time_chunk});
    const SynOpsReport report = count_synops(trace, net);
    if (macs.empty()) {
      macs.assign(trace.steps, 0.0);
      acs.assign(trace.steps, 0.0);
    }
    const auto weight = static_cast<double>(b1 - b0);
    for (std::size_t t = 0; t < trace.steps; ++t) {
      macs[t] += report.macs_per_step[t] * weight;
      acs[t] += report.acs_per_step[t] * weight;
    }
    const auto c = static_cast<std::size_t>(classes);
    const auto data = trace.readout.data();
    for (std::size_t i = b0; i < b1; ++i) {
      History h;
      h.steps = trace.steps;
      h.classes = c;
      h.label = *dataset[i].label;
      h.v.resize(trace.steps * c);
      for (std::size_t t = 0; t < trace.steps; ++t) {
        const float* src = data.data() + (t * trace.batch + (i - b0)) * c;
        std::copy(src, src + c, h.v.begin() + static_cast<std::ptrdiff_t>(t * c));
      }
      histories.push_back(std::move(h));
    }
  }

  curve.topk = evaluate_histories(histories, options.readout, options.ks);
  const std::size_t steps = histories.front().steps;
  const auto n = static_cast<double>(dataset.size());
  double cm = 0.0, ca = 0.0;
  for (std::size_t t = 0; t < steps; ++t) {
    curve.times_s.push_back(static_cast<double>(t + 1) * curve.delta_t_s);
    cm += macs[t] / n;
    ca += acs[t] / n;
    curve.macs_g.push_back(cm * 1e-9);
    curve.acs_g.push_back(ca * 1e-9);
  }
  return curve;
}

EarlyReadout early_readout_neuron(const History& history, const EarlyReadoutConfig& config) {
  if (history.steps == 0 || history.classes == 0 || history.v.size() != history.steps * history.classes) {
    throw ArgumentError("early_readout_neuron: empty or malformed history");
  }
  const std::size_t c = history.classes;
  const int k = std::clamp(config.k, 1, static_cast<int>(c));
  EarlyReadout out;
  bool decided = false;
  std::vector<double> running(c, 0.0);
  std::vector<float> mean(c);
  for (std::size_t t = 0; t < history.steps; ++t) {
    const std::span<const float> row(history.v.data() + t * c, c);
    for (std::size_t i = 0; i < c; ++i) {
      running[i] += row[i];
      mean[i] = static_cast<float>(running[i] / static_cast<double>(t + 1));
    }
    if (!out.early && *std::max_element(row.begin(), row.end()) >= config.early_threshold) {
      out.early = EarlyPrediction{t, topk_indices(row, k)};
    }
    if (!decided && *std::max_element(mean.begin(), mean.end()) >= config.final_threshold) {
      out.final_class = argmax(mean);
      out.final_step = t;
      decided = true;
    }
    if (decided && out.early) break;
  }
  if (!decided) {
    // No early exit happened, so `mean` holds the full-sequence mean.
    out.final_class = argmax(mean);
    out.final_step = history.steps - 1;
  }
  return out;
}

}  // namespace eevact
