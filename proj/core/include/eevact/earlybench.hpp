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

#ifndef EEVACT_EARLYBENCH_HPP_
#define EEVACT_EARLYBENCH_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eevact/event_io.hpp"
#include "eevact/network.hpp"
#include "eevact/preprocess.hpp"

namespace eevact {

// True iff `label` ranks among the k highest scores. Ties go to the lower
// class index. Throws ArgumentError unless 1 <= k <= scores.size() and the
// label is in range.
bool topk_correct(std::span<const float> scores, int label, int k);

// Indices of the k highest scores, best first, same tie rule.
std::vector<int> topk_indices(std::span<const float> scores, int k);

inline const std::vector<double> kTableTimesS{0.3, 0.6, 1.0, 1.5, 2.0};

struct EvalCurve {
  std::string label;                // curve name in plots and tables
  std::size_t parameters = 0;       // model size, for the table
  ReadoutKind readout = ReadoutKind::mean;
  double delta_t_s = 0.0;           // output update period, equal to one bin
  std::vector<double> times_s;      // (t + 1) * delta_t_s
  std::vector<int> ks;
  std::vector<std::vector<double>> topk;  // [k index][time]
  std::vector<double> macs_g;       // cumulative effective MACs per sample, in 1e9
  std::vector<double> acs_g;
  std::size_t samples = 0;
  std::size_t padded_samples = 0;   // recordings shorter than the evaluated horizon

  // Throws ArgumentError when k was not evaluated.
  const std::vector<double>& accuracy(int k) const;
  // Index of the bin that closes at observation time s: round(s / delta_t) - 1.
  std::size_t index_at(double time_s) const;
  // Throws ArgumentError on violated invariants.
  void validate() const;
};

// Readout histories of one sample: [T][C] flattened.
struct History {
  std::vector<float> v;
  std::size_t steps = 0;
  std::size_t classes = 0;
  int label = 0;
};

// Accuracy at every step for each k, from precomputed histories. Also
// checks Top-k monotonicity per sample and throws StateError if it breaks.
std::vector<std::vector<double>> evaluate_histories(std::span<const History> histories, ReadoutKind readout,
                                                    std::span<const int> ks);

struct EarlyEvalOptions {
  ReadoutKind readout = ReadoutKind::mean;
  std::vector<int> ks{1, 3, 5};
  // Evaluated horizon; 0 means the longest recording.
  std::uint64_t horizon_us = 0;
  EncodingSpec encoding;
  std::size_t batch_size = 16;
  std::size_t time_chunk = 1;
};

// Encodes each stream from its start over the horizon, runs the network once
// per batch and scores every bin. ks above the class count are clamped.
EvalCurve evaluate_early(Network& net, std::span<const EventStream> dataset, const EarlyEvalOptions& options);

// Horizon that covers the table grid: the largest requested time.
std::uint64_t horizon_for(std::span<const double> times_s);

struct EarlyReadoutConfig {
  float early_threshold = std::numeric_limits<float>::infinity();
  float final_threshold = std::numeric_limits<float>::infinity();
  int k = 1;
};

struct EarlyPrediction {
  std::size_t step = 0;
  std::vector<int> classes;  // top-k at that step
};

struct EarlyReadout {
  std::optional<EarlyPrediction> early;
  int final_class = 0;
  std::size_t final_step = 0;  // step at which the final decision was taken
};

EarlyReadout early_readout_neuron(const History& history, const EarlyReadoutConfig& config);

}  // namespace eevact

#endif  // EEVACT_EARLYBENCH_HPP_
