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

#ifndef EEVACT_CLI_RUN_CONFIG_HPP_
#define EEVACT_CLI_RUN_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "eevact/network_config.hpp"
#include "eevact/preprocess.hpp"
#include "eevact/training.hpp"

namespace eevact::cli {

struct SyntheticSpec {
  std::vector<std::string> patterns{"bar_left", "bar_right"};  // class index = position
  int train_per_class = 100;
  int test_per_class = 25;
  int width = 32;
  int height = 32;
  std::uint64_t duration_us = 500'000;
  double rate_hz = 20'000.0;
};

struct EvalSettings {
  std::vector<int> ks{1, 3, 5};
  std::vector<double> table_times_s{0.3, 0.6, 1.0, 1.5, 2.0};
  // 0 evaluates up to the largest table time.
  std::uint64_t horizon_us = 0;
  std::size_t batch_size = 16;
  std::size_t time_chunk = 1;
};

// One ablation combination; unset fields inherit from the base config.
struct SweepEntry {
  std::string label;
  std::optional<NeuronKind> neuron;
  std::optional<FusionKind> fusion;
  std::optional<LossKind> loss;
  std::optional<ReadoutKind> readout;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path data_dir = "data";
  std::filesystem::path output_dir = "runs";
  SyntheticSpec synthetic;
  EncodingSpec encoding{32, 32, 32, 2000};
  NetworkConfig network = NetworkConfig::desk_scale(2);
  TrainConfig train = desk_train_defaults();
  LossSpec loss;
  EvalSettings eval;
  std::vector<SweepEntry> sweep;

  static TrainConfig desk_train_defaults();

  // Throws ValidationError naming the offending field.
  void validate() const;

  // Resolved combinations: the sweep, or the base config alone.
  struct Variant {
    std::string label;
    NetworkConfig network;
    LossSpec loss;
  };
  std::vector<Variant> variants() const;
};

// Unknown keys anywhere are rejected with the dotted path of the key.
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);
// Reads a JSON file; a missing file is an IoError, malformed JSON a
// ValidationError.
RunConfig load_run_config(const std::filesystem::path& path);

// Applies EEVACT_SEED when set; throws ValidationError on a malformed value.
void apply_seed_env(RunConfig& config);

}  // namespace eevact::cli

#endif  // EEVACT_CLI_RUN_CONFIG_HPP_
