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

#ifndef EEVACT_NETWORK_CONFIG_HPP_
#define EEVACT_NETWORK_CONFIG_HPP_

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "eevact/neurons.hpp"

namespace eevact {

enum class Topology { two_stream, ventral_only, dorsal_only, ventral_double, dorsal_double };
enum class NeuronKind { plif, adlif };
enum class FusionKind { egru, egu, plif, adlif, none };
enum class ReadoutKind { mean, last };

Topology parse_topology(std::string_view name);
NeuronKind parse_neuron_kind(std::string_view name);
FusionKind parse_fusion_kind(std::string_view name);
ReadoutKind parse_readout_kind(std::string_view name);
std::string_view to_string(Topology v);
std::string_view to_string(NeuronKind v);
std::string_view to_string(FusionKind v);
std::string_view to_string(ReadoutKind v);

// Conv -> batch norm -> spiking neuron block.
struct ConvSpikeLayerSpec {
  std::string name;
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 3;
  int stride = 1;
  int padding = 1;
  NeuronKind neuron = NeuronKind::plif;
  float dropout = 0.0f;
  // Spatial extents, filled in by NetworkConfig::layout().
  int in_height = 0, in_width = 0, out_height = 0, out_width = 0;
};

struct StreamLayout {
  ConvSpikeLayerSpec common;
  std::vector<ConvSpikeLayerSpec> ventral;  // empty when the branch is unused
  std::vector<ConvSpikeLayerSpec> dorsal;
  std::size_t fusion_inputs = 0;  // flattened ventral + dorsal output width
};

struct NetworkConfig {
  Topology topology = Topology::two_stream;
  NeuronKind neuron = NeuronKind::plif;
  FusionKind fusion = FusionKind::egru;
  ReadoutKind readout = ReadoutKind::mean;

  int in_channels = 2;
  int in_height = 100;
  int in_width = 100;
  int num_classes = 50;
  std::uint64_t bin_us = 2000;

  int common_width = 16;
  int common_stride = 2;
  std::vector<int> ventral_widths{32, 96, 192, 384};
  std::vector<int> ventral_strides{2, 2, 2, 2};
  std::vector<int> dorsal_widths{24, 32, 48, 16};
  std::vector<int> dorsal_strides{2, 1, 2, 1};
  int kernel = 3;
  int padding = 1;
  int fusion_width = 256;
  float dropout = 0.1f;

  float threshold = 1.0f;
  float surrogate_slope = 2.0f;
  float init_decay = 0.5f;
  AdlifCoupling adlif_coupling = AdlifCoupling::previous_membrane;
  bool trainable_event_threshold = true;

  // 100x100 input with the default widths above.
  static NetworkConfig full_scale(int num_classes = 50);
  // 32x32 input with proportionally narrower streams, for fast experiments.
  static NetworkConfig desk_scale(int num_classes = 2);

  bool uses_ventral() const;
  bool uses_dorsal() const;
  int width_multiplier() const;  // 2 for the *_double topologies

  // Throws ValidationError when the stream invariants or the spatial
  // arithmetic do not hold.
  void validate() const;
  StreamLayout layout() const;

  SpikeConfig spike_config() const;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

nlohmann::json to_json(const NetworkConfig& config);
// Starts from `base` and overrides the fields present in `j`; unknown keys are
// rejected.
NetworkConfig network_config_from_json(const nlohmann::json& j, const NetworkConfig& base = {},
                                       const std::string& path = "network");

}  // namespace eevact

#endif  // EEVACT_NETWORK_CONFIG_HPP_
