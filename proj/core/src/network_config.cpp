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

#include "eevact/network_config.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "eevact/error.hpp"
#include "eevact/strict_json.hpp"

namespace eevact {
namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view name, const std::array<std::pair<std::string_view, E>, N>& table,
             std::string_view what) {
  for (const auto& [key, value] : table) {
    if (key == name) return value;
  }
  std::string msg = "unknown " + std::string(what) + " '" + std::string(name) + "' (expected one of:";
  for (const auto& [key, value] : table) msg += " " + std::string(key);
  throw ArgumentError(msg + ")");
}

template <typename E, std::size_t N>
std::string_view enum_name(E v, const std::array<std::pair<std::string_view, E>, N>& table) {
  for (const auto& [key, value] : table) {
    if (value == v) return key;
  }
  return "?";
}

constexpr std::array<std::pair<std::string_view, Topology>, 5> kTopologies{{
    {"two_stream", Topology::two_stream},
    {"ventral_only", Topology::ventral_only},
    {"dorsal_only", Topology::dorsal_only},
    {"ventral_double", Topology::ventral_double},
    {"dorsal_double", Topology::dorsal_double},
}};
constexpr std::array<std::pair<std::string_view, NeuronKind>, 2> kNeurons{{
    {"plif", NeuronKind::plif},
    {"adlif", NeuronKind::adlif},
}};
constexpr std::array<std::pair<std::string_view, FusionKind>, 5> kFusions{{
    {"egru", FusionKind::egru},
    {"egu", FusionKind::egu},
    {"plif", FusionKind::plif},
    {"adlif", FusionKind::adlif},
    {"none", FusionKind::none},
}};
constexpr std::array<std::pair<std::string_view, ReadoutKind>, 2> kReadouts{{
    {"mean", ReadoutKind::mean},
    {"last", ReadoutKind::last},
}};
constexpr std::array<std::pair<std::string_view, AdlifCoupling>, 2> kCouplings{{
    {"previous_membrane", AdlifCoupling::previous_membrane},
    {"current_membrane", AdlifCoupling::current_membrane},
}};

int conv_out(int in, int kernel, int stride, int padding) {
  const int span = in + 2 * padding - kernel;
  if (span < 0) return 0;
  return span / stride + 1;
}

// Fills spatial extents and returns the output side, throwing on collapse.
void place(ConvSpikeLayerSpec& spec, int in_h, int in_w) {
  spec.in_height = in_h;
  spec.in_width = in_w;
  spec.out_height = conv_out(in_h, spec.kernel, spec.stride, spec.padding);
  spec.out_width = conv_out(in_w, spec.kernel, spec.stride, spec.padding);
  if (spec.out_height < 1 || spec.out_width < 1) {
    throw ValidationError("layer " + spec.name + ": input " + std::to_string(in_h) + "x" + std::to_string(in_w) +
                          " is too small for kernel " + std::to_string(spec.kernel) + ", stride " +
                          std::to_string(spec.stride) + ", padding " + std::to_string(spec.padding));
  }
}

}  // namespace

Topology parse_topology(std::string_view name) { return parse_enum(name, kTopologies, "topology"); }
NeuronKind parse_neuron_kind(std::string_view name) { return parse_enum(name, kNeurons, "neuron kind"); }
FusionKind parse_fusion_kind(std::string_view name) { return parse_enum(name, kFusions, "fusion kind"); }
ReadoutKind parse_readout_kind(std::string_view name) { return parse_enum(name, kReadouts, "readout kind"); }
std::string_view to_string(Topology v) { return enum_name(v, kTopologies); }
std::string_view to_string(NeuronKind v) { return enum_name(v, kNeurons); }
std::string_view to_string(FusionKind v) { return enum_name(v, kFusions); }
std::string_view to_string(ReadoutKind v) { return enum_name(v, kReadouts); }

NetworkConfig NetworkConfig::full_scale(int num_classes) {
  NetworkConfig c;
  c.num_classes = num_classes;
  return c;
}

NetworkConfig NetworkConfig::desk_scale(int num_classes) {
  NetworkConfig c;
  c.num_classes = num_classes;
  c.in_height = 32;
  c.in_width = 32;
  c.common_width = 4;
  c.ventral_widths = {8, 16, 32, 32};
  c.dorsal_widths = {6, 8, 8, 4};
  c.fusion_width = 32;
  return c;
}

bool NetworkConfig::uses_ventral() const {
  return topology == Topology::two_stream || topology == Topology::ventral_only ||
         topology == Topology::ventral_double;
}

bool NetworkConfig::uses_dorsal() const {
  return topology == Topology::two_stream || topology == Topology::dorsal_only ||
         topology == Topology::dorsal_double;
}

int NetworkConfig::width_multiplier() const {
  return (topology == Topology::ventral_double || topology == Topology::dorsal_double) ? 2 : 1;
}

SpikeConfig NetworkConfig::spike_config() const {
  SpikeConfig s;
  s.threshold = threshold;
  s.surrogate.slope = surrogate_slope;
  s.coupling = adlif_coupling;
  return s;
}

void NetworkConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ValidationError("network." + field + ": " + why);
  };
  if (in_channels < 1) fail("in_channels", "must be >= 1");
  if (in_height < 1 || in_width < 1) fail("in_height", "input extent must be >= 1");
  if (num_classes < 1) fail("num_classes", "must be >= 1");
  if (bin_us == 0) fail("bin_us", "must be > 0");
  if (kernel < 1 || kernel % 2 == 0) fail("kernel", "must be odd and >= 1");
  if (padding < 0) fail("padding", "must be >= 0");
  if (common_width < 1) fail("common_width", "must be >= 1");
  if (common_stride != 1 && common_stride != 2) fail("common_stride", "must be 1 or 2");

  if (ventral_widths.size() != 4) fail("ventral_widths", "ventral stream has exactly 4 layers");
  if (ventral_strides.size() != 4) fail("ventral_strides", "ventral stream has exactly 4 layers");
  for (std::size_t i = 0; i < 4; ++i) {
    if (ventral_widths[i] < 1) fail("ventral_widths", "widths must be >= 1");
    if (ventral_strides[i] != 2) fail("ventral_strides", "all ventral strides must be 2");
    if (i > 0 && ventral_widths[i] < ventral_widths[i - 1]) fail("ventral_widths", "widths must be non-decreasing");
  }
  if (ventral_widths.front() < common_width) fail("ventral_widths", "widths must not shrink below common_width");

  if (dorsal_widths.size() != 4) fail("dorsal_widths", "dorsal stream has exactly 4 layers");
  if (dorsal_strides != std::vector<int>{2, 1, 2, 1}) fail("dorsal_strides", "must be [2, 1, 2, 1]");
  for (int w : dorsal_widths) {
    if (w < 1) fail("dorsal_widths", "widths must be >= 1");
  }
  if (dorsal_widths.back() != common_width) fail("dorsal_widths", "final dorsal width must equal common_width");

  if (fusion != FusionKind::none && fusion_width < 1) fail("fusion_width", "must be >= 1");
  if (!(dropout >= 0.0f && dropout < 1.0f)) fail("dropout", "must be in [0, 1)");
  if (!(std::isfinite(threshold) && threshold > 0.0f)) fail("threshold", "must be finite and > 0");
  if (!(std::isfinite(surrogate_slope) && surrogate_slope > 0.0f)) fail("surrogate_slope", "must be finite and > 0");
  if (!(init_decay > 0.0f && init_decay < 1.0f)) fail("init_decay", "must be in (0, 1)");

  (void)layout();  // spatial arithmetic
}

StreamLayout NetworkConfig::layout() const {
  const int m = width_multiplier();
  StreamLayout out;
  auto make = [&](std::string name, int in_ch, int out_ch, int stride) {
    ConvSpikeLayerSpec s;
    s.name = std::move(name);
    s.in_channels = in_ch;
    s.out_channels = out_ch;
    s.kernel = kernel;
    s.stride = stride;
    s.padding = padding;
    s.neuron = neuron;
    s.dropout = dropout;
    return s;
  };
  out.common = make("common", in_channels, common_width * m, common_stride);
  place(out.common, in_height, in_width);

  if (uses_ventral()) {
    int ch = out.common.out_channels, h = out.common.out_height, w = out.common.out_width;
    for (std::size_t i = 0; i < 4; ++i) {
      auto s = make("ventral." + std::to_string(i), ch, ventral_widths[i] * m, ventral_strides[i]);
      place(s, h, w);
      ch = s.out_channels;
      h = s.out_height;
      w = s.out_width;
      out.ventral.push_back(std::move(s));
    }
    out.fusion_inputs += static_cast<std::size_t>(ch) * h * w;
  }
  if (uses_dorsal()) {
    int ch = out.common.out_channels, h = out.common.out_height, w = out.common.out_width;
    for (std::size_t i = 0; i < 4; ++i) {
      auto s = make("dorsal." + std::to_string(i), ch, dorsal_widths[i] * m, dorsal_strides[i]);
      place(s, h, w);
      ch = s.out_channels;
      h = s.out_height;
      w = s.out_width;
      out.dorsal.push_back(std::move(s));
    }
    out.fusion_inputs += static_cast<std::size_t>(ch) * h * w;
  }
  return out;
}

nlohmann::json to_json(const NetworkConfig& c) {
  return nlohmann::json{
      {"topology", to_string(c.topology)},
      {"neuron", to_string(c.neuron)},
      {"fusion", to_string(c.fusion)},
      {"readout", to_string(c.readout)},
      {"in_channels", c.in_channels},
      {"in_height", c.in_height},
      {"in_width", c.in_width},
      {"num_classes", c.num_classes},
      {"bin_us", c.bin_us},
      {"common_width", c.common_width},
      {"common_stride", c.common_stride},
      {"ventral_widths", c.ventral_widths},
      {"ventral_strides", c.ventral_strides},
      {"dorsal_widths", c.dorsal_widths},
      {"dorsal_strides", c.dorsal_strides},
      {"kernel", c.kernel},
      {"padding", c.padding},
      {"fusion_width", c.fusion_width},
      {"dropout", c.dropout},
      {"threshold", c.threshold},
      {"surrogate_slope", c.surrogate_slope},
      {"init_decay", c.init_decay},
      {"adlif_coupling", enum_name(c.adlif_coupling, kCouplings)},
      {"trainable_event_threshold", c.trainable_event_threshold},
  };
}

NetworkConfig network_config_from_json(const nlohmann::json& j, const NetworkConfig& base, const std::string& path) {
  NetworkConfig c = base;
  StrictObject o(j, path);
  auto read_enum = [&](std::string_view key, auto parse, auto& out) {
    std::string name;
    if (!o.read(key, name)) return;
    try {
      out = parse(name);
    } catch (const ArgumentError& e) {
      throw ValidationError(o.where(key) + ": " + e.what());
    }
  };
  read_enum("topology", parse_topology, c.topology);
  read_enum("neuron", parse_neuron_kind, c.neuron);
  read_enum("fusion", parse_fusion_kind, c.fusion);
  read_enum("readout", parse_readout_kind, c.readout);
  read_enum(
      "adlif_coupling", [](std::string_view n) { return parse_enum(n, kCouplings, "adlif coupling"); },
      c.adlif_coupling);
  o.read("in_channels", c.in_channels);
  o.read("in_height", c.in_height);
  o.read("in_width", c.in_width);
  o.read("num_classes", c.num_classes);
  o.read("bin_us", c.bin_us);
  o.read("common_width", c.common_width);
  o.read("common_stride", c.common_stride);
  o.read("ventral_widths", c.ventral_widths);
  o.read("ventral_strides", c.ventral_strides);
  o.read("dorsal_widths", c.dorsal_widths);
  o.read("dorsal_strides", c.dorsal_strides);
  o.read("kernel", c.kernel);
  o.read("padding", c.padding);
  o.read("fusion_width", c.fusion_width);
  o.read("dropout", c.dropout);
  o.read("threshold", c.threshold);
  o.read("surrogate_slope", c.surrogate_slope);
  o.read("init_decay", c.init_decay);
  o.read("trainable_event_threshold", c.trainable_event_threshold);
  o.finish();
  return c;
}

}  // namespace eevact
