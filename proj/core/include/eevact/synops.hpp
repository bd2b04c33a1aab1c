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

#ifndef EEVACT_SYNOPS_HPP_
#define EEVACT_SYNOPS_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace eevact {

class Network;
struct ForwardTrace;

// Multiply-accumulate (real-valued presynaptic signal) or accumulate-only
// (binary spike) synaptic operation.
enum class OpKind { mac, ac };

enum class ConnectionShape { conv, dense, elementwise };

struct ConvGeometry {
  int in_channels = 0, in_height = 0, in_width = 0;
  int out_channels = 0, out_height = 0, out_width = 0;
  int kernel = 1, stride = 1, padding = 0;

  std::size_t in_elements() const { return static_cast<std::size_t>(in_channels) * in_height * in_width; }
};

// One weighted projection, as seen by the SynOps counter. A presynaptic
// element that is nonzero at a step costs fanout[element] operations.
// Elementwise connections model dense state updates and cost
// `multiplicity` operations per element per step regardless of activity.
struct Connection {
  std::string name;
  OpKind kind = OpKind::ac;
  ConnectionShape shape = ConnectionShape::dense;
  ConvGeometry conv;             // shape == conv
  std::size_t in_features = 0;   // dense / elementwise presynaptic width
  std::size_t out_features = 0;  // dense
  std::uint32_t multiplicity = 1;
  std::vector<std::uint32_t> fanout;

  std::size_t in_elements() const { return shape == ConnectionShape::conv ? conv.in_elements() : in_features; }
};

// Number of output positions each input position of a strided, padded conv
// contributes to, times out_channels.
std::vector<std::uint32_t> conv_fanout(const ConvGeometry& g);
Connection make_conv_connection(std::string name, OpKind kind, const ConvGeometry& g);
Connection make_dense_connection(std::string name, OpKind kind, std::size_t in, std::size_t out);
Connection make_elementwise_connection(std::string name, OpKind kind, std::size_t features,
                                       std::uint32_t multiplicity);

// Effective synaptic operations, averaged per sample.
struct SynOpsReport {
  std::size_t steps = 0;
  std::vector<double> macs_per_step;
  std::vector<double> acs_per_step;
  std::vector<std::string> connection_names;
  std::vector<double> connection_totals;
  double macs = 0.0;
  double acs = 0.0;

  // Cumulative totals over steps [0, t].
  double cumulative_macs(std::size_t t) const;
  double cumulative_acs(std::size_t t) const;
};

// Throws ArgumentError when the trace was not produced by `net` or was
// recorded in train mode.
SynOpsReport count_synops(const ForwardTrace& trace, const Network& net);

// Operations if every presynaptic element were active at every step, per
// sample. Effective counts never exceed these.
SynOpsReport dense_synops(const Network& net, std::size_t steps);

}  // namespace eevact

#endif  // EEVACT_SYNOPS_HPP_
