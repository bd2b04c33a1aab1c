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

#include "eevact/synops.hpp"

#include <numeric>

#include "eevact/error.hpp"
#include "eevact/network.hpp"

namespace eevact {
namespace {

// Output rows (or columns) whose receptive field covers input index i.
std::uint32_t coverage(int i, int out_extent, int kernel, int stride, int padding) {
  std::uint32_t n = 0;
  for (int o = 0; o < out_extent; ++o) {
    const int k = i + padding - o * stride;
    if (k >= 0 && k < kernel) ++n;
  }
  return n;
}

SynOpsReport empty_report(const Network& net, std::size_t steps) {
  SynOpsReport r;
  r.steps = steps;
  r.macs_per_step.assign(steps, 0.0);
  r.acs_per_step.assign(steps, 0.0);
  for (const auto& c : net.connections()) r.connection_names.push_back(c.name);
  r.connection_totals.assign(net.connections().size(), 0.0);
  return r;
}

void finish(SynOpsReport& r) {
  r.macs = std::accumulate(r.macs_per_step.begin(), r.macs_per_step.end(), 0.0);
  r.acs = std::accumulate(r.acs_per_step.begin(), r.acs_per_step.end(), 0.0);
}

}  // namespace

std::vector<std::uint32_t> conv_fanout(const ConvGeometry& g) {
  std::vector<std::uint32_t> rows(static_cast<std::size_t>(g.in_height)), cols(static_cast<std::size_t>(g.in_width));
  for (int y = 0; y < g.in_height; ++y) rows[y] = coverage(y, g.out_height, g.kernel, g.stride, g.padding);
  for (int x = 0; x < g.in_width; ++x) cols[x] = coverage(x, g.out_width, g.kernel, g.stride, g.padding);
  std::vector<std::uint32_t> out;
  out.reserve(g.in_elements());
  for (int c = 0; c < g.in_channels; ++c) {
    for (int y = 0; y < g.in_height; ++y) {
      for (int x = 0; x < g.in_width; ++x) out.push_back(static_cast<std::uint32_t>(g.out_channels) * rows[y] * cols[x]);
    }
  }
  return out;
}

Connection make_conv_connection(std::string name, OpKind kind, const ConvGeometry& g) {
  Connection c;
  c.name = std::move(name);
  c.kind = kind;
  c.shape = ConnectionShape::conv;
  c.conv = g;
  c.fanout = conv_fanout(g);
  return c;
}

Connection make_dense_connection(std::string name, OpKind kind, std::size_t in, std::size_t out) {
  Connection c;
  c.name = std::move(name);
  c.kind = kind;
  c.shape = ConnectionShape::dense;
  c.in_features = in;
  c.out_features = out;
  c.fanout.assign(in, static_cast<std::uint32_t>(out));
  return c;
}

Connection make_elementwise_connection(std::string name, OpKind kind, std::size_t features,
                                       std::uint32_t multiplicity) {
  Connection c;
  c.name = std::move(name);
  c.kind = kind;
  c.shape = ConnectionShape::elementwise;
  c.in_features = features;
  c.multiplicity = multiplicity;
  return c;
}

double SynOpsReport::cumulative_macs(std::size_t t) const {
  return std::accumulate(macs_per_step.begin(), macs_per_step.begin() + static_cast<std::ptrdiff_t>(t + 1), 0.0);
}

double SynOpsReport::cumulative_acs(std::size_t t) const {
  return std::accumulate(acs_per_step.begin(), acs_per_step.begin() + static_cast<std::ptrdiff_t>(t + 1), 0.0);
}

SynOpsReport count_synops(const ForwardTrace& trace, const Network& net) {
  const auto& conns = net.connections();
  if (trace.mode != ops::Mode::eval) throw ArgumentError("count_synops: trace must come from an eval-mode forward");
  if (trace.synops.size() != conns.size() || trace.connection_names.size() != conns.size()) {
    throw ArgumentError("count_synops: trace has " + std::to_string(trace.synops.size()) +
                        " connections, network has " + std::to_string(conns.size()));
  }
  for (std::size_t i = 0; i < conns.size(); ++i) {
    if (trace.connection_names[i] != conns[i].name || trace.synops[i].size() != trace.steps) {
      throw ArgumentError("count_synops: trace connection '" + trace.connection_names[i] +
                          "' does not match network connection '" + conns[i].name + "'");
    }
  }
  if (trace.batch == 0) throw ArgumentError("count_synops: empty batch");
  SynOpsReport r = empty_report(net, trace.steps);
  const double per_sample = 1.0 / static_cast<double>(trace.batch);
  for (std::size_t i = 0; i < conns.size(); ++i) {
    auto& per_step = conns[i].kind == OpKind::mac ? r.macs_per_step : r.acs_per_step;
    for (std::size_t t = 0; t < trace.steps; ++t) {
      const double v = static_cast<double>(trace.synops[i][t]) * per_sample;
      per_step[t] += v;
      r.connection_totals[i] += v;
    }
  }
  finish(r);
  return r;
}

SynOpsReport dense_synops(const Network& net, std::size_t steps) {
  SynOpsReport r = empty_report(net, steps);
  const auto& conns = net.connections();
  for (std::size_t i = 0; i < conns.size(); ++i) {
    const Connection& c = conns[i];
    double per_step = 0.0;
    if (c.shape == ConnectionShape::elementwise) {
      per_step = static_cast<double>(c.in_features) * c.multiplicity;
    } else {
      for (std::uint32_t f : c.fanout) per_step += f;
    }
    auto& dst = c.kind == OpKind::mac ? r.macs_per_step : r.acs_per_step;
    for (std::size_t t = 0; t < steps; ++t) dst[t] += per_step;
    r.connection_totals[i] = per_step * static_cast<double>(steps);
  }
  finish(r);
  return r;
}

}  // namespace eevact
