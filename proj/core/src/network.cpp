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

#include "eevact/network.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "eevact/error.hpp"

namespace eevact {
namespace {

Tensor uniform_tensor(Shape shape, float bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<float> dist(-bound, bound);
  std::vector<float> data(shape_numel(shape));
  for (float& x : data) x = dist(rng);
  return Tensor(std::move(shape), std::move(data), true);
}

ConvGeometry geometry_of(const ConvSpikeLayerSpec& s) {
  return {s.in_channels, s.in_height, s.in_width, s.out_channels, s.out_height, s.out_width,
          s.kernel,      s.stride,    s.padding};
}

struct ConvBlock {
  ConvSpikeLayerSpec spec;
  Tensor weight, gamma, beta;
  ops::BatchNormStats bn;
  PlifParams plif;
  AdlifParams adlif;
  std::size_t connection = 0;

  static ConvBlock make(const ConvSpikeLayerSpec& spec, const NetworkConfig& config, std::mt19937_64& rng) {
    ConvBlock b;
    b.spec = spec;
    const auto cin = static_cast<std::size_t>(spec.in_channels), cout = static_cast<std::size_t>(spec.out_channels),
               k = static_cast<std::size_t>(spec.kernel);
    b.weight = uniform_tensor({cout, cin, k, k}, 1.0f / std::sqrt(static_cast<float>(cin * k * k)), rng);
    b.gamma = Tensor::full({cout}, 1.0f, true);
    b.beta = Tensor::zeros({cout}, true);
    b.bn = ops::BatchNormStats::identity(cout);
    if (spec.neuron == NeuronKind::plif) {
      b.plif = PlifParams::make(config.init_decay);
    } else {
      b.adlif = AdlifParams::make(cout, rng, config.init_decay);
    }
    return b;
  }
};

// Membrane (and adaptation) state of one spiking population.
struct NeuronState {
  Tensor v, w;
};

}  // namespace

struct Network::Impl {
  NetworkConfig config;
  StreamLayout layout;
  SpikeConfig spike;
  ConvBlock common;
  std::vector<ConvBlock> ventral, dorsal;

  EguParams egu;
  EgruParams egru;
  Tensor fc_weight, fc_bias;
  PlifParams fc_plif;
  AdlifParams fc_adlif;
  LiParams readout;

  std::vector<Connection> connections;
  std::size_t conn_fusion_input = 0, conn_fusion_ur = 0, conn_fusion_z = 0, conn_fusion_state = 0,
              conn_readout = 0;
  std::mt19937_64 dropout_rng;

  std::size_t fusion_out() const {
    return config.fusion == FusionKind::none ? layout.fusion_inputs : static_cast<std::size_t>(config.fusion_width);
  }

  std::size_t add_connection(Connection c) {
    connections.push_back(std::move(c));
    return connections.size() - 1;
  }

  // Per-forward scratch.
  struct Run {
    ForwardTrace* trace = nullptr;
    ops::Mode mode = ops::Mode::eval;
    bool record_activity = false;
    std::size_t batch = 0;
    Tensor plif_alpha_cache;
  };

  void tally(Run& run, std::size_t conn, const Tensor& pre, std::size_t t0, std::size_t steps) const {
    const Connection& c = connections[conn];
    const std::size_t n = run.batch, elems = c.in_elements();
    auto& counts = run.trace->synops[conn];
    for (std::size_t k = 0; k < steps; ++k) {
      std::uint64_t ops_count = 0;
      if (c.shape == ConnectionShape::elementwise) {
        ops_count = static_cast<std::uint64_t>(n) * elems * c.multiplicity;
      } else {
        const float* base = pre.data().data() + k * n * elems;
        for (std::size_t s = 0; s < n; ++s) {
          const float* row = base + s * elems;
          for (std::size_t e = 0; e < elems; ++e) {
            if (row[e] != 0.0f) ops_count += c.fanout[e];
          }
        }
      }
      counts[t0 + k] += ops_count;
      if (run.record_activity) {
        std::vector<std::uint8_t> mask(n * elems, 1);
        if (c.shape != ConnectionShape::elementwise) {
          const float* base = pre.data().data() + k * n * elems;
          for (std::size_t i = 0; i < n * elems; ++i) mask[i] = base[i] != 0.0f ? 1 : 0;
        }
        run.trace->activity[conn][t0 + k] = std::move(mask);
      }
    }
  }

  void count_spikes(Run& run, std::size_t layer, const Tensor& s, std::size_t t) const {
    std::uint64_t n = 0;
    for (float x : s.data()) n += x != 0.0f ? 1 : 0;
    run.trace->spike_counts[layer][t] += n;
  }

  // Conv + BN over `steps` stacked bins, then the neuron recurrence bin by bin.
  Tensor run_block(Run& run, ConvBlock& block, NeuronState& state, const Tensor& x, std::size_t t0,
                   std::size_t steps, std::size_t layer, const Tensor& alpha, const AdlifCoefficients& coeffs) {
    tally(run, block.connection, x, t0, steps);
    const Tensor conv = ops::conv2d(x, block.weight, block.spec.stride, block.spec.padding);
    const Tensor y = ops::batch_norm(conv, block.gamma, block.beta, block.bn, run.mode);
    const std::size_t n = run.batch;
    std::vector<Tensor> spikes;
    spikes.reserve(steps);
    for (std::size_t k = 0; k < steps; ++k) {
      const Tensor yk = steps == 1 ? y : ops::slice(y, k * n, (k + 1) * n);
      if (block.spec.neuron == NeuronKind::plif) {
        auto step = plif_step(state.v, yk, alpha, spike);
        state.v = step.v;
        spikes.push_back(step.s);
      } else {
        auto step = adlif_step(state.v, state.w, yk, coeffs, spike);
        state.v = step.v;
        state.w = step.w;
        spikes.push_back(step.s);
      }
      count_spikes(run, layer, spikes.back(), t0 + k);
    }
    Tensor s = steps == 1 ? spikes.front() : ops::concat(spikes, 0);
    if (run.mode == ops::Mode::train && block.spec.dropout > 0.0f) {
      s = ops::dropout(s, block.spec.dropout, dropout_rng, run.mode);
    }
    return s;
  }

  static NeuronState zero_state(const ConvSpikeLayerSpec& spec, std::size_t n) {
    const Shape shape{n, static_cast<std::size_t>(spec.out_channels), static_cast<std::size_t>(spec.out_height),
                      static_cast<std::size_t>(spec.out_width)};
    return {Tensor::zeros(shape), Tensor::zeros(shape)};
  }

  std::vector<ConvBlock*> blocks() {
    std::vector<ConvBlock*> out{&common};
    for (auto& b : ventral) out.push_back(&b);
    for (auto& b : dorsal) out.push_back(&b);
    return out;
  }
  std::vector<const ConvBlock*> blocks() const {
    std::vector<const ConvBlock*> out{&common};
    for (const auto& b : ventral) out.push_back(&b);
    for (const auto& b : dorsal) out.push_back(&b);
    return out;
  }

  ForwardTrace forward(const Tensor& frames, ops::Mode mode, const TraceOptions& options);
};

Network::Network(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
Network::Network(Network&&) noexcept = default;
Network& Network::operator=(Network&&) noexcept = default;
Network::~Network() = default;

Network Network::build(const NetworkConfig& config, std::uint64_t seed) {
  config.validate();
  auto impl = std::make_unique<Impl>();
  impl->config = config;
  impl->layout = config.layout();
  impl->spike = config.spike_config();
  std::mt19937_64 rng(seed);
  impl->dropout_rng.seed(seed ^ 0x9e3779b97f4a7c15ULL);

  const StreamLayout& layout = impl->layout;
  impl->common = ConvBlock::make(layout.common, config, rng);
  impl->common.connection = impl->add_connection(
      make_conv_connection(layout.common.name + ".conv", OpKind::mac, geometry_of(layout.common)));
  for (const auto& spec : layout.ventral) {
    impl->ventral.push_back(ConvBlock::make(spec, config, rng));
    impl->ventral.back().connection =
        impl->add_connection(make_conv_connection(spec.name + ".conv", OpKind::ac, geometry_of(spec)));
  }
  for (const auto& spec : layout.dorsal) {
    impl->dorsal.push_back(ConvBlock::make(spec, config, rng));
    impl->dorsal.back().connection =
        impl->add_connection(make_conv_connection(spec.name + ".conv", OpKind::ac, geometry_of(spec)));
  }

  const std::size_t fin = layout.fusion_inputs;
  const auto hidden = static_cast<std::size_t>(config.fusion_width);
  switch (config.fusion) {
    case FusionKind::egu:
      impl->egu = EguParams::make(fin, hidden, rng, config.trainable_event_threshold);
      impl->conn_fusion_input = impl->add_connection(make_dense_connection("fusion.input", OpKind::ac, fin, 2 * hidden));
      impl->conn_fusion_state =
          impl->add_connection(make_elementwise_connection("fusion.state", OpKind::mac, hidden, 2));
      break;
    case FusionKind::egru:
      impl->egru = EgruParams::make(fin, hidden, rng, config.trainable_event_threshold);
      impl->conn_fusion_input = impl->add_connection(make_dense_connection("fusion.input", OpKind::ac, fin, 3 * hidden));
      impl->conn_fusion_ur =
          impl->add_connection(make_dense_connection("fusion.recurrent_ur", OpKind::mac, hidden, 2 * hidden));
      impl->conn_fusion_z =
          impl->add_connection(make_dense_connection("fusion.recurrent_z", OpKind::mac, hidden, hidden));
      impl->conn_fusion_state =
          impl->add_connection(make_elementwise_connection("fusion.state", OpKind::mac, hidden, 2));
      break;
    case FusionKind::plif:
    case FusionKind::adlif:
      impl->fc_weight = uniform_tensor({hidden, fin}, std::sqrt(6.0f / static_cast<float>(fin)), rng);
      impl->fc_bias = Tensor::zeros({hidden}, true);
      if (config.fusion == FusionKind::plif) {
        impl->fc_plif = PlifParams::make(config.init_decay);
      } else {
        impl->fc_adlif = AdlifParams::make(hidden, rng, config.init_decay);
      }
      impl->conn_fusion_input = impl->add_connection(make_dense_connection("fusion.input", OpKind::ac, fin, hidden));
      break;
    case FusionKind::none:
      break;
  }
  const bool real_valued = config.fusion == FusionKind::egu || config.fusion == FusionKind::egru;
  const std::size_t readout_in = impl->fusion_out();
  impl->readout = LiParams::make(readout_in, static_cast<std::size_t>(config.num_classes), rng, config.init_decay);
  impl->conn_readout = impl->add_connection(make_dense_connection(
      "readout", real_valued ? OpKind::mac : OpKind::ac, readout_in, static_cast<std::size_t>(config.num_classes)));
  return Network(std::move(impl));
}

const NetworkConfig& Network::config() const { return impl_->config; }
const StreamLayout& Network::layout() const { return impl_->layout; }
const std::vector<Connection>& Network::connections() const { return impl_->connections; }

std::vector<std::string> Network::layer_names() const {
  std::vector<std::string> names;
  for (const ConvBlock* b : impl_->blocks()) names.push_back(b->spec.name);
  if (impl_->config.fusion != FusionKind::none) names.emplace_back("fusion");
  return names;
}

void Network::seed_dropout(std::uint64_t seed) { impl_->dropout_rng.seed(seed); }

std::vector<ParamRef> Network::parameters() const {
  std::vector<ParamRef> out;
  auto add = [&](std::string name, const Tensor& t, ParamGroup g) {
    if (t.defined() && t.requires_grad()) out.push_back({std::move(name), t, g});
  };
  auto add_neuron = [&](const std::string& prefix, NeuronKind kind, const PlifParams& plif,
                        const AdlifParams& adlif) {
    if (kind == NeuronKind::plif) {
      add(prefix + ".raw_alpha", plif.raw_alpha, ParamGroup::dynamics);
    } else {
      add(prefix + ".raw_alpha", adlif.raw_alpha, ParamGroup::dynamics);
      add(prefix + ".raw_beta", adlif.raw_beta, ParamGroup::dynamics);
      add(prefix + ".a", adlif.a, ParamGroup::dynamics);
      add(prefix + ".b", adlif.b, ParamGroup::dynamics);
    }
  };
  for (const ConvBlock* b : impl_->blocks()) {
    const std::string& n = b->spec.name;
    add(n + ".conv.weight", b->weight, ParamGroup::weight);
    add(n + ".bn.gamma", b->gamma, ParamGroup::norm);
    add(n + ".bn.beta", b->beta, ParamGroup::norm);
    add_neuron(n + ".neuron", b->spec.neuron, b->plif, b->adlif);
  }
  const Impl& m = *impl_;
  switch (m.config.fusion) {
    case FusionKind::egu:
      add("fusion.wu", m.egu.wu, ParamGroup::weight);
      add("fusion.bu", m.egu.bu, ParamGroup::bias);
      add("fusion.wz", m.egu.wz, ParamGroup::weight);
      add("fusion.bz", m.egu.bz, ParamGroup::bias);
      add("fusion.theta", m.egu.theta, ParamGroup::threshold);
      break;
    case FusionKind::egru:
      add("fusion.wu", m.egru.wu, ParamGroup::weight);
      add("fusion.bu", m.egru.bu, ParamGroup::bias);
      add("fusion.wr", m.egru.wr, ParamGroup::weight);
      add("fusion.br", m.egru.br, ParamGroup::bias);
      add("fusion.wz", m.egru.wz, ParamGroup::weight);
      add("fusion.bz", m.egru.bz, ParamGroup::bias);
      add("fusion.uu", m.egru.uu, ParamGroup::weight);
      add("fusion.ur", m.egru.ur, ParamGroup::weight);
      add("fusion.uz", m.egru.uz, ParamGroup::weight);
      add("fusion.theta", m.egru.theta, ParamGroup::threshold);
      break;
    case FusionKind::plif:
    case FusionKind::adlif:
      add("fusion.weight", m.fc_weight, ParamGroup::weight);
      add("fusion.bias", m.fc_bias, ParamGroup::bias);
      add_neuron("fusion.neuron", m.config.fusion == FusionKind::plif ? NeuronKind::plif : NeuronKind::adlif,
                 m.fc_plif, m.fc_adlif);
      break;
    case FusionKind::none:
      break;
  }
  add("readout.weight", m.readout.weight, ParamGroup::weight);
  add("readout.bias", m.readout.bias, ParamGroup::bias);
  add("readout.raw_alpha", m.readout.raw_alpha, ParamGroup::dynamics);
  return out;
}

std::vector<BufferRef> Network::buffers() {
  std::vector<BufferRef> out;
  for (ConvBlock* b : impl_->blocks()) {
    out.push_back({b->spec.name + ".bn.running_mean", &b->bn.running_mean});
    out.push_back({b->spec.name + ".bn.running_var", &b->bn.running_var});
  }
  return out;
}

std::size_t Network::count_parameters() const {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.tensor.numel();
  return n;
}

std::size_t count_parameters(const Network& net) { return net.count_parameters(); }

void Network::project() {
  Impl& m = *impl_;
  for (ConvBlock* b : m.blocks()) {
    if (b->spec.neuron == NeuronKind::plif) {
      b->plif.project();
    } else {
      b->adlif.project();
    }
  }
  switch (m.config.fusion) {
    case FusionKind::egu:
      m.egu.project();
      break;
    case FusionKind::egru:
      m.egru.project();
      break;
    case FusionKind::plif:
      m.fc_plif.project();
      break;
    case FusionKind::adlif:
      m.fc_adlif.project();
      break;
    case FusionKind::none:
      break;
  }
  m.readout.project();
}

Tensor batch_frames(std::span<const FrameSequence> batch) {
  if (batch.empty()) throw ArgumentError("batch_frames: empty batch");
  const FrameSequence& first = batch.front();
  for (const auto& s : batch) {
    if (s.bins != first.bins || s.height != first.height || s.width != first.width) {
      throw ArgumentError("batch_frames: sequences differ in extent");
    }
  }
  const std::size_t t_steps = first.bins, n = batch.size(), fs = first.frame_size();
  std::vector<float> data(t_steps * n * fs);
  for (std::size_t t = 0; t < t_steps; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const float* src = batch[i].data.data() + t * fs;
      std::copy(src, src + fs, data.begin() + static_cast<std::ptrdiff_t>((t * n + i) * fs));
    }
  }
  return Tensor({t_steps, n, FrameSequence::kChannels, first.height, first.width}, std::move(data));
}

ForwardTrace Network::forward(const FrameSequence& seq, ops::Mode mode, const TraceOptions& options) {
  return forward(std::span<const FrameSequence>(&seq, 1), mode, options);
}

ForwardTrace Network::forward(std::span<const FrameSequence> batch, ops::Mode mode, const TraceOptions& options) {
  return forward(batch_frames(batch), mode, options);
}

ForwardTrace Network::forward(const Tensor& frames, ops::Mode mode, const TraceOptions& options) {
  return impl_->forward(frames, mode, options);
}

ForwardTrace Network::Impl::forward(const Tensor& frames, ops::Mode mode, const TraceOptions& options) {
  const Shape expected_tail{static_cast<std::size_t>(config.in_channels), static_cast<std::size_t>(config.in_height),
                            static_cast<std::size_t>(config.in_width)};
  if (frames.rank() != 5 || Shape(frames.shape().begin() + 2, frames.shape().end()) != expected_tail ||
      frames.dim(0) == 0 || frames.dim(1) == 0) {
    throw ArgumentError("forward: input " + shape_str(frames.shape()) + " does not match [T, N, " +
                        shape_str(expected_tail).substr(1));
  }
  const std::size_t t_steps = frames.dim(0), n = frames.dim(1);
  const Tensor flat = ops::reshape(frames, {t_steps * n, expected_tail[0], expected_tail[1], expected_tail[2]});

  ForwardTrace trace;
  trace.steps = t_steps;
  trace.batch = n;
  trace.mode = mode;
  for (const ConvBlock* b : blocks()) trace.layer_names.push_back(b->spec.name);
  if (config.fusion != FusionKind::none) trace.layer_names.emplace_back("fusion");
  trace.spike_counts.assign(trace.layer_names.size(), std::vector<std::uint64_t>(t_steps, 0));
  for (const auto& c : connections) trace.connection_names.push_back(c.name);
  trace.synops.assign(connections.size(), std::vector<std::uint64_t>(t_steps, 0));
  if (options.record_activity) {
    trace.activity.assign(connections.size(), std::vector<std::vector<std::uint8_t>>(t_steps));
  }

  Run run;
  run.trace = &trace;
  run.mode = mode;
  run.record_activity = options.record_activity;
  run.batch = n;

  // Resolved neuron coefficients, shared by every step of this pass.
  struct Coeffs {
    Tensor alpha;
    AdlifCoefficients adlif;
  };
  auto resolve_block = [](const ConvBlock& b) {
    Coeffs c;
    if (b.spec.neuron == NeuronKind::plif) {
      c.alpha = b.plif.alpha();
    } else {
      c.adlif = resolve(b.adlif);
    }
    return c;
  };
  const Coeffs common_c = resolve_block(common);
  std::vector<Coeffs> ventral_c, dorsal_c;
  for (const auto& b : ventral) ventral_c.push_back(resolve_block(b));
  for (const auto& b : dorsal) dorsal_c.push_back(resolve_block(b));
  Tensor fc_alpha;
  AdlifCoefficients fc_coeffs;
  if (config.fusion == FusionKind::plif) fc_alpha = fc_plif.alpha();
  if (config.fusion == FusionKind::adlif) fc_coeffs = resolve(fc_adlif);
  const Tensor readout_alpha = ops::sigmoid(readout.raw_alpha);

  NeuronState common_s = zero_state(common.spec, n);
  std::vector<NeuronState> ventral_s, dorsal_s;
  for (const auto& b : ventral) ventral_s.push_back(zero_state(b.spec, n));
  for (const auto& b : dorsal) dorsal_s.push_back(zero_state(b.spec, n));
  const auto hidden = static_cast<std::size_t>(config.fusion_width);
  GatedState gated = GatedState::zeros(n, hidden);
  NeuronState fc_state{Tensor::zeros({n, hidden}), Tensor::zeros({n, hidden})};
  Tensor v_readout = Tensor::zeros({n, static_cast<std::size_t>(config.num_classes)});
  std::vector<Tensor> history;
  history.reserve(t_steps);

  const std::size_t fusion_layer = trace.layer_names.size() - 1;
  const std::size_t chunk =
      mode == ops::Mode::train ? t_steps : std::clamp<std::size_t>(options.time_chunk, 1, t_steps);

  for (std::size_t t0 = 0; t0 < t_steps; t0 += chunk) {
    const std::size_t steps = std::min(chunk, t_steps - t0);
    const Tensor x = (t0 == 0 && steps == t_steps) ? flat : ops::slice(flat, t0 * n, (t0 + steps) * n);
    std::size_t layer = 0;
    const Tensor h = run_block(run, common, common_s, x, t0, steps, layer++, common_c.alpha, common_c.adlif);

    std::vector<Tensor> features;
    if (!ventral.empty()) {
      Tensor hv = h;
      for (std::size_t i = 0; i < ventral.size(); ++i) {
        hv = run_block(run, ventral[i], ventral_s[i], hv, t0, steps, layer++, ventral_c[i].alpha, ventral_c[i].adlif);
      }
      features.push_back(ops::reshape(hv, {steps * n, hv.numel() / (steps * n)}));
    }
    if (!dorsal.empty()) {
      Tensor hd = h;
      for (std::size_t i = 0; i < dorsal.size(); ++i) {
        hd = run_block(run, dorsal[i], dorsal_s[i], hd, t0, steps, layer++, dorsal_c[i].alpha, dorsal_c[i].adlif);
      }
      features.push_back(ops::reshape(hd, {steps * n, hd.numel() / (steps * n)}));
    }
    const Tensor f = features.size() == 1 ? features.front() : ops::concat(features, 1);

    for (std::size_t k = 0; k < steps; ++k) {
      const std::size_t t = t0 + k;
      const Tensor ft = steps == 1 ? f : ops::slice(f, k * n, (k + 1) * n);
      Tensor e;
      switch (config.fusion) {
        case FusionKind::egu: {
          tally(run, conn_fusion_input, ft, t, 1);
          tally(run, conn_fusion_state, ft, t, 1);
          auto step = egu_step(egu, gated, ft, spike.surrogate);
          gated = step.state;
          e = step.e;
          count_spikes(run, fusion_layer, e, t);
          break;
        }
        case FusionKind::egru: {
          tally(run, conn_fusion_input, ft, t, 1);
          tally(run, conn_fusion_ur, gated.c, t, 1);
          auto step = egru_step(egru, gated, ft, spike.surrogate);
          // The candidate's recurrent map sees r * c.
          std::vector<float> rc(step.r.numel());
          for (std::size_t i = 0; i < rc.size(); ++i) rc[i] = step.r[i] * gated.c[i];
          tally(run, conn_fusion_z, Tensor(gated.c.shape(), std::move(rc)), t, 1);
          tally(run, conn_fusion_state, ft, t, 1);
          gated = step.state;
          e = step.e;
          count_spikes(run, fusion_layer, e, t);
          break;
        }
        case FusionKind::plif:
        case FusionKind::adlif: {
          tally(run, conn_fusion_input, ft, t, 1);
          const Tensor drive = ops::linear(ft, fc_weight, fc_bias);
          if (config.fusion == FusionKind::plif) {
            auto step = plif_step(fc_state.v, drive, fc_alpha, spike);
            fc_state.v = step.v;
            e = step.s;
          } else {
            auto step = adlif_step(fc_state.v, fc_state.w, drive, fc_coeffs, spike);
            fc_state.v = step.v;
            fc_state.w = step.w;
            e = step.s;
          }
          count_spikes(run, fusion_layer, e, t);
          if (mode == ops::Mode::train && config.dropout > 0.0f) {
            e = ops::dropout(e, config.dropout, dropout_rng, mode);
          }
          break;
        }
        case FusionKind::none:
          e = ft;
          break;
      }
      tally(run, conn_readout, e, t, 1);
      v_readout = li_step(v_readout, e, readout, readout_alpha);
      history.push_back(v_readout);
    }
  }
  trace.readout = ops::stack(history);
  return trace;
}

}  // namespace eevact
