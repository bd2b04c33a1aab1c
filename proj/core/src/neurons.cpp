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

#include "eevact/neurons.hpp"

#include <algorithm>
#include <cmath>

#include "eevact/error.hpp"
#include "eevact/ops.hpp"

namespace eevact {
namespace {

// Index of the per-channel coefficient for a flat element of [N, C, ...].
struct ChannelIndex {
  std::size_t channels = 1, inner = 1;
  std::size_t operator()(std::size_t flat) const { return (flat / inner) % channels; }
};

ChannelIndex channel_index(const Tensor& state, std::size_t channels) {
  if (state.rank() < 2 || state.dim(1) != channels) {
    throw ArgumentError("neuron coefficients of length " + std::to_string(channels) +
                        " do not match state " + shape_str(state.shape()));
  }
  return {channels, state.numel() / (state.dim(0) * channels)};
}

void clamp_raw(Tensor& raw) {
  for (float& r : raw.mutable_data()) r = std::clamp(r, -kRawDecayLimit, kRawDecayLimit);
}

void require_same(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ArgumentError(std::string(what) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                        shape_str(b.shape()));
  }
}

}  // namespace

float raw_from_decay(float decay) {
  const float d = std::clamp(decay, 1e-6f, 1.0f - 1e-6f);
  return std::log(d / (1.0f - d));
}

PlifParams PlifParams::make(float alpha) { return {Tensor::scalar(raw_from_decay(alpha), true)}; }

Tensor PlifParams::alpha() const { return ops::sigmoid(raw_alpha); }

void PlifParams::project() { clamp_raw(raw_alpha); }

AdlifParams AdlifParams::make(std::size_t channels, std::mt19937_64& rng, float alpha, float beta) {
  std::uniform_real_distribution<float> unit(0.0f, 1.0f);
  AdlifParams p;
  p.raw_alpha = Tensor::full({channels}, raw_from_decay(alpha), true);
  p.raw_beta = Tensor::full({channels}, raw_from_decay(beta), true);
  std::vector<float> a(channels), b(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    a[c] = unit(rng);
    b[c] = 2.0f * unit(rng);
  }
  p.a = Tensor({channels}, std::move(a), true);
  p.b = Tensor({channels}, std::move(b), true);
  return p;
}

void AdlifParams::project() {
  clamp_raw(raw_alpha);
  clamp_raw(raw_beta);
  for (float& v : a.mutable_data()) v = std::clamp(v, 0.0f, 1.0f);
  for (float& v : b.mutable_data()) v = std::clamp(v, 0.0f, 2.0f);
}

AdlifCoefficients resolve(const AdlifParams& params) {
  return {ops::sigmoid(params.raw_alpha), ops::sigmoid(params.raw_beta), params.a, params.b};
}

PlifStep plif_step(const Tensor& v, const Tensor& x, const Tensor& alpha, const SpikeConfig& config) {
  require_same(v, x, "plif_step");
  if (alpha.numel() != 1) throw ArgumentError("plif_step: alpha must be a single per-layer value");
  const float a = alpha.item();
  const float theta = config.threshold;
  std::vector<float> v_out(v.numel()), s_out(v.numel());
  for (std::size_t i = 0; i < v_out.size(); ++i) {
    const float vp = a * v[i] + (1.0f - a) * x[i];
    const float s = vp >= theta ? 1.0f : 0.0f;
    s_out[i] = s;
    v_out[i] = vp * (1.0f - s);
  }
  Tape* tape = recording_tape(v, x, alpha);
  PlifStep out{make_result(v.shape(), std::move(v_out), tape != nullptr),
               make_result(v.shape(), std::move(s_out), tape != nullptr)};
  if (tape) {
    tape->record([vi = v.impl(), xi = x.impl(), ai = alpha.impl(), vo = out.v.impl(), so = out.s.impl(), theta,
                  sg = config.surrogate] {
      if (vo->grad.empty() && so->grad.empty()) return;
      const float a = ai->data[0];
      double g_alpha = 0.0;
      for (std::size_t i = 0; i < vi->data.size(); ++i) {
        const float gv = vo->grad.empty() ? 0.0f : vo->grad[i];
        const float gs = so->grad.empty() ? 0.0f : so->grad[i];
        const float vp = a * vi->data[i] + (1.0f - a) * xi->data[i];
        const float s = so->data[i];
        const float g_vp = gv * (1.0f - s) + (gs - gv * vp) * sg.derivative(vp - theta);
        if (wants_grad(vi)) vi->grad_buffer()[i] += a * g_vp;
        if (wants_grad(xi)) xi->grad_buffer()[i] += (1.0f - a) * g_vp;
        g_alpha += static_cast<double>(g_vp) * (vi->data[i] - xi->data[i]);
      }
      if (wants_grad(ai)) ai->grad_buffer()[0] += static_cast<float>(g_alpha);
    });
  }
  return out;
}

AdlifStep adlif_step(const Tensor& v, const Tensor& w, const Tensor& x, const AdlifCoefficients& coeffs,
                     const SpikeConfig& config) {
  require_same(v, x, "adlif_step");
  require_same(w, x, "adlif_step");
  const std::size_t channels = coeffs.a.numel();
  if (coeffs.alpha.numel() != channels || coeffs.beta.numel() != channels || coeffs.b.numel() != channels) {
    throw ArgumentError("adlif_step: coefficient vectors differ in length");
  }
  const ChannelIndex ch = channel_index(x, channels);
  const float theta = config.threshold;
  const bool current = config.coupling == AdlifCoupling::current_membrane;
  std::vector<float> v_out(x.numel()), w_out(x.numel()), s_out(x.numel());
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const std::size_t c = ch(i);
    const float al = coeffs.alpha[c], be = coeffs.beta[c];
    const float vp = al * v[i] + (1.0f - al) * (x[i] - w[i]);
    const float s = vp >= theta ? 1.0f : 0.0f;
    const float vn = vp * (1.0f - s);
    const float u = current ? vn : v[i];
    s_out[i] = s;
    v_out[i] = vn;
    w_out[i] = be * w[i] + (1.0f - be) * (coeffs.a[c] * u + coeffs.b[c] * s);
  }
  Tape* tape = recording_tape(v, w, x, coeffs.alpha, coeffs.beta, coeffs.a, coeffs.b);
  const bool tracked = tape != nullptr;
  AdlifStep out{make_result(x.shape(), std::move(v_out), tracked), make_result(x.shape(), std::move(w_out), tracked),
                make_result(x.shape(), std::move(s_out), tracked)};
  if (tape) {
    tape->record([vi = v.impl(), wi = w.impl(), xi = x.impl(), al = coeffs.alpha.impl(), be = coeffs.beta.impl(),
                  ai = coeffs.a.impl(), bi = coeffs.b.impl(), vo = out.v.impl(), wo = out.w.impl(),
                  so = out.s.impl(), ch, theta, current, sg = config.surrogate] {
      if (vo->grad.empty() && wo->grad.empty() && so->grad.empty()) return;
      const std::size_t channels = ch.channels;
      std::vector<double> g_al(channels, 0.0), g_be(channels, 0.0), g_a(channels, 0.0), g_b(channels, 0.0);
      for (std::size_t i = 0; i < xi->data.size(); ++i) {
        const std::size_t c = ch(i);
        const float alpha = al->data[c], beta = be->data[c], a = ai->data[c], b = bi->data[c];
        const float gv_out = vo->grad.empty() ? 0.0f : vo->grad[i];
        const float gw = wo->grad.empty() ? 0.0f : wo->grad[i];
        const float gs_out = so->grad.empty() ? 0.0f : so->grad[i];
        const float v_prev = vi->data[i], w_prev = wi->data[i], x = xi->data[i];
        const float drive = x - w_prev;
        const float vp = alpha * v_prev + (1.0f - alpha) * drive;
        const float s = so->data[i];
        const float vn = vo->data[i];
        const float u = current ? vn : v_prev;

        // w' = beta * w + (1 - beta) * (a * u + b * s)
        g_be[c] += static_cast<double>(gw) * (w_prev - (a * u + b * s));
        g_a[c] += static_cast<double>(gw) * (1.0f - beta) * u;
        g_b[c] += static_cast<double>(gw) * (1.0f - beta) * s;
        float g_wprev = beta * gw;
        const float g_u = gw * (1.0f - beta) * a;
        const float g_s = gs_out + gw * (1.0f - beta) * b;
        const float g_vn = gv_out + (current ? g_u : 0.0f);
        float g_vprev = current ? 0.0f : g_u;

        // vn = vp * (1 - s), s = H(vp - theta)
        const float g_vp = g_vn * (1.0f - s) + (g_s - g_vn * vp) * sg.derivative(vp - theta);
        g_vprev += alpha * g_vp;
        g_wprev -= (1.0f - alpha) * g_vp;
        g_al[c] += static_cast<double>(g_vp) * (v_prev - drive);
        if (wants_grad(xi)) xi->grad_buffer()[i] += (1.0f - alpha) * g_vp;
        if (wants_grad(vi)) vi->grad_buffer()[i] += g_vprev;
        if (wants_grad(wi)) wi->grad_buffer()[i] += g_wprev;
      }
      const auto flush = [channels](const detail::TensorPtr& t, const std::vector<double>& g) {
        if (!wants_grad(t)) return;
        auto& buf = t->grad_buffer();
        for (std::size_t c = 0; c < channels; ++c) buf[c] += static_cast<float>(g[c]);
      };
      flush(al, g_al);
      flush(be, g_be);
      flush(ai, g_a);
      flush(bi, g_b);
    });
  }
  return out;
}

LiParams LiParams::make(std::size_t in_features, std::size_t classes, std::mt19937_64& rng, float alpha) {
  const float bound = 1.0f / std::sqrt(static_cast<float>(in_features));
  std::uniform_real_distribution<float> dist(-bound, bound);
  std::vector<float> w(classes * in_features);
  for (float& x : w) x = dist(rng);
  return {Tensor({classes, in_features}, std::move(w), true), Tensor::zeros({classes}, true),
          Tensor::full({classes}, raw_from_decay(alpha), true)};
}

void LiParams::project() { clamp_raw(raw_alpha); }

Tensor li_step(const Tensor& v, const Tensor& e, const LiParams& params, const Tensor& alpha) {
  const Tensor drive = ops::linear(e, params.weight, params.bias);
  if (drive.shape() != v.shape()) {
    throw ArgumentError("li_step: readout state " + shape_str(v.shape()) + " does not match projection " +
                        shape_str(drive.shape()));
  }
  return ops::leaky_integrate(v, drive, alpha);
}

}  // namespace eevact
