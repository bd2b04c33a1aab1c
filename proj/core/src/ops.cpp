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

#include "eevact/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "eevact/error.hpp"

namespace eevact::ops {
namespace {

using detail::TensorPtr;
using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMat>;
using ConstRowMap = Eigen::Map<const RowMat>;

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.defined() || !b.defined()) throw ArgumentError(std::string(op) + ": undefined tensor");
  if (a.shape() != b.shape()) {
    throw ArgumentError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                        shape_str(b.shape()));
  }
}

// Splits a tensor around `axis` into (outer, axis, inner) extents.
struct AxisSplit {
  std::size_t outer = 1, extent = 1, inner = 1;
};

AxisSplit split_axis(const Shape& shape, std::size_t axis) {
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.extent = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

// Broadcast of a [1] or [C] parameter over dimension 1 of `x`.
struct ChannelBroadcast {
  std::size_t outer = 1, channels = 1, inner = 1;
  bool scalar = true;

  std::size_t param_index(std::size_t flat) const {
    return scalar ? 0 : (flat / inner) % channels;
  }
};

ChannelBroadcast channel_broadcast(const Tensor& x, const Tensor& param, const char* op) {
  ChannelBroadcast b;
  if (param.numel() == 1) return b;
  if (x.rank() < 2 || x.dim(1) != param.numel()) {
    throw ArgumentError(std::string(op) + ": parameter of length " + std::to_string(param.numel()) +
                        " does not match channel dimension of " + shape_str(x.shape()));
  }
  b.scalar = false;
  b.outer = x.dim(0);
  b.channels = x.dim(1);
  b.inner = x.numel() / (b.outer * b.channels);
  return b;
}

template <typename Fwd, typename Bwd>
Tensor unary(const Tensor& a, Fwd fwd, Bwd bwd) {
  const auto& in = a.data();
  std::vector<float> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = fwd(in[i]);
  Tape* tape = recording_tape(a);
  Tensor result = make_result(a.shape(), std::move(out), tape != nullptr);
  if (tape) {
    tape->record([ai = a.impl(), oi = result.impl(), bwd] {
      if (oi->grad.empty()) return;
      auto& g = ai->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += oi->grad[i] * bwd(ai->data[i], oi->data[i]);
    });
  }
  return result;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<float> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  Tape* tape = recording_tape(a, b);
  Tensor result = make_result(a.shape(), std::move(out), tape != nullptr);
  if (tape) {
    tape->record([ai = a.impl(), bi = b.impl(), oi = result.impl()] {
      if (oi->grad.empty()) return;
      for (const auto& t : {ai, bi}) {
        if (!wants_grad(t)) continue;
        auto& g = t->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += oi->grad[i];
      }
    });
  }
  return result;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  std::vector<float> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
  Tape* tape = recording_tape(a, b);
  Tensor result = make_result(a.shape(), std::move(out), tape != nullptr);
  if (tape) {
    tape->record([ai = a.impl(), bi = b.impl(), oi = result.impl()] {
      if (oi->grad.empty()) return;
      if (wants_grad(ai)) {
        auto& g = ai->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += oi->grad[i];
      }
      if (wants_grad(bi)) {
        auto& g = bi->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] -= oi->grad[i];
      }
    });
  }
  return result;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<float> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  Tape* tape = recording_tape(a, b);
  Tensor result = make_result(a.shape(), std::move(out), tape != nullptr);
  if (tape) {
    tape->record([ai = a.impl(), bi = b.impl(), oi = result.impl()] {
      if (oi->grad.empty()) return;
      if (wants_grad(ai)) {
        auto& g = ai->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += oi->grad[i] * bi->data[i];
      }
      if (wants_grad(bi)) {
        auto& g = bi->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += oi->grad[i] * ai->data[i];
      }
    });
  }
  return result;
}

Tensor affine(const Tensor& a, float scale, float shift) {
  return unary(
      a, [=](float x) { return scale * x + shift; }, [=](float, float) { return scale; });
}

Tensor sigmoid(const Tensor& a) {
  return unary(
      a, [](float x) { return 1.0f / (1.0f + std::exp(-x)); },
      [](float, float y) { return y * (1.0f - y); });
}

Tensor tanh(const Tensor& a) {
  return unary(
      a, [](float x) { return std::tanh(x); }, [](float, float y) { return 1.0f - y * y; });
}

Tensor concat(std::span<const Tensor> parts, std::size_t axis) {
  if (parts.empty()) throw ArgumentError("concat: no inputs");
  const Shape& first = parts[0].shape();
  if (axis >= first.size()) throw ArgumentError("concat: axis out of range");
  Shape shape = first;
  shape[axis] = 0;
  for (const Tensor& p : parts) {
    if (p.rank() != first.size()) throw ArgumentError("concat: rank mismatch");
    for (std::size_t d = 0; d < first.size(); ++d) {
      if (d != axis && p.dim(d) != first[d]) {
        throw ArgumentError("concat: shape mismatch " + shape_str(first) + " vs " + shape_str(p.shape()));
      }
    }
    shape[axis] += p.dim(axis);
  }
  const AxisSplit out_split = split_axis(shape, axis);
  std::vector<float> out(shape_numel(shape));
  std::size_t offset = 0;  // running position along axis
  std::vector<std::size_t> offsets;
  for (const Tensor& p : parts) {
    const std::size_t block = p.dim(axis) * out_split.inner;
    for (std::size_t o = 0; o < out_split.outer; ++o) {
      std::copy_n(p.data().begin() + static_cast<std::ptrdiff_t>(o * block), block,
                  out.begin() + static_cast<std::ptrdiff_t>(o * out_split.extent * out_split.inner +
                                                            offset * out_split.inner));
    }
    offsets.push_back(offset);
    offset += p.dim(axis);
  }
  bool any = false;
  for (const Tensor& p : parts) any = any || p.requires_grad();
  Tape* tape = any ? Tape::active() : nullptr;
  Tensor result = make_result(shape, std::move(out), tape != nullptr);
  if (tape) {
    std::vector<TensorPtr> inputs;
    for (const Tensor& p : parts) inputs.push_back(p.impl());
    tape->record([inputs, offsets, out_split, axis, oi = result.impl()] {
      if (oi->grad.empty()) return;
      for (std::size_t k = 0; k < inputs.size(); ++k) {
        if (!wants_grad(inputs[k])) continue;
        auto& g = inputs[k]->grad_buffer();
        const std::size_t block = inputs[k]->shape[axis] * out_split.inner;
        for (std::size_t o = 0; o < out_split.outer; ++o) {
          const float* src = oi->grad.data() + o * out_split.extent * out_split.inner + offsets[k] * out_split.inner;
          float* dst = g.data() + o * block;
          for (std::size_t i = 0; i < block; ++i) dst[i] += src[i];
        }
      }
    });
  }
  return result;
}

Tensor stack(std::span<const Tensor> parts) {
  if (parts.empty()) throw ArgumentError("stack: no inputs");
  const Shape& first = parts[0].shape();
  const std::size_t block = parts[0].numel();
  Shape shape{parts.size()};
  shape.insert(shape.end(), first.begin(), first.end());
  std::vector<float> out;
  out.reserve(block * parts.size());
  bool any = false;
  for (const Tensor& p : parts) {
    if (p.shape() != first) {
      throw ArgumentError("stack: shape mismatch " + shape_str(first) + " vs " + shape_str(p.shape()));
    }
    out.insert(out.end(), p.data().begin(), p.data().end());
    any = any || p.requires_grad();
  }
  Tape* tape = any ? Tape::active() : nullptr;
  Tensor result = make_result(std::move(shape), std::move(out), tape != nullptr);
  if (tape) {
    std::vector<TensorPtr> inputs;
    for (const Tensor& p : parts) inputs.push_back(p.impl());
    tape->record([inputs, block, oi = result.impl()] {
      if (oi->grad.empty()) return;
      for (std::size_t k = 0; k < inputs.size(); ++k) {
        if (!wants_grad(inputs[k])) continue;
        auto& g = inputs[k]->grad_buffer();
        const float* src = oi->grad.data() + k * block;
        for (std::size_t i = 0; i < block; ++i) g[i] += src[i];
      }
    });
  }
  return result;
}

Tensor slice(const Tensor& a, std::size_t begin, std::size_t end) {
  if (a.rank() == 0 || begin >= end || end > a.dim(0)) {
    throw ArgumentError("slice: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                        ") invalid for shape " + shape_str(a.shape()));
  }
  const std::size_t row = a.numel() / a.dim(0);
  Shape shape = a.shape();
  shape[0] = end - begin;
  std::vector<float> out(a.data().begin() + static_cast<std::ptrdiff_t>(begin * row),
                         a.data().begin() + static_cast<std::ptrdiff_t>(end * row));
  Tape* tape = recording_tape(a);
  Tensor result = make_result(std::move(shape), std::move(out), tape != nullptr);
  if (tape) {
    tape->record([ai = a.impl(), oi = result.impl(), offset = begin * row] {
      if (oi->grad.empty()) return;
      auto& g = ai->grad_buffer();
      for (std::size_t i = 0; i < oi->grad.size(); ++i) g[offset + i] += oi->grad[i];
    });
  }
  return result;
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape_numel(shape) != a.numel()) {
    throw ArgumentError("reshape: cannot view " + shape_str(a.shape()) + " as " + shape_str(shape));
  }
  std::vector<float> out(a.data().begin(), a.data().end());
  Tape* tape = recording_tape(a);
  Tensor result = make_result(std::move(shape), std::move(out), tape != nullptr);
  if (tape) {
    tape->record([ai = a.impl(), oi = result.impl()] {
      if (oi->grad.empty()) return;
      auto& g = ai->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += oi->grad[i];
    });
  }
  return result;
}

Tensor sum(const Tensor& a, std::size_t axis) {
  if (axis >= a.rank()) throw ArgumentError("sum: axis out of range for " + shape_str(a.shape()));
  const AxisSplit s = split_axis(a.shape(), axis);
  Shape shape = a.shape();
  shape.erase(shape.begin() + static_cast<std::ptrdiff_t>(axis));
  std::vector<float> out(s.outer * s.inner, 0.0f);
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t k = 0; k < s.extent; ++k) {
      const float* src = a.data().data() + (o * s.extent + k) * s.inner;
      float* dst = out.data() + o * s.inner;
      for (std::size_t i = 0; i < s.inner; ++i) dst[i] += src[i];
    }
  }
  Tape* tape = recording_tape(a);
  Tensor result = make_result(std::move(shape), std::move(out), tape != nullptr);
  if (tape) {
    tape->record([ai = a.impl(), oi = result.impl(), s] {
      if (oi->grad.empty()) return;
      auto& g = ai->grad_buffer();
      for (std::size_t o = 0; o < s.outer; ++o) {
        for (std::size_t k = 0; k < s.extent; ++k) {
          float* dst = g.data() + (o * s.extent + k) * s.inner;
          const float* src = oi->grad.data() + o * s.inner;
          for (std::size_t i = 0; i < s.inner; ++i) dst[i] += src[i];
        }
      }
    });
  }
  return result;
}

Tensor mean(const Tensor& a, std::size_t axis) {
  if (axis >= a.rank()) throw ArgumentError("mean: axis out of range for " + shape_str(a.shape()));
  return affine(sum(a, axis), 1.0f / static_cast<float>(a.dim(axis)));
}

Tensor sum_all(const Tensor& a) {
  double acc = 0.0;
  for (float v : a.data()) acc += v;
  Tape* tape = recording_tape(a);
  Tensor result = make_result({1}, {static_cast<float>(acc)}, tape != nullptr);
  if (tape) {
    tape->record([ai = a.impl(), oi = result.impl()] {
      if (oi->grad.empty()) return;
      auto& g = ai->grad_buffer();
      for (float& v : g) v += oi->grad[0];
    });
  }
  return result;
}

Tensor mean_all(const Tensor& a) { return affine(sum_all(a), 1.0f / static_cast<float>(a.numel())); }

Tensor detach(const Tensor& a) {
  return Tensor(a.shape(), std::vector<float>(a.data().begin(), a.data().end()), false);
}

Tensor linear(const Tensor& input, const Tensor& weight, const Tensor& bias) {
  if (input.rank() != 2 || weight.rank() != 2 || input.dim(1) != weight.dim(1)) {
    throw ArgumentError("linear: input " + shape_str(input.shape()) + " incompatible with weight " +
                        shape_str(weight.shape()));
  }
  const std::size_t n = input.dim(0);
  const std::size_t fin = input.dim(1);
  const std::size_t fout = weight.dim(0);
  if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != fout)) {
    throw ArgumentError("linear: bias " + shape_str(bias.shape()) + " does not match " + std::to_string(fout) +
                        " outputs");
  }
  std::vector<float> out(n * fout);
  {
    ConstRowMap x(input.data().data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(fin));
    ConstRowMap w(weight.data().data(), static_cast<Eigen::Index>(fout), static_cast<Eigen::Index>(fin));
    RowMap y(out.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(fout));
    y.noalias() = x * w.transpose();
    if (bias.defined()) {
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < fout; ++j) out[r * fout + j] += bias[j];
      }
    }
  }
  Tape* tape = recording_tape(input, weight, bias);
  Tensor result = make_result({n, fout}, std::move(out), tape != nullptr);
  if (tape) {
    tape->record([xi = input.impl(), wi = weight.impl(), bi = bias.impl(), oi = result.impl(), n, fin, fout] {
      if (oi->grad.empty()) return;
      const auto rn = static_cast<Eigen::Index>(n);
      const auto rin = static_cast<Eigen::Index>(fin);
      const auto rout = static_cast<Eigen::Index>(fout);
      ConstRowMap g(oi->grad.data(), rn, rout);
      if (wants_grad(xi)) {
        RowMap gx(xi->grad_buffer().data(), rn, rin);
        ConstRowMap w(wi->data.data(), rout, rin);
        gx.noalias() += g * w;
      }
      if (wants_grad(wi)) {
        RowMap gw(wi->grad_buffer().data(), rout, rin);
        ConstRowMap x(xi->data.data(), rn, rin);
        gw.noalias() += g.transpose() * x;
      }
      if (wants_grad(bi)) {
        auto& gb = bi->grad_buffer();
        for (std::size_t r = 0; r < n; ++r) {
          for (std::size_t j = 0; j < fout; ++j) gb[j] += oi->grad[r * fout + j];
        }
      }
    });
  }
  return result;
}

BatchNormStats BatchNormStats::identity(std::size_t channels) {
  BatchNormStats s;
  s.running_mean.assign(channels, 0.0f);
  s.running_var.assign(channels, 1.0f);
  return s;
}

Tensor batch_norm(const Tensor& input, const Tensor& gamma, const Tensor& beta, BatchNormStats& stats,
                  Mode mode) {
  if (input.rank() < 2) throw ArgumentError("batch_norm: input needs a channel axis");
  const std::size_t n = input.dim(0);
  const std::size_t c = input.dim(1);
  const std::size_t inner = input.numel() / (n * c);
  if (gamma.numel() != c || beta.numel() != c || stats.running_mean.size() != c ||
      stats.running_var.size() != c) {
    throw ArgumentError("batch_norm: per-channel parameters do not match " + std::to_string(c) + " channels");
  }
  const std::size_t count = n * inner;
  std::vector<float> mean_c(c), invstd(c);
  const auto& x = input.data();
  if (mode == Mode::train) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      double s = 0.0, sq = 0.0;
      for (std::size_t b = 0; b < n; ++b) {
        const float* p = x.data() + (b * c + ch) * inner;
        for (std::size_t i = 0; i < inner; ++i) {
          s += p[i];
          sq += static_cast<double>(p[i]) * p[i];
        }
      }
      const double m = s / static_cast<double>(count);
      const double var = std::max(0.0, sq / static_cast<double>(count) - m * m);
      mean_c[ch] = static_cast<float>(m);
      invstd[ch] = static_cast<float>(1.0 / std::sqrt(var + stats.eps));
      const double unbiased = count > 1 ? var * static_cast<double>(count) / static_cast<double>(count - 1) : var;
      stats.running_mean[ch] = (1.0f - stats.momentum) * stats.running_mean[ch] + stats.momentum * static_cast<float>(m);
      stats.running_var[ch] =
          (1.0f - stats.momentum) * stats.running_var[ch] + stats.momentum * static_cast<float>(unbiased);
    }
  } else {
    for (std::size_t ch = 0; ch < c; ++ch) {
      mean_c[ch] = stats.running_mean[ch];
      invstd[ch] = 1.0f / std::sqrt(stats.running_var[ch] + stats.eps);
    }
  }
  std::vector<float> out(x.size());
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const float scale = gamma[ch] * invstd[ch];
      const float shift = beta[ch] - mean_c[ch] * scale;
      const std::size_t base = (b * c + ch) * inner;
      for (std::size_t i = 0; i < inner; ++i) out[base + i] = x[base + i] * scale + shift;
    }
  }
  Tape* tape = recording_tape(input, gamma, beta);
  Tensor result = make_result(input.shape(), std::move(out), tape != nullptr);
  if (tape) {
    tape->record([xi = input.impl(), gi = gamma.impl(), bi = beta.impl(), oi = result.impl(), mean_c, invstd, n, c,
                  inner, count, train = mode == Mode::train] {
      if (oi->grad.empty()) return;
      const auto& dy = oi->grad;
      for (std::size_t ch = 0; ch < c; ++ch) {
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (std::size_t b = 0; b < n; ++b) {
          const std::size_t base = (b * c + ch) * inner;
          for (std::size_t i = 0; i < inner; ++i) {
            const float xhat = (xi->data[base + i] - mean_c[ch]) * invstd[ch];
            sum_dy += dy[base + i];
            sum_dy_xhat += static_cast<double>(dy[base + i]) * xhat;
          }
        }
        if (wants_grad(gi)) gi->grad_buffer()[ch] += static_cast<float>(sum_dy_xhat);
        if (wants_grad(bi)) bi->grad_buffer()[ch] += static_cast<float>(sum_dy);
        if (!wants_grad(xi)) continue;
        auto& gx = xi->grad_buffer();
        const float k = gi->data[ch] * invstd[ch];
        const float mean_dy = static_cast<float>(sum_dy / static_cast<double>(count));
        const float mean_dy_xhat = static_cast<float>(sum_dy_xhat / static_cast<double>(count));
        for (std::size_t b = 0; b < n; ++b) {
          const std::size_t base = (b * c + ch) * inner;
          for (std::size_t i = 0; i < inner; ++i) {
            if (train) {
              const float xhat = (xi->data[base + i] - mean_c[ch]) * invstd[ch];
              gx[base + i] += k * (dy[base + i] - mean_dy - xhat * mean_dy_xhat);
            } else {
              gx[base + i] += k * dy[base + i];
            }
          }
        }
      }
    });
  }
  return result;
}

Tensor dropout(const Tensor& input, float rate, std::mt19937_64& rng, Mode mode) {
  if (rate < 0.0f || rate >= 1.0f) throw ArgumentError("dropout: rate must lie in [0, 1)");
  if (mode == Mode::eval || rate == 0.0f) return input;
  const float scale = 1.0f / (1.0f - rate);
  // Two 32-bit draws per engine call; an element is dropped when its draw
  // falls below rate * 2^32.
  const auto cutoff = static_cast<std::uint64_t>(static_cast<double>(rate) * 4294967296.0);
  std::vector<float> mask(input.numel());
  std::vector<float> out(input.numel());
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i % 2 == 0) bits = rng();
    const std::uint64_t draw = (i % 2 == 0) ? (bits & 0xffffffffULL) : (bits >> 32);
    mask[i] = draw < cutoff ? 0.0f : scale;
    out[i] = input[i] * mask[i];
  }
  Tape* tape = recording_tape(input);
  Tensor result = make_result(input.shape(), std::move(out), tape != nullptr);
  if (tape) {
    tape->record([xi = input.impl(), oi = result.impl(), mask = std::move(mask)] {
      if (oi->grad.empty()) return;
      auto& g = xi->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += oi->grad[i] * mask[i];
    });
  }
  return result;
}

Tensor spike(const Tensor& v, float threshold, const Surrogate& surrogate) {
  std::vector<float> out(v.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = v[i] >= threshold ? 1.0f : 0.0f;
  Tape* tape = recording_tape(v);
  Tensor result = make_result(v.shape(), std::move(out), tape != nullptr);
  if (tape) {
    tape->record([vi = v.impl(), oi = result.impl(), threshold, surrogate] {
      if (oi->grad.empty()) return;
      auto& g = vi->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += oi->grad[i] * surrogate.derivative(vi->data[i] - threshold);
    });
  }
  return result;
}

Tensor event_gate(const Tensor& c, const Tensor& theta, const Surrogate& surrogate) {
  if (c.rank() != 2 || theta.rank() != 1 || c.dim(1) != theta.dim(0)) {
    throw ArgumentError("event_gate: state " + shape_str(c.shape()) + " incompatible with threshold " +
                        shape_str(theta.shape()));
  }
  const std::size_t n = c.dim(0);
  const std::size_t f = c.dim(1);
  std::vector<float> out(c.numel());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < f; ++j) {
      const float v = c[r * f + j];
      out[r * f + j] = v >= theta[j] ? v : 0.0f;
    }
  }
  Tape* tape = recording_tape(c, theta);
  Tensor result = make_result(c.shape(), std::move(out), tape != nullptr);
  if (tape) {
    tape->record([ci = c.impl(), ti = theta.impl(), oi = result.impl(), n, f, surrogate] {
      if (oi->grad.empty()) return;
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < f; ++j) {
          const std::size_t i = r * f + j;
          const float v = ci->data[i];
          const float gate = v >= ti->data[j] ? 1.0f : 0.0f;
          const float sg = surrogate.derivative(v - ti->data[j]);
          const float ge = oi->grad[i];
          if (wants_grad(ci)) ci->grad_buffer()[i] += ge * (gate + v * sg);
          if (wants_grad(ti)) ti->grad_buffer()[j] -= ge * v * sg;
        }
      }
    });
  }
  return result;
}

Tensor leaky_integrate(const Tensor& v, const Tensor& x, const Tensor& alpha) {
  require_same_shape(v, x, "leaky_integrate");
  const ChannelBroadcast bc = channel_broadcast(x, alpha, "leaky_integrate");
  std::vector<float> out(x.numel());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const float a = alpha[bc.param_index(i)];
    out[i] = a * v[i] + (1.0f - a) * x[i];
  }
  Tape* tape = recording_tape(v, x, alpha);
  Tensor result = make_result(x.shape(), std::move(out), tape != nullptr);
  if (tape) {
    tape->record([vi = v.impl(), xi = x.impl(), ai = alpha.impl(), oi = result.impl(), bc] {
      if (oi->grad.empty()) return;
      const auto& g = oi->grad;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const std::size_t k = bc.param_index(i);
        const float a = ai->data[k];
        if (wants_grad(vi)) vi->grad_buffer()[i] += a * g[i];
        if (wants_grad(xi)) xi->grad_buffer()[i] += (1.0f - a) * g[i];
        if (wants_grad(ai)) ai->grad_buffer()[k] += g[i] * (vi->data[i] - xi->data[i]);
      }
    });
  }
  return result;
}

Tensor cross_entropy(const Tensor& logits, std::span<const int> labels) {
  if (logits.rank() != 2) throw ArgumentError("cross_entropy: logits must be [N, C], got " + shape_str(logits.shape()));
  const std::size_t n = logits.dim(0);
  const std::size_t c = logits.dim(1);
  if (labels.size() != n) throw ArgumentError("cross_entropy: label count does not match batch size");
  std::vector<float> probs(n * c);
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    if (labels[r] < 0 || static_cast<std::size_t>(labels[r]) >= c) {
      throw ArgumentError("cross_entropy: label " + std::to_string(labels[r]) + " outside [0, " + std::to_string(c) +
                          ")");
    }
    const float* row = logits.data().data() + r * c;
    const float m = *std::max_element(row, row + c);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += std::exp(static_cast<double>(row[j] - m));
    for (std::size_t j = 0; j < c; ++j) probs[r * c + j] = static_cast<float>(std::exp(static_cast<double>(row[j] - m)) / z);
    total += std::log(z) + m - row[labels[r]];
  }
  Tape* tape = recording_tape(logits);
  Tensor result = make_result({1}, {static_cast<float>(total / static_cast<double>(n))}, tape != nullptr);
  if (tape) {
    std::vector<int> y(labels.begin(), labels.end());
    tape->record([li = logits.impl(), oi = result.impl(), probs = std::move(probs), y = std::move(y), n, c] {
      if (oi->grad.empty()) return;
      auto& g = li->grad_buffer();
      const float scale = oi->grad[0] / static_cast<float>(n);
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < c; ++j) {
          const float target = static_cast<int>(j) == y[r] ? 1.0f : 0.0f;
          g[r * c + j] += scale * (probs[r * c + j] - target);
        }
      }
    });
  }
  return result;
}

}  // namespace eevact::ops
