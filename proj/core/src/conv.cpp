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

#include <Eigen/Core>
#include <algorithm>

#include "eevact/error.hpp"
#include "eevact/ops.hpp"

namespace eevact::ops {
namespace {

using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMat>;
using ConstRowMap = Eigen::Map<const RowMat>;

struct ConvGeometry {
  std::size_t n, cin, h, w, cout, k, oh, ow;
  int stride, padding;

  std::size_t patch() const { return cin * k * k; }
  std::size_t positions() const { return oh * ow; }
};

// Bound on the im2col buffer for one chunk of images, in floats.
constexpr std::size_t kColumnBudget = std::size_t{1} << 22;

std::size_t images_per_chunk(const ConvGeometry& g) {
  const std::size_t per_image = std::max<std::size_t>(1, g.positions() * g.patch());
  return std::clamp<std::size_t>(kColumnBudget / per_image, 1, g.n);
}

// Rows are (image, oy, ox), columns (cin, ky, kx).
void im2col(const ConvGeometry& g, const float* x, std::size_t first, std::size_t count, float* cols) {
  const std::size_t patch = g.patch();
  for (std::size_t b = 0; b < count; ++b) {
    const float* img = x + (first + b) * g.cin * g.h * g.w;
    for (std::size_t oy = 0; oy < g.oh; ++oy) {
      for (std::size_t ox = 0; ox < g.ow; ++ox) {
        float* row = cols + ((b * g.oh + oy) * g.ow + ox) * patch;
        const long iy0 = static_cast<long>(oy) * g.stride - g.padding;
        const long ix0 = static_cast<long>(ox) * g.stride - g.padding;
        const bool interior = iy0 >= 0 && ix0 >= 0 && iy0 + static_cast<long>(g.k) <= static_cast<long>(g.h) &&
                              ix0 + static_cast<long>(g.k) <= static_cast<long>(g.w);
        for (std::size_t c = 0; c < g.cin; ++c) {
          const float* plane = img + c * g.h * g.w;
          if (interior) {
            for (std::size_t ky = 0; ky < g.k; ++ky) {
              const float* src = plane + (iy0 + static_cast<long>(ky)) * static_cast<long>(g.w) + ix0;
              row = std::copy(src, src + g.k, row);
            }
            continue;
          }
          for (std::size_t ky = 0; ky < g.k; ++ky) {
            const long iy = iy0 + static_cast<long>(ky);
            for (std::size_t kx = 0; kx < g.k; ++kx) {
              const long ix = ix0 + static_cast<long>(kx);
              const bool inside = iy >= 0 && ix >= 0 && iy < static_cast<long>(g.h) && ix < static_cast<long>(g.w);
              *row++ = inside ? plane[iy * static_cast<long>(g.w) + ix] : 0.0f;
            }
          }
        }
      }
    }
  }
}

void col2im_add(const ConvGeometry& g, const float* cols, std::size_t first, std::size_t count, float* dx) {
  const std::size_t patch = g.patch();
  for (std::size_t b = 0; b < count; ++b) {
    float* img = dx + (first + b) * g.cin * g.h * g.w;
    for (std::size_t oy = 0; oy < g.oh; ++oy) {
      for (std::size_t ox = 0; ox < g.ow; ++ox) {
        const float* row = cols + ((b * g.oh + oy) * g.ow + ox) * patch;
        const long iy0 = static_cast<long>(oy) * g.stride - g.padding;
        const long ix0 = static_cast<long>(ox) * g.stride - g.padding;
        for (std::size_t c = 0; c < g.cin; ++c) {
          float* plane = img + c * g.h * g.w;
          for (std::size_t ky = 0; ky < g.k; ++ky) {
            const long iy = iy0 + static_cast<long>(ky);
            for (std::size_t kx = 0; kx < g.k; ++kx, ++row) {
              const long ix = ix0 + static_cast<long>(kx);
              if (iy >= 0 && ix >= 0 && iy < static_cast<long>(g.h) && ix < static_cast<long>(g.w)) {
                plane[iy * static_cast<long>(g.w) + ix] += *row;
              }
            }
          }
        }
      }
    }
  }
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& weight, int stride, int padding) {
  if (input.rank() != 4 || weight.rank() != 4) {
    throw ArgumentError("conv2d: expected 4-d input and weight, got " + shape_str(input.shape()) + " and " +
                        shape_str(weight.shape()));
  }
  if (stride < 1 || padding < 0) throw ArgumentError("conv2d: stride must be >= 1 and padding >= 0");
  if (weight.dim(1) != input.dim(1) || weight.dim(2) != weight.dim(3)) {
    throw ArgumentError("conv2d: weight " + shape_str(weight.shape()) + " incompatible with input " +
                        shape_str(input.shape()));
  }
  ConvGeometry g{};
  g.n = input.dim(0);
  g.cin = input.dim(1);
  g.h = input.dim(2);
  g.w = input.dim(3);
  g.cout = weight.dim(0);
  g.k = weight.dim(2);
  g.stride = stride;
  g.padding = padding;
  const long span_h = static_cast<long>(g.h) + 2L * padding - static_cast<long>(g.k);
  const long span_w = static_cast<long>(g.w) + 2L * padding - static_cast<long>(g.k);
  if (span_h < 0 || span_w < 0) throw ArgumentError("conv2d: kernel larger than padded input");
  g.oh = static_cast<std::size_t>(span_h / stride + 1);
  g.ow = static_cast<std::size_t>(span_w / stride + 1);

  const std::size_t patch = g.patch();
  const std::size_t positions = g.positions();
  const std::size_t chunk = images_per_chunk(g);
  std::vector<float> out(g.n * g.cout * positions);
  std::vector<float> cols(chunk * positions * patch);
  std::vector<float> y(chunk * positions * g.cout);
  ConstRowMap wmat(weight.data().data(), static_cast<Eigen::Index>(g.cout), static_cast<Eigen::Index>(patch));

  for (std::size_t first = 0; first < g.n; first += chunk) {
    const std::size_t count = std::min(chunk, g.n - first);
    const auto rows = static_cast<Eigen::Index>(count * positions);
    im2col(g, input.data().data(), first, count, cols.data());
    ConstRowMap c(cols.data(), rows, static_cast<Eigen::Index>(patch));
    RowMap ym(y.data(), rows, static_cast<Eigen::Index>(g.cout));
    ym.noalias() = c * wmat.transpose();
    for (std::size_t b = 0; b < count; ++b) {
      float* dst = out.data() + (first + b) * g.cout * positions;
      for (std::size_t p = 0; p < positions; ++p) {
        const float* src = y.data() + (b * positions + p) * g.cout;
        for (std::size_t co = 0; co < g.cout; ++co) dst[co * positions + p] = src[co];
      }
    }
  }

  Tape* tape = recording_tape(input, weight);
  Tensor result = make_result({g.n, g.cout, g.oh, g.ow}, std::move(out), tape != nullptr);
  if (tape) {
    tape->record([xi = input.impl(), wi = weight.impl(), oi = result.impl(), g] {
      if (oi->grad.empty()) return;
      const std::size_t patch = g.patch();
      const std::size_t positions = g.positions();
      const std::size_t chunk = images_per_chunk(g);
      std::vector<float> cols(chunk * positions * patch);
      std::vector<float> gy(chunk * positions * g.cout);
      ConstRowMap wmat(wi->data.data(), static_cast<Eigen::Index>(g.cout), static_cast<Eigen::Index>(patch));
      for (std::size_t first = 0; first < g.n; first += chunk) {
        const std::size_t count = std::min(chunk, g.n - first);
        const auto rows = static_cast<Eigen::Index>(count * positions);
        for (std::size_t b = 0; b < count; ++b) {
          const float* src = oi->grad.data() + (first + b) * g.cout * positions;
          for (std::size_t p = 0; p < positions; ++p) {
            float* dst = gy.data() + (b * positions + p) * g.cout;
            for (std::size_t co = 0; co < g.cout; ++co) dst[co] = src[co * positions + p];
          }
        }
        ConstRowMap gym(gy.data(), rows, static_cast<Eigen::Index>(g.cout));
        if (wants_grad(wi)) {
          im2col(g, xi->data.data(), first, count, cols.data());
          ConstRowMap c(cols.data(), rows, static_cast<Eigen::Index>(patch));
          RowMap gw(wi->grad_buffer().data(), static_cast<Eigen::Index>(g.cout), static_cast<Eigen::Index>(patch));
          gw.noalias() += gym.transpose() * c;
        }
        if (wants_grad(xi)) {
          RowMap dc(cols.data(), rows, static_cast<Eigen::Index>(patch));
          dc.noalias() = gym * wmat;
          col2im_add(g, cols.data(), first, count, xi->grad_buffer().data());
        }
      }
    });
  }
  return result;
}

}  // namespace eevact::ops
