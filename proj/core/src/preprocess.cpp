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

#include "eevact/preprocess.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "eevact/error.hpp"

namespace eevact {

double FrameSequence::total() const {
  return std::accumulate(data.begin(), data.end(), 0.0);
}

CropSpec center_crop(SensorGeometry geometry, int side) {
  return {geometry.width / 2, geometry.height / 2, side};
}

FrameSequence encode(const EventStream& stream, CropSpec crop, int out_height, int out_width,
                     std::uint64_t bin_us, std::uint64_t t_start, std::uint64_t t_end) {
  if (bin_us == 0) throw ArgumentError("bin_us must be positive");
  if (t_end <= t_start) throw ArgumentError("encoding range must satisfy t_end > t_start");
  if (out_height <= 0 || out_width <= 0 || crop.side <= 0) {
    throw ArgumentError("crop side and output size must be positive");
  }
  if (crop.side % out_height != 0 || crop.side % out_width != 0) {
    throw ArgumentError("crop side " + std::to_string(crop.side) + " is not divisible by output size " +
                        std::to_string(out_height) + "x" + std::to_string(out_width));
  }
  const int block_y = crop.side / out_height;
  const int block_x = crop.side / out_width;
  const int x0 = crop.cx - crop.side / 2;
  const int y0 = crop.cy - crop.side / 2;

  FrameSequence seq;
  seq.bins = static_cast<std::size_t>((t_end - t_start + bin_us - 1) / bin_us);
  seq.height = static_cast<std::size_t>(out_height);
  seq.width = static_cast<std::size_t>(out_width);
  seq.bin_us = bin_us;
  seq.origin_us = t_start;
  seq.padded = t_end > stream.duration_us;
  seq.data.assign(seq.bins * seq.frame_size(), 0.0f);

  for (const Event& e : stream.events) {
    if (e.t < t_start || e.t >= t_end) continue;
    const int lx = static_cast<int>(e.x) - x0;
    const int ly = static_cast<int>(e.y) - y0;
    if (lx < 0 || ly < 0 || lx >= crop.side || ly >= crop.side) continue;
    const auto t = static_cast<std::size_t>((e.t - t_start) / bin_us);
    seq.at(t, e.p, static_cast<std::size_t>(ly / block_y), static_cast<std::size_t>(lx / block_x)) += 1.0f;
  }
  return seq;
}

FrameSequence encode(const EventStream& stream, const EncodingSpec& spec, std::uint64_t t_start,
                     std::uint64_t t_end) {
  return encode(stream, center_crop(stream.geometry, spec.crop_side), spec.out_height, spec.out_width,
                spec.bin_us, t_start, t_end);
}

CropWindow random_crop_window(const EventStream& stream, std::uint64_t window_us, std::uint64_t seed) {
  if (window_us == 0) throw ArgumentError("crop window must be positive");
  if (stream.duration_us <= window_us) {
    return {0, window_us, stream.duration_us < window_us};
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> start(0, stream.duration_us - window_us);
  const std::uint64_t s = start(rng);
  return {s, s + window_us, false};
}

FrameSequence shift(const FrameSequence& seq, int dx, int dy) {
  FrameSequence out = seq;
  std::fill(out.data.begin(), out.data.end(), 0.0f);
  const int h = static_cast<int>(seq.height);
  const int w = static_cast<int>(seq.width);
  for (std::size_t t = 0; t < seq.bins; ++t) {
    for (std::size_t p = 0; p < FrameSequence::kChannels; ++p) {
      for (int y = 0; y < h; ++y) {
        const int sy = y - dy;
        if (sy < 0 || sy >= h) continue;
        for (int x = 0; x < w; ++x) {
          const int sx = x - dx;
          if (sx < 0 || sx >= w) continue;
          out.at(t, p, y, x) = seq.at(t, p, sy, sx);
        }
      }
    }
  }
  return out;
}

FrameSequence zoom(const FrameSequence& seq, double factor) {
  if (!(factor > 0.0)) throw ArgumentError("zoom factor must be positive");
  if (factor == 1.0) return seq;
  FrameSequence out = seq;
  std::fill(out.data.begin(), out.data.end(), 0.0f);
  const double cy = (static_cast<double>(seq.height) - 1.0) / 2.0;
  const double cx = (static_cast<double>(seq.width) - 1.0) / 2.0;
  std::vector<int> src_y(seq.height), src_x(seq.width);
  for (std::size_t y = 0; y < seq.height; ++y) {
    src_y[y] = static_cast<int>(std::lround(cy + (static_cast<double>(y) - cy) / factor));
  }
  for (std::size_t x = 0; x < seq.width; ++x) {
    src_x[x] = static_cast<int>(std::lround(cx + (static_cast<double>(x) - cx) / factor));
  }
  const int h = static_cast<int>(seq.height);
  const int w = static_cast<int>(seq.width);
  for (std::size_t t = 0; t < seq.bins; ++t) {
    for (std::size_t p = 0; p < FrameSequence::kChannels; ++p) {
      for (std::size_t y = 0; y < seq.height; ++y) {
        if (src_y[y] < 0 || src_y[y] >= h) continue;
        for (std::size_t x = 0; x < seq.width; ++x) {
          if (src_x[x] < 0 || src_x[x] >= w) continue;
          out.at(t, p, y, x) = seq.at(t, p, src_y[y], src_x[x]);
        }
      }
    }
  }
  return out;
}

FrameSequence hflip(const FrameSequence& seq) {
  FrameSequence out = seq;
  for (std::size_t t = 0; t < seq.bins; ++t) {
    for (std::size_t p = 0; p < FrameSequence::kChannels; ++p) {
      for (std::size_t y = 0; y < seq.height; ++y) {
        for (std::size_t x = 0; x < seq.width; ++x) {
          out.at(t, p, y, x) = seq.at(t, p, y, seq.width - 1 - x);
        }
      }
    }
  }
  return out;
}

FrameSequence augment(const FrameSequence& seq, const AugmentSpec& spec, std::uint64_t seed) {
  if (!(spec.zoom_min > 0.0) || spec.zoom_max < spec.zoom_min) {
    throw ArgumentError("augmentation zoom range must satisfy 0 < zoom_min <= zoom_max");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double z = spec.zoom_min + (spec.zoom_max - spec.zoom_min) * unit(rng);
  int dx = 0;
  int dy = 0;
  if (spec.shift_cells > 0) {
    std::uniform_int_distribution<int> d(-spec.shift_cells, spec.shift_cells);
    dx = d(rng);
    dy = d(rng);
  }
  const bool flip = unit(rng) < spec.hflip_prob;

  FrameSequence out = zoom(seq, z);
  if (dx != 0 || dy != 0) out = shift(out, dx, dy);
  if (flip) out = hflip(out);
  return out;
}

}  // namespace eevact
