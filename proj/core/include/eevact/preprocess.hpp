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

#ifndef EEVACT_PREPROCESS_HPP_
#define EEVACT_PREPROCESS_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "eevact/event_io.hpp"

namespace eevact {

// Dense per-polarity event counts, layout [bins, 2, height, width].
struct FrameSequence {
  std::size_t bins = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<float> data;
  std::uint64_t bin_us = 0;
  std::uint64_t origin_us = 0;
  // Part of the encoded range lies beyond the end of the recording.
  bool padded = false;

  static constexpr std::size_t kChannels = 2;

  std::size_t frame_size() const { return kChannels * height * width; }
  std::size_t index(std::size_t t, std::size_t p, std::size_t y, std::size_t x) const {
    return ((t * kChannels + p) * height + y) * width + x;
  }
  float at(std::size_t t, std::size_t p, std::size_t y, std::size_t x) const {
    return data[index(t, p, y, x)];
  }
  float& at(std::size_t t, std::size_t p, std::size_t y, std::size_t x) {
    return data[index(t, p, y, x)];
  }
  double total() const;

  friend bool operator==(const FrameSequence&, const FrameSequence&) = default;
};

// Square crop centred at (cx, cy).
struct CropSpec {
  int cx = 0;
  int cy = 0;
  int side = 0;
};

CropSpec center_crop(SensorGeometry geometry, int side);

struct EncodingSpec {
  int crop_side = 600;
  int out_height = 100;
  int out_width = 100;
  std::uint64_t bin_us = 2000;
};

// Bins events with t_start <= t < t_end into ceil((t_end - t_start) / bin_us)
// frames and block-sums the crop down to out_height x out_width.
FrameSequence encode(const EventStream& stream, CropSpec crop, int out_height, int out_width,
                     std::uint64_t bin_us, std::uint64_t t_start, std::uint64_t t_end);

// Convenience: centre crop from `spec` over [t_start, t_end).
FrameSequence encode(const EventStream& stream, const EncodingSpec& spec, std::uint64_t t_start,
                     std::uint64_t t_end);

struct CropWindow {
  std::uint64_t start = 0;
  std::uint64_t end = 0;
  // Recording shorter than the window; [start, end) runs past its end and
  // the encoding is zero-padded there.
  bool padded = false;
};

CropWindow random_crop_window(const EventStream& stream, std::uint64_t window_us, std::uint64_t seed);

struct AugmentSpec {
  int shift_cells = 0;  // shifts drawn uniformly from [-shift_cells, shift_cells]
  double zoom_min = 1.0;
  double zoom_max = 1.0;
  double hflip_prob = 0.0;

  static AugmentSpec defaults() { return {10, 0.9, 1.1, 0.5}; }
};

// Individual transforms. All bins move together; polarity channels are never mixed.
FrameSequence shift(const FrameSequence& seq, int dx, int dy);
FrameSequence zoom(const FrameSequence& seq, double factor);
FrameSequence hflip(const FrameSequence& seq);

// Random zoom, shift and flip drawn from `spec`, reproducible per seed.
FrameSequence augment(const FrameSequence& seq, const AugmentSpec& spec, std::uint64_t seed);

}  // namespace eevact

#endif  // EEVACT_PREPROCESS_HPP_
