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

#ifndef EEVACT_EVENT_IO_HPP_
#define EEVACT_EVENT_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eevact {

// A single camera event. Timestamps are integer microseconds.
struct Event {
  std::uint64_t t = 0;
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  std::uint8_t p = 0;  // polarity, 0 = OFF, 1 = ON

  friend bool operator==(const Event&, const Event&) = default;
};

struct SensorGeometry {
  std::uint16_t width = 0;
  std::uint16_t height = 0;

  friend bool operator==(const SensorGeometry&, const SensorGeometry&) = default;
};

// Time-sorted events of one recording. The on-disk format stores only the
// geometry and the events; `duration_us` and `label` travel in the dataset
// manifest.
struct EventStream {
  SensorGeometry geometry;
  std::vector<Event> events;
  std::optional<int> label;
  std::uint64_t duration_us = 0;

  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }

  friend bool operator==(const EventStream&, const EventStream&) = default;
};

// Geometry and event sequence equality, ignoring manifest-side fields.
bool same_events(const EventStream& a, const EventStream& b);

// Throws ValidationError naming the first violated invariant.
void validate(const EventStream& stream);

// ---- binary file format --------------------------------------------------
//
// Little-endian:
//   magic "EEVA" (4) | version u16 = 1 | width u16 | height u16 |
//   event_count u32 | reserved u16
// followed by event_count records of {t u64, x u16, y u16, p u8} (13 bytes).

inline constexpr std::size_t kEventHeaderBytes = 16;
inline constexpr std::size_t kEventRecordBytes = 13;
inline constexpr std::uint16_t kEventFormatVersion = 1;

struct ReadWarnings {
  bool resorted = false;  // file events were not time-ordered
};

// Reads an event file. The returned stream has duration_us set to the last
// event timestamp (0 when empty) and no label.
EventStream read_stream(const std::filesystem::path& path,
                        ReadWarnings* warnings = nullptr);

void write_stream(const EventStream& stream, const std::filesystem::path& path);

// In-memory codec used by read_stream/write_stream.
std::vector<std::uint8_t> encode_stream(const EventStream& stream);
EventStream decode_stream(const std::vector<std::uint8_t>& bytes,
                          ReadWarnings* warnings = nullptr);

// ---- synthetic recordings -------------------------------------------------

enum class Pattern { bar_left, bar_right, dot_cw, dot_ccw, noise };

Pattern parse_pattern(std::string_view name);
std::string_view to_string(Pattern pattern);

// Generates a moving-pattern recording. Event times follow an inhomogeneous
// Poisson process whose intensity is proportional to the pattern's speed, so
// the motion starts slowly and evidence accumulates over the recording.
// bar_left is the exact horizontal mirror of bar_right for the same seed, and
// dot_ccw the mirror of dot_cw.
EventStream generate_synthetic(Pattern pattern, SensorGeometry geometry,
                               std::uint64_t duration_us, double rate_hz,
                               std::uint64_t seed);

// Mirrors x -> width - 1 - x for every event.
EventStream flip_horizontal(const EventStream& stream);

}  // namespace eevact

#endif  // EEVACT_EVENT_IO_HPP_
