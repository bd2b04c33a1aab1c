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

#include "eevact/event_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>

#include "eevact/error.hpp"

namespace eevact {
namespace {

constexpr char kMagic[4] = {'E', 'E', 'V', 'A'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(const std::uint8_t* in) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  }
  return static_cast<T>(v);
}

bool time_sorted(const std::vector<Event>& events) {
  return std::is_sorted(events.begin(), events.end(),
                        [](const Event& a, const Event& b) { return a.t < b.t; });
}

void sort_by_time(std::vector<Event>& events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.t < b.t; });
}

// Fraction of the total path covered by time fraction tau when speed grows
// linearly from kStartSpeed to kStartSpeed + 1.
constexpr double kStartSpeed = 0.25;

double progress(double tau) {
  return (kStartSpeed * tau + 0.5 * tau * tau) / (kStartSpeed + 0.5);
}

double inverse_progress(double u) {
  return -kStartSpeed + std::sqrt(kStartSpeed * kStartSpeed + 2.0 * u * (kStartSpeed + 0.5));
}

std::uint16_t clamp_coord(double v, std::uint16_t extent) {
  const double c = std::clamp(std::floor(v), 0.0, static_cast<double>(extent - 1));
  return static_cast<std::uint16_t>(c);
}

// Canonical generators: rightward bar and clockwise dot. Mirrored patterns
// reuse these with x flipped so mirror symmetry is exact.
std::vector<Event> moving_bar(SensorGeometry g, std::uint64_t duration_us, std::size_t count,
                              std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double w = g.width;
  const double h = g.height;
  const double half_width = std::max(1.0, w / 16.0);
  std::vector<Event> events;
  events.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double tau = inverse_progress(unit(rng));
    const double center = w * (0.2 + 0.6 * progress(tau));
    const bool leading = unit(rng) < 0.5;
    const double jitter = unit(rng) * 2.0 - 1.0;
    const double x = center + (leading ? half_width : -half_width) + jitter;
    const double y = h * (0.1 + 0.8 * unit(rng));
    Event e;
    e.t = std::min<std::uint64_t>(static_cast<std::uint64_t>(tau * static_cast<double>(duration_us)),
                                  duration_us);
    e.x = clamp_coord(x, g.width);
    e.y = clamp_coord(y, g.height);
    e.p = leading ? 1 : 0;
    events.push_back(e);
  }
  return events;
}

std::vector<Event> rotating_dot(SensorGeometry g, std::uint64_t duration_us, std::size_t count,
                                std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double cx = g.width / 2.0;
  const double cy = g.height / 2.0;
  const double radius = 0.3 * std::min<double>(g.width, g.height);
  const double blob = std::max(1.5, radius / 4.0);
  std::vector<Event> events;
  events.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double tau = inverse_progress(unit(rng));
    // Clockwise in image coordinates (y grows downwards).
    const double angle = 2.0 * std::numbers::pi * progress(tau);
    const double px = cx + radius * std::cos(angle);
    const double py = cy + radius * std::sin(angle);
    const double vx = -std::sin(angle);
    const double vy = std::cos(angle);
    const double r = blob * std::sqrt(unit(rng));
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    const double dx = r * std::cos(phi);
    const double dy = r * std::sin(phi);
    Event e;
    e.t = std::min<std::uint64_t>(static_cast<std::uint64_t>(tau * static_cast<double>(duration_us)),
                                  duration_us);
    e.x = clamp_coord(px + dx, g.width);
    e.y = clamp_coord(py + dy, g.height);
    e.p = (dx * vx + dy * vy) > 0.0 ? 1 : 0;
    events.push_back(e);
  }
  return events;
}

std::vector<Event> uniform_noise(SensorGeometry g, std::uint64_t duration_us, std::size_t count,
                                 std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Event> events;
  events.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Event e;
    e.t = std::min<std::uint64_t>(static_cast<std::uint64_t>(unit(rng) * static_cast<double>(duration_us)),
                                  duration_us);
    e.x = clamp_coord(unit(rng) * g.width, g.width);
    e.y = clamp_coord(unit(rng) * g.height, g.height);
    e.p = unit(rng) < 0.5 ? 1 : 0;
    events.push_back(e);
  }
  return events;
}

}  // namespace

bool same_events(const EventStream& a, const EventStream& b) {
  return a.geometry == b.geometry && a.events == b.events;
}

void validate(const EventStream& stream) {
  std::uint64_t prev = 0;
  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    const Event& e = stream.events[i];
    if (e.x >= stream.geometry.width || e.y >= stream.geometry.height) {
      throw ValidationError("event " + std::to_string(i) + " at (" + std::to_string(e.x) + ", " +
                            std::to_string(e.y) + ") lies outside the " +
                            std::to_string(stream.geometry.width) + "x" +
                            std::to_string(stream.geometry.height) + " sensor");
    }
    if (e.p > 1) {
      throw ValidationError("event " + std::to_string(i) + " has polarity " + std::to_string(e.p));
    }
    if (e.t < prev) {
      throw ValidationError("event " + std::to_string(i) + " is out of time order");
    }
    prev = e.t;
  }
  if (!stream.events.empty() && stream.events.back().t > stream.duration_us) {
    throw ValidationError("last event at " + std::to_string(stream.events.back().t) +
                          " us exceeds the stream duration " + std::to_string(stream.duration_us));
  }
}

std::vector<std::uint8_t> encode_stream(const EventStream& stream) {
  if (stream.events.size() > UINT32_MAX) {
    throw ArgumentError("event count exceeds the u32 header field");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kEventHeaderBytes + kEventRecordBytes * stream.events.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_le<std::uint16_t>(out, kEventFormatVersion);
  put_le<std::uint16_t>(out, stream.geometry.width);
  put_le<std::uint16_t>(out, stream.geometry.height);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(stream.events.size()));
  put_le<std::uint16_t>(out, 0);
  for (const Event& e : stream.events) {
    put_le<std::uint64_t>(out, e.t);
    put_le<std::uint16_t>(out, e.x);
    put_le<std::uint16_t>(out, e.y);
    put_le<std::uint8_t>(out, e.p);
  }
  return out;
}

EventStream decode_stream(const std::vector<std::uint8_t>& bytes, ReadWarnings* warnings) {
  if (bytes.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw FormatError("not an event file: bad magic");
  }
  if (bytes.size() < kEventHeaderBytes) {
    throw CorruptionError("event file header truncated");
  }
  const auto version = get_le<std::uint16_t>(&bytes[4]);
  if (version != kEventFormatVersion) {
    throw FormatError("unsupported event file version " + std::to_string(version));
  }
  EventStream stream;
  stream.geometry.width = get_le<std::uint16_t>(&bytes[6]);
  stream.geometry.height = get_le<std::uint16_t>(&bytes[8]);
  const auto count = get_le<std::uint32_t>(&bytes[10]);
  const std::size_t expected = kEventHeaderBytes + kEventRecordBytes * static_cast<std::size_t>(count);
  if (bytes.size() < expected) {
    throw CorruptionError("event file truncated: header declares " + std::to_string(count) +
                          " records but only " +
                          std::to_string((bytes.size() - kEventHeaderBytes) / kEventRecordBytes) +
                          " are present");
  }
  if (bytes.size() > expected) {
    throw CorruptionError("event file has " + std::to_string(bytes.size() - expected) +
                          " trailing bytes");
  }
  stream.events.resize(count);
  const std::uint8_t* p = bytes.data() + kEventHeaderBytes;
  for (auto& e : stream.events) {
    e.t = get_le<std::uint64_t>(p);
    e.x = get_le<std::uint16_t>(p + 8);
    e.y = get_le<std::uint16_t>(p + 10);
    e.p = get_le<std::uint8_t>(p + 12);
    p += kEventRecordBytes;
  }
  const bool resorted = !time_sorted(stream.events);
  if (resorted) sort_by_time(stream.events);
  if (warnings != nullptr) warnings->resorted = resorted;
  stream.duration_us = stream.events.empty() ? 0 : stream.events.back().t;
  validate(stream);
  return stream;
}

EventStream read_stream(const std::filesystem::path& path, ReadWarnings* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open event file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_stream(bytes, warnings);
}

void write_stream(const EventStream& stream, const std::filesystem::path& path) {
  validate(stream);
  const auto bytes = encode_stream(stream);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

Pattern parse_pattern(std::string_view name) {
  if (name == "bar_left") return Pattern::bar_left;
  if (name == "bar_right") return Pattern::bar_right;
  if (name == "dot_cw") return Pattern::dot_cw;
  if (name == "dot_ccw") return Pattern::dot_ccw;
  if (name == "noise") return Pattern::noise;
  throw ArgumentError("unknown synthetic pattern '" + std::string(name) + "'");
}

std::string_view to_string(Pattern pattern) {
  switch (pattern) {
    case Pattern::bar_left: return "bar_left";
    case Pattern::bar_right: return "bar_right";
    case Pattern::dot_cw: return "dot_cw";
    case Pattern::dot_ccw: return "dot_ccw";
    case Pattern::noise: return "noise";
  }
  return "unknown";
}

EventStream flip_horizontal(const EventStream& stream) {
  EventStream out = stream;
  for (Event& e : out.events) {
    e.x = static_cast<std::uint16_t>(stream.geometry.width - 1 - e.x);
  }
  return out;
}

EventStream generate_synthetic(Pattern pattern, SensorGeometry geometry, std::uint64_t duration_us,
                               double rate_hz, std::uint64_t seed) {
  if (duration_us == 0) throw ArgumentError("synthetic duration must be positive");
  if (!(rate_hz > 0.0)) throw ArgumentError("synthetic event rate must be positive");
  if (geometry.width == 0 || geometry.height == 0) {
    throw ArgumentError("sensor geometry must be non-empty");
  }
  std::mt19937_64 rng(seed);
  const double mean_count = rate_hz * static_cast<double>(duration_us) * 1e-6;
  std::poisson_distribution<std::uint64_t> count_dist(mean_count);
  const auto count = static_cast<std::size_t>(count_dist(rng));

  EventStream stream;
  stream.geometry = geometry;
  stream.duration_us = duration_us;
  switch (pattern) {
    case Pattern::bar_left:
    case Pattern::bar_right:
      stream.events = moving_bar(geometry, duration_us, count, rng);
      break;
    case Pattern::dot_cw:
    case Pattern::dot_ccw:
      stream.events = rotating_dot(geometry, duration_us, count, rng);
      break;
    case Pattern::noise:
      stream.events = uniform_noise(geometry, duration_us, count, rng);
      break;
  }
  sort_by_time(stream.events);
  if (pattern == Pattern::bar_left || pattern == Pattern::dot_ccw) {
    stream = flip_horizontal(stream);
  }
  return stream;
}

}  // namespace eevact
