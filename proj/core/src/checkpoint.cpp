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

#include "eevact/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

#include "eevact/error.hpp"

namespace eevact {
namespace {

constexpr char kMagic[4] = {'E', 'E', 'V', 'C'};
constexpr std::uint8_t kParameter = 0;
constexpr std::uint8_t kBuffer = 1;

class Writer {
 public:
  template <typename T>
  void put(T v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    out_.insert(out_.end(), p, p + sizeof(T));
  }
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  void string(const std::string& s) {
    put(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void floats(std::span<const float> v) {
    put(static_cast<std::uint64_t>(v.size()));
    bytes(v.data(), v.size() * sizeof(float));
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}
  template <typename T>
  T get() {
    T v;
    std::memcpy(&v, take(sizeof(T)), sizeof(T));
    return v;
  }
  std::string string() {
    const auto n = get<std::uint32_t>();
    const auto* p = take(n);
    return std::string(reinterpret_cast<const char*>(p), n);
  }
  std::vector<float> floats() {
    const auto n = get<std::uint64_t>();
    if (n > remaining() / sizeof(float)) throw CorruptionError("checkpoint: truncated tensor data");
    std::vector<float> v(n);
    std::memcpy(v.data(), take(n * sizeof(float)), n * sizeof(float));
    return v;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  const std::uint8_t* take(std::size_t n) {
    if (n > remaining()) throw CorruptionError("checkpoint: truncated at byte " + std::to_string(pos_));
    const auto* p = in_.data() + pos_;
    pos_ += n;
    return p;
  }
  const std::vector<std::uint8_t>& in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(Network& net) {
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.put(kCheckpointVersion);
  w.string(to_json(net.config()).dump());
  const auto params = net.parameters();
  const auto buffers = net.buffers();
  w.put(static_cast<std::uint32_t>(params.size() + buffers.size()));
  for (const auto& p : params) {
    w.put(kParameter);
    w.string(p.name);
    w.put(static_cast<std::uint32_t>(p.tensor.rank()));
    for (std::size_t d : p.tensor.shape()) w.put(static_cast<std::uint64_t>(d));
    w.floats(p.tensor.data());
  }
  for (const auto& b : buffers) {
    w.put(kBuffer);
    w.string(b.name);
    w.put(std::uint32_t{1});
    w.put(static_cast<std::uint64_t>(b.values->size()));
    w.floats(*b.values);
  }
  return w.take();
}

Network decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("checkpoint: bad magic");
  }
  Reader r(bytes);
  for (std::size_t i = 0; i < sizeof(kMagic); ++i) r.get<char>();
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  }
  NetworkConfig config;
  try {
    config = network_config_from_json(nlohmann::json::parse(r.string()));
    config.validate();
  } catch (const nlohmann::json::exception& e) {
    throw CorruptionError(std::string("checkpoint: unreadable config: ") + e.what());
  } catch (const ValidationError& e) {
    throw CorruptionError(std::string("checkpoint: invalid config: ") + e.what());
  } catch (const ArgumentError& e) {
    throw CorruptionError(std::string("checkpoint: invalid config: ") + e.what());
  }
  Network net = Network::build(config, 0);
  auto params = net.parameters();
  auto buffers = net.buffers();
  const auto count = r.get<std::uint32_t>();
  if (count != params.size() + buffers.size()) {
    throw CorruptionError("checkpoint: holds " + std::to_string(count) + " tensors, topology needs " +
                          std::to_string(params.size() + buffers.size()));
  }
  for (std::size_t i = 0; i < count; ++i) {
    const auto kind = r.get<std::uint8_t>();
    const std::string name = r.string();
    const auto rank = r.get<std::uint32_t>();
    if (rank > 8) throw CorruptionError("checkpoint: tensor '" + name + "' has rank " + std::to_string(rank));
    Shape shape(rank);
    for (auto& d : shape) d = static_cast<std::size_t>(r.get<std::uint64_t>());
    std::vector<float> values = r.floats();
    const bool is_param = i < params.size();
    const std::string expected = is_param ? params[i].name : buffers[i - params.size()].name;
    if (kind != (is_param ? kParameter : kBuffer) || name != expected) {
      throw CorruptionError("checkpoint: found tensor '" + name + "' where '" + expected + "' was expected");
    }
    if (is_param) {
      Tensor& t = params[i].tensor;
      if (shape != t.shape() || values.size() != t.numel()) {
        throw CorruptionError("checkpoint: tensor '" + name + "' has shape " + shape_str(shape) + ", expected " +
                              shape_str(t.shape()));
      }
      std::copy(values.begin(), values.end(), t.mutable_data().begin());
    } else {
      auto* dst = buffers[i - params.size()].values;
      if (values.size() != dst->size()) throw CorruptionError("checkpoint: buffer '" + name + "' has wrong length");
      *dst = std::move(values);
    }
  }
  if (r.remaining() != 0) throw CorruptionError("checkpoint: trailing bytes");
  return net;
}

void save_checkpoint(Network& net, const std::filesystem::path& path) {
  const auto bytes = encode_checkpoint(net);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Network load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

void require_same_topology(const NetworkConfig& expected, const NetworkConfig& found) {
  const auto a = to_json(expected), b = to_json(found);
  for (const auto& [key, value] : a.items()) {
    // The readout kind only changes how scores are read off at evaluation.
    if (key == "readout") continue;
    if (b.at(key) != value) {
      throw ValidationError("checkpoint topology mismatch: network." + key + " is " + b.at(key).dump() +
                            " in the checkpoint but " + value.dump() + " in the config");
    }
  }
}

}  // namespace eevact
