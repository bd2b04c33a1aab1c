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

#ifndef EEVACT_CHECKPOINT_HPP_
#define EEVACT_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "eevact/network.hpp"

namespace eevact {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout is described in docs/checkpoint_format.md.
std::vector<std::uint8_t> encode_checkpoint(Network& net);
Network decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(Network& net, const std::filesystem::path& path);
Network load_checkpoint(const std::filesystem::path& path);

// Throws ValidationError naming the first structural field that differs;
// the readout kind is an evaluation choice and is not compared.
void require_same_topology(const NetworkConfig& expected, const NetworkConfig& found);

}  // namespace eevact

#endif  // EEVACT_CHECKPOINT_HPP_
