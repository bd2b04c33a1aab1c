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

#ifndef EEVACT_CLI_DATASET_HPP_
#define EEVACT_CLI_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "eevact/event_io.hpp"

namespace eevact::cli {

inline constexpr const char* kManifestName = "manifest.csv";

// One line of manifest.csv: file,label,pattern,split,duration_us.
struct ManifestRow {
  std::string file;
  int label = 0;
  std::string pattern;
  std::string split;
  std::uint64_t duration_us = 0;

  friend bool operator==(const ManifestRow&, const ManifestRow&) = default;
};

void write_manifest(const std::filesystem::path& dir, const std::vector<ManifestRow>& rows);
// FormatError on malformed lines, IoError when missing.
std::vector<ManifestRow> read_manifest(const std::filesystem::path& dir);

// Streams of one split with labels and durations from the manifest.
std::vector<EventStream> load_split(const std::filesystem::path& dir, std::string_view split);

}  // namespace eevact::cli

#endif  // EEVACT_CLI_DATASET_HPP_
