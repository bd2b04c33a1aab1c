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

#include "eevact_cli/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "eevact/error.hpp"

namespace eevact::cli {
namespace {

constexpr const char* kHeader = "file,label,pattern,split,duration_us";

template <typename T>
T parse_number(const std::string& cell, const std::string& where) {
  T value{};
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw FormatError(where + ": '" + cell + "' is not a valid number");
  }
  return value;
}

}  // namespace

void write_manifest(const std::filesystem::path& dir, const std::vector<ManifestRow>& rows) {
  const auto path = dir / kManifestName;
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << kHeader << '\n';
  for (const auto& r : rows) {
    out << r.file << ',' << r.label << ',' << r.pattern << ',' << r.split << ',' << r.duration_us << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<ManifestRow> read_manifest(const std::filesystem::path& dir) {
  const auto path = dir / kManifestName;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw FormatError("'" + path.string() + "' does not start with the header '" + kHeader + "'");
  }
  std::vector<ManifestRow> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(number);
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw FormatError(where + ": expected 5 fields, found " + std::to_string(cells.size()));
    ManifestRow r;
    r.file = cells[0];
    r.label = parse_number<int>(cells[1], where);
    r.pattern = cells[2];
    r.split = cells[3];
    r.duration_us = parse_number<std::uint64_t>(cells[4], where);
    if (r.file.empty() || r.file.find('/') != std::string::npos) throw FormatError(where + ": bad file name");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<EventStream> load_split(const std::filesystem::path& dir, std::string_view split) {
  std::vector<EventStream> out;
  for (const auto& row : read_manifest(dir)) {
    if (row.split != split) continue;
    EventStream s = read_stream(dir / row.file);
    if (row.duration_us < s.duration_us) {
      throw ValidationError(row.file + ": manifest duration " + std::to_string(row.duration_us) +
                            " us ends before the last event at " + std::to_string(s.duration_us) + " us");
    }
    s.duration_us = row.duration_us;
    s.label = row.label;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace eevact::cli
