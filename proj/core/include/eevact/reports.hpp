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

#ifndef EEVACT_REPORTS_HPP_
#define EEVACT_REPORTS_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "eevact/earlybench.hpp"

namespace eevact {

struct ReportFiles {
  std::vector<std::filesystem::path> csv;  // one per curve
  std::filesystem::path time_plot;
  std::filesystem::path synops_plot;
  std::filesystem::path table;
};

// Writes per-curve CSVs (time_s, top<k>..., macs_g, acs_g), the
// accuracy-over-time and accuracy-over-synops SVG plots shared by all curves,
// and a markdown table at `table_times`. Creates out_dir if needed.
ReportFiles emit_reports(std::span<const EvalCurve> curves, const std::filesystem::path& out_dir,
                         std::span<const double> table_times = kTableTimesS);

void write_curve_csv(const EvalCurve& curve, const std::filesystem::path& path);
// Restores times, ks, accuracies and synops; other fields stay default.
EvalCurve read_curve_csv(const std::filesystem::path& path);

std::string render_table(std::span<const EvalCurve> curves, std::span<const double> table_times);
std::string render_time_plot(std::span<const EvalCurve> curves);
std::string render_synops_plot(std::span<const EvalCurve> curves);

}  // namespace eevact

#endif  // EEVACT_REPORTS_HPP_
