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

#ifndef EEVACT_CLI_COMMANDS_HPP_
#define EEVACT_CLI_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "eevact/earlybench.hpp"
#include "eevact/reports.hpp"
#include "eevact/training.hpp"
#include "eevact_cli/run_config.hpp"

namespace eevact::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kIo = 2, kDivergence = 3 };

// Writes the synthetic dataset described by config.synthetic. Refuses a
// non-empty directory unless `force`, in which case previous event files
// and the manifest are replaced.
std::size_t cmd_generate(const RunConfig& config, const std::filesystem::path& out_dir, bool force,
                         std::ostream& log);

struct TrainedVariant {
  std::string label;
  std::filesystem::path checkpoint;
  std::filesystem::path metrics;
  std::vector<EpochMetrics> log;
};

// Trains every variant on the "train" split, evaluating on "test" after each
// epoch. A sweep writes one subdirectory per label.
std::vector<TrainedVariant> cmd_train(const RunConfig& config, const std::filesystem::path& data_dir,
                                      const std::filesystem::path& out_dir,
                                      const std::optional<std::filesystem::path>& init_checkpoint,
                                      std::ostream& log);

// Early-recognition evaluation of the "test" split. `checkpoint` is a file
// for a single model, or the training output directory for a sweep.
std::vector<EvalCurve> cmd_eval(const RunConfig& config, const std::filesystem::path& data_dir,
                                const std::filesystem::path& checkpoint, const std::filesystem::path& out_dir,
                                std::ostream& log);

struct InspectSummary {
  SensorGeometry geometry;
  std::size_t count = 0;
  std::uint64_t first_us = 0;
  std::uint64_t last_us = 0;
  std::size_t on = 0;
  std::size_t off = 0;
  bool resorted = false;
  std::vector<std::size_t> histogram;
  std::uint64_t histogram_bin_us = 0;
};

InspectSummary cmd_inspect(const std::filesystem::path& file, std::size_t bins, std::ostream& out);

// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace eevact::cli

#endif  // EEVACT_CLI_COMMANDS_HPP_
