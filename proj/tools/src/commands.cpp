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

#include "eevact_cli/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "eevact/checkpoint.hpp"
#include "eevact/error.hpp"
#include "eevact_cli/dataset.hpp"

namespace eevact::cli {
namespace {

namespace fs = std::filesystem;

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory '" + dir.string() + "'");
}

void require_directory(const fs::path& dir, const char* what) {
  if (!fs::is_directory(dir)) throw ValidationError(std::string(what) + " '" + dir.string() + "' does not exist");
}

fs::path variant_dir(const fs::path& root, const RunConfig& config, const RunConfig::Variant& v) {
  return config.sweep.empty() ? root : root / v.label;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
}

}  // namespace

std::size_t cmd_generate(const RunConfig& config, const fs::path& out_dir, bool force, std::ostream& log) {
  config.validate();
  if (fs::exists(out_dir) && !fs::is_directory(out_dir)) {
    throw ValidationError("output path '" + out_dir.string() + "' exists and is not a directory");
  }
  if (fs::is_directory(out_dir) && !fs::is_empty(out_dir)) {
    if (!force) {
      throw ValidationError("output directory '" + out_dir.string() + "' is not empty (pass --force to overwrite)");
    }
    for (const auto& entry : fs::directory_iterator(out_dir)) {
      const auto& p = entry.path();
      if (entry.is_regular_file() && (p.extension() == ".eev" || p.filename() == kManifestName)) fs::remove(p);
    }
  }
  ensure_directory(out_dir);

  const SyntheticSpec& s = config.synthetic;
  const SensorGeometry geometry{static_cast<std::uint16_t>(s.width), static_cast<std::uint16_t>(s.height)};
  std::vector<ManifestRow> rows;
  std::uint64_t index = 0;
  for (const auto& [split, per_class] : {std::pair{"train", s.train_per_class}, std::pair{"test", s.test_per_class}}) {
    std::size_t n = 0;
    for (int i = 0; i < per_class; ++i) {
      for (std::size_t c = 0; c < s.patterns.size(); ++c) {
        const Pattern pattern = parse_pattern(s.patterns[c]);
        EventStream stream =
            generate_synthetic(pattern, geometry, s.duration_us, s.rate_hz, mix_seed(config.seed, index++));
        const std::string file = format("%s_%05zu.eev", split, n++);
        write_stream(stream, out_dir / file);
        rows.push_back({file, static_cast<int>(c), s.patterns[c], split, stream.duration_us});
      }
    }
  }
  write_manifest(out_dir, rows);
  log << "wrote " << rows.size() << " event files and " << kManifestName << " to " << out_dir.string() << '\n';
  return rows.size();
}

std::vector<TrainedVariant> cmd_train(const RunConfig& config, const fs::path& data_dir, const fs::path& out_dir,
                                      const std::optional<fs::path>& init_checkpoint, std::ostream& log) {
  config.validate();
  require_directory(data_dir, "data directory");
  if (init_checkpoint && !fs::is_regular_file(*init_checkpoint)) {
    throw ValidationError("checkpoint '" + init_checkpoint->string() + "' does not exist");
  }
  const auto train_set = load_split(data_dir, "train");
  const auto test_set = load_split(data_dir, "test");
  if (train_set.empty()) throw ValidationError("no training samples in '" + data_dir.string() + "'");

  std::vector<TrainedVariant> out;
  for (const auto& v : config.variants()) {
    const fs::path dir = variant_dir(out_dir, config, v);
    ensure_directory(dir);
    Network net = Network::build(v.network, config.seed);
    if (init_checkpoint) {
      net = load_checkpoint(*init_checkpoint);
      require_same_topology(v.network, net.config());
    }
    TrainConfig t = config.train;
    t.encoding = config.encoding;
    t.seed = config.seed;
    if (!v.label.empty()) log << "== " << v.label << '\n';
    log << "parameters: " << net.count_parameters() << '\n';
    const TrainResult result = train(net, train_set, test_set, t, v.loss, [&](const EpochMetrics& m) {
      log << format("epoch %d/%d  loss %.5f  top1 %.4f  top5 %.4f  (%.1f s)\n", m.epoch, t.epochs, m.train_loss,
                    m.eval_top1, m.eval_top5, m.wall_seconds)
          << std::flush;
    });
    TrainedVariant tv{v.label, dir / "checkpoint.eevc", dir / "metrics.csv", result.log};
    save_checkpoint(net, tv.checkpoint);
    write_metrics_csv(result.log, tv.metrics);
    RunConfig resolved = config;
    resolved.network = v.network;
    resolved.loss = v.loss;
    resolved.sweep.clear();
    write_json(dir / "config.json", to_json(resolved));
    log << "wrote " << tv.checkpoint.string() << " and " << tv.metrics.string() << '\n';
    out.push_back(std::move(tv));
  }
  return out;
}

std::vector<EvalCurve> cmd_eval(const RunConfig& config, const fs::path& data_dir, const fs::path& checkpoint,
                                const fs::path& out_dir, std::ostream& log) {
  config.validate();
  require_directory(data_dir, "data directory");
  const auto test_set = load_split(data_dir, "test");
  if (test_set.empty()) throw ValidationError("no test samples in '" + data_dir.string() + "'");

  std::vector<EvalCurve> curves;
  for (const auto& v : config.variants()) {
    const fs::path path = config.sweep.empty() ? checkpoint : checkpoint / v.label / "checkpoint.eevc";
    if (!fs::is_regular_file(path)) throw ValidationError("checkpoint '" + path.string() + "' does not exist");
    Network net = load_checkpoint(path);
    require_same_topology(v.network, net.config());
    EarlyEvalOptions options;
    options.readout = v.network.readout;
    options.ks = config.eval.ks;
    options.horizon_us = config.eval.horizon_us != 0 ? config.eval.horizon_us : horizon_for(config.eval.table_times_s);
    options.encoding = config.encoding;
    options.batch_size = config.eval.batch_size;
    options.time_chunk = config.eval.time_chunk;
    EvalCurve curve = evaluate_early(net, test_set, options);
    curve.label = v.label.empty() ? std::string(to_string(v.network.neuron)) + "-" +
                                        std::string(to_string(v.network.fusion))
                                  : v.label;
    if (curve.padded_samples > 0) {
      log << "note: " << curve.padded_samples << " of " << curve.samples
          << " recordings are shorter than the evaluated horizon and were zero-padded\n";
    }
    curves.push_back(std::move(curve));
  }
  const ReportFiles files = emit_reports(curves, out_dir, config.eval.table_times_s);
  log << render_table(curves, config.eval.table_times_s);
  log << "wrote reports to " << out_dir.string() << " (" << files.csv.size() << " curve CSV, "
      << files.time_plot.filename().string() << ", " << files.synops_plot.filename().string() << ", "
      << files.table.filename().string() << ")\n";
  return curves;
}

InspectSummary cmd_inspect(const fs::path& file, std::size_t bins, std::ostream& out) {
  ReadWarnings warnings;
  const EventStream s = read_stream(file, &warnings);
  InspectSummary r;
  r.geometry = s.geometry;
  r.count = s.events.size();
  r.resorted = warnings.resorted;
  if (!s.events.empty()) {
    r.first_us = s.events.front().t;
    r.last_us = s.events.back().t;
  }
  for (const auto& e : s.events) (e.p ? r.on : r.off) += 1;
  bins = std::max<std::size_t>(bins, 1);
  r.histogram.assign(bins, 0);
  r.histogram_bin_us = std::max<std::uint64_t>(1, (r.last_us + bins) / bins);
  for (const auto& e : s.events) r.histogram[std::min<std::size_t>(e.t / r.histogram_bin_us, bins - 1)] += 1;

  out << "file:        " << file.string() << '\n'
      << "sensor:      " << s.geometry.width << " x " << s.geometry.height << '\n'
      << "events:      " << r.count << '\n'
      << "time range:  " << r.first_us << " .. " << r.last_us << " us\n"
      << "polarity:    on " << r.on << ", off " << r.off << '\n';
  if (r.resorted) out << "warning:     events were not time-ordered and have been re-sorted\n";
  if (r.count > 0) {
    out << "event rate (" << bins << " bins of " << r.histogram_bin_us << " us):\n";
    const std::size_t peak = *std::max_element(r.histogram.begin(), r.histogram.end());
    for (std::size_t i = 0; i < bins; ++i) {
      const double rate = static_cast<double>(r.histogram[i]) * 1e6 / static_cast<double>(r.histogram_bin_us);
      const std::size_t bar = peak == 0 ? 0 : (r.histogram[i] * 40 + peak - 1) / peak;
      out << format("  %10llu us  %12.0f ev/s  ", static_cast<unsigned long long>(i * r.histogram_bin_us), rate)
          << std::string(bar, '#') << '\n';
    }
  }
  return r;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spiking two-stream networks for early event-based recognition"};
  app.name("eevact");
  app.require_subcommand(1);

  std::string config_path, data_dir, out_dir, checkpoint, init_checkpoint, file;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<double> lr;
  bool force = false, deterministic = false;
  std::size_t bins = 10;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "JSON run config (defaults apply to every missing field)");
    cmd->add_option("--seed", seed, "Seed (overrides EEVACT_SEED and the config)");
    cmd->add_flag("--deterministic", deterministic, "Single-threaded, fixed-order numerics");
  };
  CLI::App* gen = app.add_subcommand("generate", "Write a synthetic event dataset and manifest");
  common(gen);
  gen->add_option("-o,--out", out_dir, "Dataset directory (default: data_dir from the config)");
  gen->add_flag("--force", force, "Overwrite a non-empty dataset directory");

  CLI::App* trn = app.add_subcommand("train", "Train on the train split, logging test accuracy per epoch");
  common(trn);
  trn->add_option("-d,--data", data_dir, "Dataset directory");
  trn->add_option("-o,--out", out_dir, "Output directory (default: <output_dir>/train)");
  trn->add_option("--epochs", epochs, "Override train.epochs");
  trn->add_option("--lr", lr, "Override train.learning_rate");
  trn->add_option("--init", init_checkpoint, "Start from the weights of this checkpoint");

  CLI::App* evl = app.add_subcommand("eval", "Early-recognition evaluation and reports on the test split");
  common(evl);
  evl->add_option("-d,--data", data_dir, "Dataset directory");
  evl->add_option("-o,--out", out_dir, "Report directory (default: <output_dir>/eval)");
  evl->add_option("--checkpoint", checkpoint,
                  "Checkpoint file, or training output directory for a sweep (default: <output_dir>/train)");

  CLI::App* ins = app.add_subcommand("inspect", "Summarize an event file");
  ins->add_option("file", file, "Event file")->required();
  ins->add_option("--bins", bins, "Event-rate histogram bins");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }
  (void)deterministic;  // the engine never spawns threads

  try {
    if (ins->parsed()) {
      cmd_inspect(file, bins, out);
      return kOk;
    }
    RunConfig config = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    apply_seed_env(config);
    if (seed) config.seed = *seed;
    if (epochs) config.train.epochs = *epochs;
    if (lr) config.train.learning_rate = *lr;
    const fs::path data = data_dir.empty() ? config.data_dir : fs::path(data_dir);
    if (gen->parsed()) {
      cmd_generate(config, out_dir.empty() ? config.data_dir : fs::path(out_dir), force, out);
    } else if (trn->parsed()) {
      const fs::path dest = out_dir.empty() ? config.output_dir / "train" : fs::path(out_dir);
      std::optional<fs::path> init;
      if (!init_checkpoint.empty()) init = init_checkpoint;
      cmd_train(config, data, dest, init, out);
    } else if (evl->parsed()) {
      const fs::path dest = out_dir.empty() ? config.output_dir / "eval" : fs::path(out_dir);
      fs::path ckpt = checkpoint.empty() ? config.output_dir / "train" : fs::path(checkpoint);
      if (checkpoint.empty() && config.sweep.empty()) ckpt /= "checkpoint.eevc";
      cmd_eval(config, data, ckpt, dest, out);
    }
    return kOk;
  } catch (const DivergenceError& e) {
    err << "error: training diverged: " << e.what() << '\n';
    return kDivergence;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const CorruptionError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  }
}

}  // namespace eevact::cli
