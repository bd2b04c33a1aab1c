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

#include "eevact_cli/run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "eevact/error.hpp"
#include "eevact/strict_json.hpp"

namespace eevact::cli {
namespace {

using nlohmann::json;

template <typename Parse, typename T>
void read_enum(StrictObject& o, std::string_view key, Parse parse, T& out) {
  std::string name;
  if (!o.read(key, name)) return;
  try {
    out = parse(name);
  } catch (const ArgumentError& e) {
    throw ValidationError(o.where(key) + ": " + e.what());
  }
}

template <typename Parse, typename T>
void read_enum(StrictObject& o, std::string_view key, Parse parse, std::optional<T>& out) {
  T value{};
  std::string name;
  if (!o.read(key, name)) return;
  try {
    value = parse(name);
  } catch (const ArgumentError& e) {
    throw ValidationError(o.where(key) + ": " + e.what());
  }
  out = value;
}

void read_synthetic(const json& j, SyntheticSpec& s) {
  StrictObject o(j, "synthetic");
  o.read("patterns", s.patterns);
  o.read("train_per_class", s.train_per_class);
  o.read("test_per_class", s.test_per_class);
  o.read("width", s.width);
  o.read("height", s.height);
  o.read("duration_us", s.duration_us);
  o.read("rate_hz", s.rate_hz);
  o.finish();
}

void read_encoding(const json& j, EncodingSpec& e) {
  StrictObject o(j, "encoding");
  o.read("crop_side", e.crop_side);
  o.read("out_height", e.out_height);
  o.read("out_width", e.out_width);
  o.read("bin_us", e.bin_us);
  o.finish();
}

void read_train(const json& j, TrainConfig& t) {
  StrictObject o(j, "train");
  o.read("epochs", t.epochs);
  o.read("batch_size", t.batch_size);
  o.read("learning_rate", t.learning_rate);
  o.read("final_learning_rate", t.final_learning_rate);
  o.read("weight_decay", t.weight_decay);
  o.read("clip_norm", t.clip_norm);
  o.read("adam_beta1", t.adam_beta1);
  o.read("adam_beta2", t.adam_beta2);
  o.read("adam_eps", t.adam_eps);
  o.read("window_us", t.window_us);
  o.read("eval_window_us", t.eval_window_us);
  o.read("eval_time_chunk", t.eval_time_chunk);
  if (const json* a = o.child("augment")) {
    StrictObject ao(*a, "train.augment");
    ao.read("shift_cells", t.augment.shift_cells);
    ao.read("zoom_min", t.augment.zoom_min);
    ao.read("zoom_max", t.augment.zoom_max);
    ao.read("hflip_prob", t.augment.hflip_prob);
    ao.finish();
  }
  o.finish();
}

void read_loss(const json& j, LossSpec& l) {
  StrictObject o(j, "loss");
  read_enum(o, "kind", parse_loss_kind, l.kind);
  if (const json* n = o.child("tet_samples")) {
    if (n->is_null()) {
      l.tet_samples.reset();
    } else if (n->is_number_unsigned() || (n->is_number_integer() && n->get<long long>() >= 0)) {
      l.tet_samples = n->get<std::size_t>();
    } else {
      throw ValidationError("loss.tet_samples: expected a non-negative integer or null");
    }
  }
  o.finish();
}

void read_eval(const json& j, EvalSettings& e) {
  StrictObject o(j, "eval");
  o.read("ks", e.ks);
  o.read("table_times_s", e.table_times_s);
  o.read("horizon_us", e.horizon_us);
  o.read("batch_size", e.batch_size);
  o.read("time_chunk", e.time_chunk);
  o.finish();
}

SweepEntry read_sweep_entry(const json& j, std::size_t index) {
  SweepEntry s;
  StrictObject o(j, "sweep[" + std::to_string(index) + "]");
  o.read("label", s.label);
  read_enum(o, "neuron", parse_neuron_kind, s.neuron);
  read_enum(o, "fusion", parse_fusion_kind, s.fusion);
  read_enum(o, "loss", parse_loss_kind, s.loss);
  read_enum(o, "readout", parse_readout_kind, s.readout);
  o.finish();
  return s;
}

}  // namespace

TrainConfig RunConfig::desk_train_defaults() {
  TrainConfig t;
  t.epochs = 30;
  t.batch_size = 16;
  t.window_us = 500'000;
  t.eval_window_us = 500'000;
  t.encoding = {32, 32, 32, 2000};
  // Horizontal flips would swap the motion-direction classes.
  t.augment = {3, 0.9, 1.1, 0.0};
  return t;
}

void RunConfig::validate() const {
  network.validate();
  TrainConfig t = train;
  t.encoding = encoding;
  t.validate();
  if (synthetic.patterns.empty()) throw ValidationError("synthetic.patterns: at least one pattern required");
  for (const auto& p : synthetic.patterns) {
    try {
      parse_pattern(p);
    } catch (const ArgumentError& e) {
      throw ValidationError(std::string("synthetic.patterns: ") + e.what());
    }
  }
  if (synthetic.train_per_class < 0 || synthetic.test_per_class < 0) {
    throw ValidationError("synthetic.train_per_class: counts must be >= 0");
  }
  if (synthetic.width < 1 || synthetic.height < 1 || synthetic.width > 65535 || synthetic.height > 65535) {
    throw ValidationError("synthetic.width: sensor extent must be in [1, 65535]");
  }
  if (synthetic.duration_us == 0) throw ValidationError("synthetic.duration_us: must be > 0");
  if (!(synthetic.rate_hz > 0.0)) throw ValidationError("synthetic.rate_hz: must be > 0");
  if (static_cast<std::uint64_t>(encoding.bin_us) != network.bin_us) {
    throw ValidationError("encoding.bin_us (" + std::to_string(encoding.bin_us) + ") must equal network.bin_us (" +
                          std::to_string(network.bin_us) + ")");
  }
  if (encoding.out_height != network.in_height || encoding.out_width != network.in_width) {
    throw ValidationError("encoding.out_height/out_width must match network.in_height/in_width");
  }
  if (eval.ks.empty()) throw ValidationError("eval.ks: at least one k required");
  for (int k : eval.ks) {
    if (k < 1) throw ValidationError("eval.ks: entries must be >= 1");
  }
  for (double t : eval.table_times_s) {
    if (!(t > 0.0)) throw ValidationError("eval.table_times_s: entries must be > 0");
  }
  if (eval.batch_size < 1) throw ValidationError("eval.batch_size: must be >= 1");
  if (eval.time_chunk < 1) throw ValidationError("eval.time_chunk: must be >= 1");
  if (loss.tet_samples && *loss.tet_samples < 1) throw ValidationError("loss.tet_samples: must be >= 1");
  std::set<std::string> labels;
  for (const auto& v : variants()) {
    v.network.validate();
    if (!labels.insert(v.label).second) throw ValidationError("sweep: duplicate label '" + v.label + "'");
  }
}

std::vector<RunConfig::Variant> RunConfig::variants() const {
  if (sweep.empty()) return {{"", network, loss}};
  std::vector<Variant> out;
  for (const auto& s : sweep) {
    Variant v{s.label, network, loss};
    if (s.neuron) v.network.neuron = *s.neuron;
    if (s.fusion) v.network.fusion = *s.fusion;
    if (s.readout) v.network.readout = *s.readout;
    if (s.loss) v.loss.kind = *s.loss;
    if (v.label.empty()) {
      v.label = std::string(to_string(v.network.neuron)) + "-" + std::string(to_string(v.network.fusion)) + "-" +
                std::string(to_string(v.loss.kind)) + "-" + std::string(to_string(v.network.readout));
    }
    out.push_back(std::move(v));
  }
  return out;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  StrictObject o(j, "");
  o.read("seed", c.seed);
  std::string path;
  if (o.read("data_dir", path)) c.data_dir = path;
  if (o.read("output_dir", path)) c.output_dir = path;
  if (const json* s = o.child("synthetic")) read_synthetic(*s, c.synthetic);
  if (const json* e = o.child("encoding")) read_encoding(*e, c.encoding);
  if (const json* n = o.child("network")) c.network = network_config_from_json(*n, c.network, "network");
  if (const json* t = o.child("train")) read_train(*t, c.train);
  if (const json* l = o.child("loss")) read_loss(*l, c.loss);
  if (const json* e = o.child("eval")) read_eval(*e, c.eval);
  if (const json* s = o.child("sweep")) {
    if (!s->is_array()) throw ValidationError("sweep: expected a list");
    for (std::size_t i = 0; i < s->size(); ++i) c.sweep.push_back(read_sweep_entry((*s)[i], i));
  }
  o.finish();
  c.train.encoding = c.encoding;
  return c;
}

json to_json(const RunConfig& c) {
  json sweep = json::array();
  for (const auto& s : c.sweep) {
    json e{{"label", s.label}};
    if (s.neuron) e["neuron"] = to_string(*s.neuron);
    if (s.fusion) e["fusion"] = to_string(*s.fusion);
    if (s.loss) e["loss"] = to_string(*s.loss);
    if (s.readout) e["readout"] = to_string(*s.readout);
    sweep.push_back(e);
  }
  const auto& t = c.train;
  return json{
      {"seed", c.seed},
      {"data_dir", c.data_dir.string()},
      {"output_dir", c.output_dir.string()},
      {"synthetic",
       {{"patterns", c.synthetic.patterns},
        {"train_per_class", c.synthetic.train_per_class},
        {"test_per_class", c.synthetic.test_per_class},
        {"width", c.synthetic.width},
        {"height", c.synthetic.height},
        {"duration_us", c.synthetic.duration_us},
        {"rate_hz", c.synthetic.rate_hz}}},
      {"encoding",
       {{"crop_side", c.encoding.crop_side},
        {"out_height", c.encoding.out_height},
        {"out_width", c.encoding.out_width},
        {"bin_us", c.encoding.bin_us}}},
      {"network", to_json(c.network)},
      {"train",
       {{"epochs", t.epochs},
        {"batch_size", t.batch_size},
        {"learning_rate", t.learning_rate},
        {"final_learning_rate", t.final_learning_rate},
        {"weight_decay", t.weight_decay},
        {"clip_norm", t.clip_norm},
        {"adam_beta1", t.adam_beta1},
        {"adam_beta2", t.adam_beta2},
        {"adam_eps", t.adam_eps},
        {"window_us", t.window_us},
        {"eval_window_us", t.eval_window_us},
        {"eval_time_chunk", t.eval_time_chunk},
        {"augment",
         {{"shift_cells", t.augment.shift_cells},
          {"zoom_min", t.augment.zoom_min},
          {"zoom_max", t.augment.zoom_max},
          {"hflip_prob", t.augment.hflip_prob}}}}},
      {"loss",
       {{"kind", to_string(c.loss.kind)},
        {"tet_samples", c.loss.tet_samples ? json(*c.loss.tet_samples) : json(nullptr)}}},
      {"eval",
       {{"ks", c.eval.ks},
        {"table_times_s", c.eval.table_times_s},
        {"horizon_us", c.eval.horizon_us},
        {"batch_size", c.eval.batch_size},
        {"time_chunk", c.eval.time_chunk}}},
      {"sweep", sweep},
  };
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

void apply_seed_env(RunConfig& config) {
  const char* env = std::getenv("EEVACT_SEED");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0' || *env == '-') {
    throw ValidationError(std::string("EEVACT_SEED: '") + env + "' is not a non-negative integer");
  }
  config.seed = v;
}

}  // namespace eevact::cli
