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

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "eevact/checkpoint.hpp"
#include "eevact/error.hpp"
#include "eevact_cli/commands.hpp"
#include "eevact_cli/dataset.hpp"
#include "eevact_cli/run_config.hpp"
#include "oracles.hpp"

namespace eevact::cli {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code;
  std::string out, err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "eevact");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Clears EEVACT_SEED for the duration of a test.
class SeedEnvGuard {
 public:
  SeedEnvGuard() { unsetenv("EEVACT_SEED"); }
  ~SeedEnvGuard() { unsetenv("EEVACT_SEED"); }
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    config_ = dir_ / "config.json";
    std::ofstream(config_) << R"({
      "seed": 4,
      "data_dir": ")" << (dir_ / "data").string()
                           << R"(",
      "output_dir": ")" << (dir_ / "runs").string()
                           << R"(",
      "synthetic": {"train_per_class": 4, "test_per_class": 2, "duration_us": 40000, "rate_hz": 40000},
      "train": {"epochs": 1, "batch_size": 4, "window_us": 40000, "eval_window_us": 40000},
      "eval": {"table_times_s": [0.01, 0.02, 0.04], "batch_size": 4, "time_chunk": 5}
    })";
  }
  std::string write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return (dir_ / name).string();
  }

  SeedEnvGuard env_;
  testing::TempDir dir_{"cli"};
  fs::path config_;
};

TEST_F(CliTest, GenerateTrainEvalInspect) {
  const std::string cfg = config_.string();
  auto g = run({"generate", "-c", cfg});
  ASSERT_EQ(g.code, kOk) << g.err;
  const auto rows = read_manifest(dir_ / "data");
  EXPECT_EQ(rows.size(), 12u);
  EXPECT_EQ(load_split(dir_ / "data", "train").size(), 8u);

  auto t = run({"train", "-c", cfg});
  ASSERT_EQ(t.code, kOk) << t.err;
  EXPECT_NE(t.out.find("epoch 1/1"), std::string::npos) << t.out;
  for (const char* f : {"checkpoint.eevc", "metrics.csv", "config.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "runs" / "train" / f)) << f;
  }

  auto e = run({"eval", "-c", cfg});
  ASSERT_EQ(e.code, kOk) << e.err;
  EXPECT_NE(e.out.find("| 0.01s | 0.02s | 0.04s |"), std::string::npos) << e.out;
  for (const char* f : {"curve.csv", "accuracy_over_time.svg", "accuracy_over_synops.svg", "table.md"}) {
    EXPECT_TRUE(fs::exists(dir_ / "runs" / "eval" / f)) << f;
  }

  auto i = run({"inspect", (dir_ / "data" / "test_00000.eev").string(), "--bins", "4"});
  ASSERT_EQ(i.code, kOk) << i.err;
  EXPECT_NE(i.out.find("sensor:      32 x 32"), std::string::npos) << i.out;
}

TEST_F(CliTest, GenerateRefusesNonEmptyDirectoryWithoutForce) {
  const std::string cfg = config_.string();
  ASSERT_EQ(run({"generate", "-c", cfg}).code, kOk);
  auto again = run({"generate", "-c", cfg});
  EXPECT_EQ(again.code, kValidation);
  EXPECT_NE(again.err.find("--force"), std::string::npos);
  EXPECT_EQ(run({"generate", "-c", cfg, "--force"}).code, kOk);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({}).code, kValidation);
  EXPECT_EQ(run({"frobnicate"}).code, kValidation);
  EXPECT_EQ(run({"train", "--bogus"}).code, kValidation);
  EXPECT_EQ(run({"--help"}).code, kOk);
  EXPECT_EQ(run({"train", "-c", (dir_ / "missing.json").string()}).code, kIo);
  EXPECT_EQ(run({"train", "-c", write("bad.json", "{not json")}).code, kValidation);
  auto unknown = run({"train", "-c", write("unk.json", R"({"train": {"epoch": 3}})")});
  EXPECT_EQ(unknown.code, kValidation);
  EXPECT_NE(unknown.err.find("train.epoch"), std::string::npos) << unknown.err;
  EXPECT_EQ(run({"train", "-c", write("neg.json", R"({"train": {"learning_rate": -1}})")}).code, kValidation);
  EXPECT_EQ(run({"train", "-c", config_.string(), "--data", (dir_ / "nowhere").string()}).code, kValidation);
  EXPECT_EQ(run({"inspect", (dir_ / "nothing.eev").string()}).code, kIo);
  EXPECT_EQ(run({"inspect", write("junk.eev", "definitely not events")}).code, kIo);

  ASSERT_EQ(run({"generate", "-c", config_.string()}).code, kOk);
  EXPECT_EQ(run({"eval", "-c", config_.string(), "--checkpoint", write("c.eevc", "EEVCgarbage")}).code, kIo);
  EXPECT_EQ(run({"eval", "-c", config_.string(), "--checkpoint", (dir_ / "none.eevc").string()}).code, kValidation);
}

TEST_F(CliTest, DivergenceExitCode) {
  ASSERT_EQ(run({"generate", "-c", config_.string()}).code, kOk);
  Network net = Network::build(load_run_config(config_).network, 0);
  for (ParamRef& p : net.parameters()) {
    if (p.name == "readout.bias") p.tensor.mutable_data()[0] = std::numeric_limits<float>::infinity();
  }
  save_checkpoint(net, dir_ / "nan.eevc");
  auto r = run({"train", "-c", config_.string(), "--init", (dir_ / "nan.eevc").string()});
  EXPECT_EQ(r.code, kDivergence) << r.err;
}

TEST_F(CliTest, ZeroLearningRateKeepsInitialWeights) {
  ASSERT_EQ(run({"generate", "-c", config_.string()}).code, kOk);
  Network net = Network::build(load_run_config(config_).network, 17);
  save_checkpoint(net, dir_ / "init.eevc");
  ASSERT_EQ(run({"train", "-c", config_.string(), "--init", (dir_ / "init.eevc").string(), "--lr", "0"}).code, kOk);
  Network after = load_checkpoint(dir_ / "runs" / "train" / "checkpoint.eevc");
  const auto a = net.parameters(), b = after.parameters();
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(std::equal(a[i].tensor.data().begin(), a[i].tensor.data().end(), b[i].tensor.data().begin()))
        << a[i].name;
  }
}

TEST_F(CliTest, SeedPrecedenceIsFileThenEnvThenFlag) {
  auto seed_used = [&](std::vector<std::string> extra) {
    std::vector<std::string> args{"train", "-c", config_.string(), "--epochs", "1"};
    args.insert(args.end(), extra.begin(), extra.end());
    EXPECT_EQ(run(args).code, kOk);
    return load_run_config(dir_ / "runs" / "train" / "config.json").seed;
  };
  ASSERT_EQ(run({"generate", "-c", config_.string()}).code, kOk);
  EXPECT_EQ(seed_used({}), 4u);
  setenv("EEVACT_SEED", "9", 1);
  EXPECT_EQ(seed_used({}), 9u);
  EXPECT_EQ(seed_used({"--seed", "11"}), 11u);
  setenv("EEVACT_SEED", "nine", 1);
  EXPECT_EQ(run({"train", "-c", config_.string()}).code, kValidation);
}

TEST(RunConfig, JsonRoundTripAndVariants) {
  RunConfig c;
  c.seed = 3;
  c.sweep = {{"", NeuronKind::adlif, FusionKind::egu, LossKind::tet, std::nullopt}, {"named", {}, {}, {}, {}}};
  const RunConfig back = run_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  const auto v = back.variants();
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].label, "adlif-egu-tet-mean");
  EXPECT_EQ(v[0].network.fusion, FusionKind::egu);
  EXPECT_EQ(v[1].label, "named");
  EXPECT_EQ(v[1].network, c.network);
  EXPECT_EQ(RunConfig{}.variants().size(), 1u);
}

TEST(RunConfig, RejectsInconsistentEncoding) {
  RunConfig c;
  c.encoding.out_height = 16;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Manifest, RoundTripAndErrors) {
  testing::TempDir dir("manifest");
  const std::vector<ManifestRow> rows{{"a.eev", 0, "bar_left", "train", 1000}, {"b.eev", 1, "bar_right", "test", 5}};
  write_manifest(dir.path(), rows);
  const auto back = read_manifest(dir.path());
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].file, "b.eev");
  EXPECT_EQ(back[1].duration_us, 5u);
  std::ofstream(dir / std::string(kManifestName)) << "file,label\nx,1\n";
  EXPECT_THROW(read_manifest(dir.path()), FormatError);
  testing::TempDir empty("manifest-empty");
  EXPECT_THROW(read_manifest(empty.path()), IoError);
}

}  // namespace
}  // namespace eevact::cli
