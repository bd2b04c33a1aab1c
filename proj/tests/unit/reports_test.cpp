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

#include "eevact/reports.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "eevact/error.hpp"
#include "oracles.hpp"

namespace eevact {
namespace {

EvalCurve synthetic_curve(const std::string& label, std::size_t steps, double dt, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EvalCurve c;
  c.label = label;
  c.parameters = 1337000;
  c.delta_t_s = dt;
  c.ks = {1, 3, 5};
  c.topk.assign(3, {});
  double macs = 0.0, acs = 0.0;
  for (std::size_t t = 0; t < steps; ++t) {
    c.times_s.push_back(static_cast<double>(t + 1) * dt);
    const double a = u(rng) / 3.0;
    c.topk[0].push_back(a);
    c.topk[1].push_back(a + u(rng) / 3.0);
    c.topk[2].push_back(std::min(1.0, c.topk[1].back() + u(rng) / 3.0));
    macs += u(rng) * 1e-3 / 3.0;
    acs += u(rng) * 1e-2 / 7.0;
    c.macs_g.push_back(macs);
    c.acs_g.push_back(acs);
  }
  return c;
}

TEST(Reports, CsvRoundTripIsExact) {
  testing::TempDir dir("csv");
  const EvalCurve c = synthetic_curve("a", 1000, 0.002, 1);
  write_curve_csv(c, dir / "c.csv");
  const EvalCurve back = read_curve_csv(dir / "c.csv");
  ASSERT_EQ(back.ks, c.ks);
  ASSERT_EQ(back.times_s.size(), c.times_s.size());
  for (std::size_t t = 0; t < c.times_s.size(); ++t) {
    ASSERT_NEAR(back.times_s[t], c.times_s[t], 1e-9);
    ASSERT_NEAR(back.macs_g[t], c.macs_g[t], 1e-9);
    ASSERT_NEAR(back.acs_g[t], c.acs_g[t], 1e-9);
    for (std::size_t j = 0; j < 3; ++j) ASSERT_NEAR(back.topk[j][t], c.topk[j][t], 1e-9);
  }
  EXPECT_EQ(back.times_s, c.times_s);
  EXPECT_NEAR(back.delta_t_s, 0.002, 1e-12);
}

TEST(Reports, CsvRejectsMalformedFiles) {
  testing::TempDir dir("badcsv");
  auto write = [&](const std::string& text) {
    std::ofstream(dir / "x.csv") << text;
    return dir / "x.csv";
  };
  EXPECT_THROW(read_curve_csv(write("")), FormatError);
  EXPECT_THROW(read_curve_csv(write("t,top1,macs_g,acs_g\n")), FormatError);
  EXPECT_THROW(read_curve_csv(write("time_s,topX,macs_g,acs_g\n")), FormatError);
  EXPECT_THROW(read_curve_csv(write("time_s,top1,macs_g,acs_g\n0.1,abc,0,0\n")), FormatError);
  EXPECT_THROW(read_curve_csv(write("time_s,top1,macs_g,acs_g\n0.1,0.5,0\n")), FormatError);
  EXPECT_THROW(read_curve_csv(dir / "missing.csv"), IoError);
}

TEST(Reports, TableUsesTheTimestampGrid) {
  const EvalCurve c = synthetic_curve("plif-egru", 1000, 0.002, 2);
  const std::string table = render_table(std::span<const EvalCurve>(&c, 1), kTableTimesS);
  EXPECT_NE(table.find("| Model | Params (M) | Metric | 0.3s | 0.6s | 1s | 1.5s | 2s | MACs (G) | ACs (G) |"),
            std::string::npos)
      << table;
  char row[128];
  std::snprintf(row, sizeof(row), "| plif-egru | 1.337 | Top-1 | %.1f |", 100.0 * c.topk[0][149]);
  EXPECT_NE(table.find(row), std::string::npos) << table;
  EXPECT_NE(table.find("| Top-5 |"), std::string::npos);
  char synops[64];
  std::snprintf(synops, sizeof(synops), "| %.4f | %.4f |\n", c.macs_g[999], c.acs_g[999]);
  EXPECT_NE(table.find(synops), std::string::npos) << table;
}

TEST(Reports, TableMarksTimesBeyondTheHorizon) {
  const EvalCurve c = synthetic_curve("short", 250, 0.002, 3);
  const std::string table = render_table(std::span<const EvalCurve>(&c, 1), kTableTimesS);
  EXPECT_NE(table.find("| n/a | n/a | n/a | n/a |"), std::string::npos) << table;
}

TEST(Reports, PlotsAreValidSvg) {
  const std::vector<EvalCurve> curves{synthetic_curve("a<b>&\"c\"", 200, 0.002, 4), synthetic_curve("d", 200, 0.002, 5)};
  for (const std::string& svg : {render_time_plot(curves), render_synops_plot(curves)}) {
    std::string why;
    EXPECT_TRUE(testing::is_valid_svg(svg, &why)) << why;
    EXPECT_NE(svg.find("polyline"), std::string::npos);
  }
  EXPECT_FALSE(testing::is_valid_svg("<svg><g></svg>"));
  EXPECT_FALSE(testing::is_valid_svg("<html/>"));
}

TEST(Reports, EmitWritesEveryArtifact) {
  testing::TempDir dir("emit");
  const std::vector<EvalCurve> one{synthetic_curve("m", 100, 0.002, 6)};
  const ReportFiles f = emit_reports(one, dir.path() / "out");
  ASSERT_EQ(f.csv.size(), 1u);
  EXPECT_EQ(f.csv[0].filename(), "curve.csv");
  for (const auto& p : {f.time_plot, f.synops_plot, f.table}) EXPECT_TRUE(std::filesystem::exists(p)) << p;

  const std::vector<EvalCurve> two{synthetic_curve("tet run", 100, 0.002, 7), synthetic_curve("cem", 100, 0.002, 8)};
  const ReportFiles g = emit_reports(two, dir.path() / "sweep");
  ASSERT_EQ(g.csv.size(), 2u);
  EXPECT_EQ(g.csv[0].filename(), "curve_1_tet_run.csv");
  EXPECT_EQ(g.csv[1].filename(), "curve_2_cem.csv");
  EXPECT_THROW(emit_reports(std::vector<EvalCurve>{}, dir.path()), ArgumentError);
}

}  // namespace
}  // namespace eevact
