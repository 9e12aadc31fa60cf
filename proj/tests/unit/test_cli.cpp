// Copyright 2026 The eyelabel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "eyelabel/anomaly_detector.hpp"
#include "eyelabel/image.hpp"
#include "eyelabel/json_io.hpp"
#include "fixtures.hpp"

namespace eyelabel {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("eyelabel_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(const std::string& args) const {
    const std::string cmd = std::string(EYELABEL_CLI) + " " + args + " >" + path("stdout.txt") + " 2>" +
                            path("stderr.txt");
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

TEST_F(CliTest, AnnotateSimulatedRecording) {
  ASSERT_EQ(run("simulate --out " + path("rec.txt") + " --saccades 3 --seed 4"), 0);
  ASSERT_EQ(run("annotate --events " + path("rec.txt") + " --out " + path("a.csv") + " --report " +
                path("report.json")),
            0)
      << slurp(path("stderr.txt"));
  const auto report = json::parse(slurp(path("report.json")));
  EXPECT_EQ(report.at("saccade_count"), 3);
  EXPECT_GT(report.at("centers").get<int>(), 0);
  EXPECT_TRUE(fs::exists(meta_path_for(path("a.csv"))));
  EXPECT_EQ(load_meta_file(meta_path_for(path("a.csv"))).recording_id, "rec");
}

TEST_F(CliTest, EmptyFileFails) {
  std::ofstream(path("empty.txt")).close();
  EXPECT_NE(run("annotate --events " + path("empty.txt") + " --out " + path("a.csv")), 0);
  EXPECT_NE(slurp(path("stderr.txt")).find("no events"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("a.csv")));
  EXPECT_NE(run("validate --events " + path("missing.txt")), 0);
  EXPECT_NE(run("annotate --events"), 0);
}

TEST_F(CliTest, RerunsAreByteIdentical) {
  ASSERT_EQ(run("simulate --out " + path("rec.txt") + " --saccades 2 --seed 9"), 0);
  const std::string base = "annotate --events " + path("rec.txt") + " --ransac-seed 5 --out ";
  ASSERT_EQ(run(base + path("a.csv")), 0);
  ASSERT_EQ(run(base + path("b.csv")), 0);
  ASSERT_EQ(run(base + path("c.csv") + " --jobs 3"), 0);
  const auto a = slurp(path("a.csv"));
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(path("b.csv")));
  EXPECT_EQ(a, slurp(path("c.csv")));
}

TEST_F(CliTest, ConfigFileOverridesFlags) {
  ASSERT_EQ(run("simulate --out " + path("rec.txt") + " --saccades 3"), 0);
  std::ofstream(path("pipeline.conf")) << "saccade_threshold = 100000\n";
  ASSERT_EQ(run("annotate --events " + path("rec.txt") + " --saccade-threshold 10 --config " +
                path("pipeline.conf") + " --out " + path("a.csv") + " --report " + path("r.json")),
            0);
  EXPECT_EQ(json::parse(slurp(path("r.json"))).at("saccade_count"), 0);
  std::ofstream(path("bad.conf")) << "no_such_key = 1\n";
  EXPECT_NE(run("annotate --events " + path("rec.txt") + " --config " + path("bad.conf") + " --out " +
                path("b.csv")),
            0);
}

TEST_F(CliTest, StatsMatchHandCounts) {
  save_annotations_file(path("user7.csv"), fixture::hand_built());
  ASSERT_EQ(run("stats " + path("user7.csv") + " --json " + path("stats.json")), 0);
  const auto j = json::parse(slurp(path("stats.json")));
  EXPECT_EQ(j.at("total"), json(fixture::kHandCounts));
  EXPECT_EQ(j.at("users").at(0).at("user"), "user7");
  const auto table = slurp(path("stdout.txt"));
  EXPECT_NE(table.find("Eye Center Position"), std::string::npos);

  // Sidecar thresholds apply per file; the total is the field-wise sum.
  RecordingMeta strict;
  strict.user = "strict";
  strict.min_event_threshold = 199;
  save_annotations_file(path("s.csv"), fixture::hand_built());
  save_meta_file(meta_path_for(path("s.csv")), strict);
  ASSERT_EQ(run("stats " + path("user7.csv") + " " + path("s.csv") + " --json " + path("both.json")), 0);
  const auto both = json::parse(slurp(path("both.json")));
  EXPECT_EQ(both.at("users").at(1).at("stats").at("annotated_frames"), 3);
  EXPECT_EQ(both.at("total").at("annotated_frames"), 12);
  EXPECT_EQ(both.at("total").at("frames_analyzed"), 24);
}

TEST_F(CliTest, RenderEmptyFrameIsBlack) {
  std::ofstream(path("late.txt")) << "12000 5 5 1\n";
  ASSERT_EQ(run("render --events " + path("late.txt") + " --frame 0 --out " + path("f0.png") + " --csv " +
                path("f0.csv")),
            0);
  const auto png = slurp(path("f0.png"));
  const auto black = encode_png(RgbImage(346, 260, colors::kBlack));
  EXPECT_EQ(png, std::string(black.begin(), black.end()));
  EXPECT_EQ(slurp(path("f0.csv")), "x,y,pos,neg\n");
}

TEST_F(CliTest, AnomaliesEqualLibraryCall) {
  auto recs = fixture::hand_built();
  recs[9].center = Point2{200.0, 90.0};
  save_annotations_file(path("a.csv"), recs);
  ASSERT_EQ(run("anomalies --annotations " + path("a.csv") + " --threshold 10 --out " + path("r.json") +
                " --plot " + path("plot.png")),
            0);
  AnomalyConfig cfg;
  cfg.threshold_px = 10;
  const json expect = find_anomalies(compute_deltas(recs), cfg);
  EXPECT_EQ(json::parse(slurp(path("r.json"))), expect);
  EXPECT_EQ(expect.at("anomalies").size(), 2u);
  EXPECT_TRUE(fs::exists(path("plot.png")));
  EXPECT_NE(run("anomalies --annotations " + path("a.csv") + " --threshold 0"), 0);
}

TEST_F(CliTest, ValidateReportsCounts) {
  std::ofstream(path("e.txt")) << "0 1 1 1\n10 2 2 1\n40 3 3 0\n";
  ASSERT_EQ(run("validate --events " + path("e.txt")), 0);
  const auto j = json::parse(slurp(path("stdout.txt")));
  EXPECT_EQ(j.at("positive"), 2);
  EXPECT_EQ(j.at("negative"), 1);
  EXPECT_EQ(j.at("frames"), 1);
}

}  // namespace
}  // namespace eyelabel
