//
// Copyright 2026 The BinCP Authors
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
//

#include "cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "json.hpp"

namespace bincp::cli {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;
using ::testing::StartsWith;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Invoke(std::initializer_list<std::string> args) {
  std::vector<std::string> storage = {"bincp"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : storage) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bincp_cli_test_" +
            std::string(
                ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
  const fs::path fixture_ = fs::path(BINCP_TEST_DATA_DIR) / "fixture";
};

TEST_F(CliTest, CertifyZeroRadiusToStdout) {
  const Result r = Invoke({"certify", "--p", "0.9", "--r", "0"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "p,cert_lower,cert_upper\n0.9,0.9,0.9\n");
  EXPECT_TRUE(fs::is_empty(dir_));
}

TEST_F(CliTest, CertifyGridToFileWritesSnapshot) {
  const Result r = Invoke({"certify", "--p-grid", "0.1:0.9:0.4", "--sigma", "0.5",
                        "--r", "0.25", "--output", Path("cert.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string csv = Slurp(dir_ / "cert.csv");
  EXPECT_THAT(csv, StartsWith("p,cert_lower,cert_upper\n0.1,"));
  EXPECT_THAT(csv, HasSubstr("\n0.9,0.78276092,"));
  EXPECT_THAT(Slurp(dir_ / "certify.config.toml"), HasSubstr("sigma=0.5"));
}

TEST_F(CliTest, CertifyRejectsIncompatiblePair) {
  const Result r = Invoke({"certify", "--p", "0.5", "--scheme", "uniform",
                        "--ball", "l2"});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_THAT(r.err, StartsWith("error: "));
  EXPECT_THAT(r.err, HasSubstr("incompatible"));
}

TEST_F(CliTest, UnknownFlagIsParseError) {
  const Result r = Invoke({"certify", "--p", "0.5", "--bogus", "1"});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_THAT(r.err, StartsWith("error: "));
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST_F(CliTest, HelpExitsZero) {
  const Result r = Invoke({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_THAT(r.out, HasSubstr("compare-intervals"));
}

TEST_F(CliTest, CalibrateWithoutLabelsFails) {
  fs::copy_file(fixture_ / "scores.csv", dir_ / "scores.csv");
  const Result r =
      Invoke({"--out-dir", dir_.string(), "calibrate", "--scores", Path("scores.csv")});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_THAT(r.err, HasSubstr("labels"));
}

TEST_F(CliTest, MissingFileIsIoError) {
  const Result r = Invoke({"--out-dir", dir_.string(), "calibrate", "--scores",
                        Path("absent.csv"), "--labels", Path("absent_labels.csv")});
  EXPECT_EQ(r.code, kExitIo);
  EXPECT_THAT(r.err, StartsWith("error: "));
}

TEST_F(CliTest, CalibrateThenPredict) {
  Result r = Invoke({"--out-dir", dir_.string(), "calibrate", "--scores",
                  (fixture_ / "scores.csv").string(), "--alpha", "0.5",
                  "--eta", "0.01", "--mode", "fixed-tau", "--tau", "0.5",
                  "--r", "0.1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_THAT(r.out, HasSubstr("cert_threshold="));
  ASSERT_TRUE(fs::exists(dir_ / "calibration.json"));
  EXPECT_TRUE(fs::exists(dir_ / "calibrate.config.toml"));
  const auto doc = nlohmann::json::parse(Slurp(dir_ / "calibration.json"));
  EXPECT_EQ(doc["n"], 2);

  r = Invoke({"--out-dir", dir_.string(), "predict", "--calibration",
           Path("calibration.json"), "--scores",
           (fixture_ / "scores.csv").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string csv = Slurp(dir_ / "predictions.csv");
  EXPECT_THAT(csv, StartsWith("point,class,fraction,bound,included\n"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST_F(CliTest, SimulateRequiresSeed) {
  const Result r = Invoke({"--out-dir", dir_.string(), "simulate", "--n", "5"});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_THAT(r.err, HasSubstr("seed"));
}

TEST_F(CliTest, SimulateCalibratePredict) {
  Result r = Invoke({"--out-dir", dir_.string(), "simulate", "--n", "30",
                  "--n-test", "10", "--k", "3", "--m", "20", "--seed", "4",
                  "--format", "bin"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "calibration" / "scores.bin"));
  // Binary tensors carry their labels inline.
  EXPECT_FALSE(fs::exists(dir_ / "calibration" / "labels.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "test" / "scores.bin"));
  EXPECT_THAT(Slurp(dir_ / "laws.csv"), StartsWith("split,point,class,mean\n"));
  EXPECT_TRUE(fs::exists(dir_ / "simulate.config.toml"));

  r = Invoke({"--out-dir", dir_.string(), "calibrate", "--scores",
           (dir_ / "calibration" / "scores.bin").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  r = Invoke({"--out-dir", dir_.string(), "predict", "--calibration",
           Path("calibration.json"), "--scores",
           (dir_ / "test" / "scores.bin").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_THAT(r.out, HasSubstr("points=10"));
}

TEST_F(CliTest, SimulateCsvWritesLabels) {
  const Result r = Invoke({"--out-dir", dir_.string(), "simulate", "--n", "4",
                           "--n-test", "2", "--k", "2", "--m", "3", "--seed",
                           "2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_THAT(Slurp(dir_ / "calibration" / "labels.csv"),
              StartsWith("point,label\n"));
  EXPECT_TRUE(fs::exists(dir_ / "test" / "scores.csv"));
}

TEST_F(CliTest, SmallEvaluate) {
  const Result r = Invoke({"--out-dir", dir_.string(), "evaluate", "--trials", "2",
                        "--n", "20", "--n-test", "10", "--k", "3", "--m", "20",
                        "--seed", "1", "--threads", "1", "--format", "both"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_THAT(r.out, StartsWith("metric,mean,std,min,max,se\ncoverage,"));
  EXPECT_TRUE(fs::exists(dir_ / "report.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "summary.csv"));
  const auto doc = nlohmann::json::parse(Slurp(dir_ / "report.json"));
  EXPECT_EQ(doc["config"]["seed"], 1);
  EXPECT_EQ(doc["trials"].size(), 2u);
  const std::string snapshot = Slurp(dir_ / "evaluate.config.toml");
  EXPECT_THAT(snapshot, HasSubstr("evaluate.seed=1"));
  EXPECT_THAT(snapshot, ::testing::Not(HasSubstr("certify.")));
}

TEST_F(CliTest, EvaluateRejectsBadMode) {
  const Result r = Invoke({"--out-dir", dir_.string(), "evaluate", "--mode",
                        "magic", "--seed", "1"});
  EXPECT_EQ(r.code, kExitValidation);
}

TEST_F(CliTest, ConfigFileSuppliesFlags) {
  {
    std::ofstream toml(dir_ / "run.toml");
    toml << "[certify]\nsigma = 0.5\nr = 0.25\np = [0.9]\n";
  }
  const Result r = Invoke({"--config", Path("run.toml"), "certify"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_THAT(r.out, HasSubstr("0.9,0.78276092,"));
}

TEST_F(CliTest, CompareIntervals) {
  const Result r = Invoke({"--out-dir", dir_.string(), "compare-intervals",
                        "--m-min", "20", "--m-max", "40", "--tau-points", "5"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_THAT(r.out, StartsWith("max_hoeffding_better="));
  const std::string dominance = Slurp(dir_ / "dominance.csv");
  EXPECT_EQ(std::count(dominance.begin(), dominance.end(), '\n'), 1 + 2 * 5);
  EXPECT_TRUE(fs::exists(dir_ / "bounds.csv"));
}

}  // namespace
}  // namespace bincp::cli
