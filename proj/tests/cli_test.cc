// Copyright 2026 The skillret Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;

const char kTinyConfig[] = R"({
  "data": {"play_trajectories": 4, "play_steps": 200, "demos_per_task": 3, "target_demos": 2},
  "skill_model": {"latent_dim": 4, "rnn_hidden": 8, "mlp_hidden": [8], "prior_hidden": [8],
                  "tp_hidden": [8]},
  "skill_train": {"steps": 20, "log_interval": 5, "batch_size": 4},
  "phase2": {"steps": 10, "checkpoint_interval": 5, "log_interval": 5, "batch_size": 4,
             "policy": {"rnn_hidden": 8},
             "retrieval": {"num_prior": 200, "num_target": 20}},
  "bc": {"steps": 6, "prior_steps": 6, "checkpoint_interval": 3, "batch_size": 4,
         "policy": {"rnn_hidden": 8}},
  "eval": {"episodes": 2, "every": 1}
})";

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const char* cli = std::getenv("SKILLRET_CLI");
    ASSERT_NE(cli, nullptr) << "SKILLRET_CLI must name the skillret binary";
    cli_ = cli;
    root_ = fs::temp_directory_path() / ("skillret_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(root_);
    fs::create_directories(root_);
    std::ofstream(root_ / "tiny.json") << kTinyConfig;
    ASSERT_EQ(Run("gen-data", "--out " + Path("data")), 0);
    ASSERT_EQ(Run("skill-pretrain", "--data " + Path("data") + " --out " + Path("skill")), 0);
  }
  static void TearDownTestSuite() { fs::remove_all(root_); }

  static std::string Path(const std::string& name) { return (root_ / name).string(); }

  static int Run(const std::string& command, const std::string& args, std::uint64_t seed = 1) {
    const std::string line = cli_ + " " + command + " --config " + Path("tiny.json") +
                             " --seed " + std::to_string(seed) + " " + args + " >" +
                             Path("last.log") + " 2>&1";
    const int status = std::system(line.c_str());
    return status == 0 ? 0 : 1;
  }

  static std::string TrainArgs(const std::string& out) {
    return "--data " + Path("data") + " --skill " + Path("skill/skill.ckpt") + " --out " + Path(out);
  }

  static inline std::string cli_;
  static inline fs::path root_;
};

TEST_F(CliTest, GenDataRefusesToOverwrite) {
  EXPECT_NE(Run("gen-data", "--out " + Path("data")), 0);
  EXPECT_NE(ReadFile(Path("last.log")).find("--force"), std::string::npos);
}

TEST_F(CliTest, GenDataIsDeterministic) {
  ASSERT_EQ(Run("gen-data", "--out " + Path("data2")), 0);
  for (const char* f : {"gen_report.json", "prior/manifest.json", "target_setting_up/traj_000000.bin"}) {
    EXPECT_EQ(ReadFile(root_ / "data" / f), ReadFile(root_ / "data2" / f)) << f;
  }
  ASSERT_EQ(Run("gen-data", "--force --out " + Path("data2"), 2), 0);
  EXPECT_NE(ReadFile(root_ / "data" / "gen_report.json"),
            ReadFile(root_ / "data2" / "gen_report.json"));
}

TEST_F(CliTest, PretrainIsDeterministicAndLogsEveryInterval) {
  ASSERT_EQ(Run("skill-pretrain", "--data " + Path("data") + " --out " + Path("skill2")), 0);
  EXPECT_EQ(ReadFile(root_ / "skill" / "skill.ckpt"), ReadFile(root_ / "skill2" / "skill.ckpt"));
  std::istringstream metrics(ReadFile(root_ / "skill" / "skill_metrics.jsonl"));
  int lines = 0;
  for (std::string line; std::getline(metrics, line); ++lines) {
    EXPECT_TRUE(nlohmann::json::parse(line).contains("recon"));
  }
  EXPECT_EQ(lines, 20 / 5);
}

TEST_F(CliTest, ConfigRoundTrips) {
  const auto written = nlohmann::json::parse(ReadFile(root_ / "skill" / "config.json"));
  std::ofstream(root_ / "echo.json") << written.at("config").dump();
  const std::string line = cli_ + " skill-pretrain --config " + Path("echo.json") +
                           " --seed 1 --data " + Path("data") + " --out " + Path("skill3") +
                           " >/dev/null 2>&1";
  ASSERT_EQ(std::system(line.c_str()), 0);
  EXPECT_EQ(ReadFile(root_ / "skill" / "config.json"), ReadFile(root_ / "skill3" / "config.json"));
  EXPECT_EQ(ReadFile(root_ / "skill" / "skill.ckpt"), ReadFile(root_ / "skill3" / "skill.ckpt"));
}

TEST_F(CliTest, PolicyTrainAndEvalAreDeterministic) {
  ASSERT_EQ(Run("policy-train", TrainArgs("pol_a")), 0);
  ASSERT_EQ(Run("policy-train", TrainArgs("pol_b")), 0);
  for (const char* f : {"policy.ckpt", "skill_ft.ckpt", "retrieval.json", "checkpoints.json"}) {
    EXPECT_EQ(ReadFile(root_ / "pol_a" / f), ReadFile(root_ / "pol_b" / f)) << f;
  }
  ASSERT_EQ(Run("eval", "--run " + Path("pol_a") + " --out " + Path("eval_a")), 0);
  ASSERT_EQ(Run("eval", "--run " + Path("pol_a") + " --out " + Path("eval_b")), 0);
  EXPECT_EQ(ReadFile(root_ / "eval_a" / "eval.json"), ReadFile(root_ / "eval_b" / "eval.json"));
  const auto report = nlohmann::json::parse(ReadFile(root_ / "eval_a" / "eval.json"));
  EXPECT_EQ(report.at("schema_version"), 1);
  EXPECT_EQ(report.at("rates").size(), 2u);
}

TEST_F(CliTest, RetrieveWritesRankedReport) {
  ASSERT_EQ(Run("retrieve", TrainArgs("ret") + " --retrieval-mode kl --retrieval-frac 0.5"), 0);
  const auto report = nlohmann::json::parse(ReadFile(root_ / "ret" / "retrieval.json"));
  EXPECT_EQ(report.at("schema_version"), 1);
}

TEST_F(CliTest, BcTrainAndEval) {
  ASSERT_EQ(Run("bc-train", "--ft " + TrainArgs("bc")), 0);
  ASSERT_EQ(Run("eval", "--run " + Path("bc") + " --out " + Path("eval_bc")), 0);
}

TEST_F(CliTest, EvalRefusesMismatchedFingerprint) {
  ASSERT_EQ(Run("policy-train", TrainArgs("pol_fp")), 0);
  auto wide = nlohmann::json::parse(kTinyConfig);
  wide["phase2"]["policy"]["rnn_hidden"] = 9;
  std::ofstream(root_ / "wide.json") << wide.dump();
  const std::string line = cli_ + " eval --config " + Path("wide.json") + " --run " +
                           Path("pol_fp") + " --out " + Path("eval_fp") + " >" +
                           Path("last.log") + " 2>&1";
  EXPECT_NE(std::system(line.c_str()), 0);
  EXPECT_NE(ReadFile(Path("last.log")).find("refusing"), std::string::npos);
}

TEST_F(CliTest, ScriptedEvalSucceedsEverywhere) {
  for (const char* task : {"setting_up", "cleaning_up"}) {
    ASSERT_EQ(Run("eval", std::string("--scripted --task ") + task + " --out " + Path("scripted")), 0);
    const auto report = nlohmann::json::parse(ReadFile(root_ / "scripted" / "eval.json"));
    EXPECT_EQ(report.at("best"), 1.0) << task;
  }
}

TEST_F(CliTest, UnknownPresetIsRejected) {
  EXPECT_NE(Run("gen-data", "--preset tiny --out " + Path("nope")), 0);
}

}  // namespace
