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


#ifndef SKILLRET_CLI_CONFIG_H_
#define SKILLRET_CLI_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "skillret/policy/train.h"
#include "skillret/skill/pretrain.h"

namespace skillret::cli {

struct DataConfig {
  std::string dir = "data";  // gen-data output; other paths default into it
  int play_trajectories = 200;
  int play_steps = 1000;
  int demos_per_task = 30;
  int target_demos = 10;       // demos used for training out of the generated set
  double prior_fraction = 1.0;  // leading fraction of play trajectories used
};

struct PathConfig {
  std::string prior;             // default <data.dir>/prior
  std::string target;            // default <data.dir>/target_<task>
  std::string skill_checkpoint;  // default <out>/skill.ckpt of a pretraining run
  std::string run;               // training run evaluated by eval
};

struct EvalConfig {
  int episodes = 50;
  int every = 1;  // evaluate every k-th saved checkpoint (the last is always included)
  std::uint64_t seed = 1234;
};

struct AblateConfig {
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::vector<bool> no_tp{false};
  std::vector<std::string> retrieval_modes{"l2"};
  std::vector<double> retrieval_fractions{0.1};
  std::vector<double> gammas{1.0};
  std::vector<bool> no_prior{false};
  std::vector<double> prior_fractions{1.0};
  bool include_bc = false;
};

struct ExperimentConfig {
  std::string preset = "desk";
  std::uint64_t seed = 0;
  std::string task = "setting_up";
  DataConfig data;
  PathConfig paths;
  SkillModelConfig skill_model;
  SkillTrainConfig skill_train;
  Phase2Config phase2;
  BcConfig bc;
  EvalConfig eval;
  AblateConfig ablate;

  nlohmann::json ToJson() const;
  // Every key is required; use LoadConfig to overlay a partial file on a
  // preset.
  static ExperimentConfig FromJson(const nlohmann::json& j);
  // Throws ConfigError naming the first invalid value.
  void Validate() const;
  // Content hash of the full effective configuration.
  std::string Fingerprint() const;

  std::filesystem::path PriorPath() const;
  std::filesystem::path TargetPath() const;
};

// "desk" (CPU-sized) or "paper" (published widths and sample counts).
ExperimentConfig Preset(const std::string& name);

// Starts from the preset (the file's "preset" key unless one is given),
// then merges the file's keys over it. An empty path yields the preset.
ExperimentConfig LoadConfig(const std::filesystem::path& path, const std::string& preset = "");

}  // namespace skillret::cli

#endif  // SKILLRET_CLI_CONFIG_H_
