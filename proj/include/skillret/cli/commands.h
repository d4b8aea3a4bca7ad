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


#ifndef SKILLRET_CLI_COMMANDS_H_
#define SKILLRET_CLI_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "skillret/cli/config.h"
#include "skillret/data/trajectory.h"
#include "skillret/env/rollout.h"
#include "skillret/numcore/checkpoint.h"

namespace skillret::cli {

// Progress lines go to `log`; files under `out` are deterministic in
// (config, seed).
struct CommandContext {
  std::filesystem::path out;
  std::ostream* log = nullptr;
  bool force = false;
};

// Play data plus demos for both tasks under ctx.out (prior/,
// target_setting_up/, target_cleaning_up/). Refuses to overwrite existing
// dataset directories unless ctx.force.
void GenData(const ExperimentConfig& config, const CommandContext& ctx);

// Writes skill.ckpt, skill_metrics.jsonl and, if enabled, periodic
// skill_step_*.ckpt files.
void SkillPretrain(const ExperimentConfig& config, const CommandContext& ctx);

// Runs retrieval with the pretrained encoder and writes retrieval.json.
void RetrieveCmd(const ExperimentConfig& config, const CommandContext& ctx);

// Phase-2 training: policy_step_*.ckpt with matching skill_ft_step_*.ckpt,
// policy_metrics.jsonl, retrieval.json and checkpoints.json.
void PolicyTrain(const ExperimentConfig& config, const CommandContext& ctx);

// BC-RNN baseline, or BC-RNN (FT) when `finetune` is set.
void BcTrainCmd(const ExperimentConfig& config, bool finetune, const CommandContext& ctx);

// Evaluates the run in config.paths.run (or the scripted solver when
// `scripted`) and writes eval.json.
env::EvalReport EvalCmd(const ExperimentConfig& config, bool scripted, const CommandContext& ctx);

// Grid over the ablation axes; writes ablation.json and ablation.txt.
nlohmann::json Ablate(const ExperimentConfig& config, const CommandContext& ctx);

// Building blocks shared with the acceptance suite.
TrajectoryDataset LoadPrior(const ExperimentConfig& config);
TrajectoryDataset LoadTarget(const ExperimentConfig& config);

// One saved checkpoint of a training run.
struct RunCheckpoint {
  int step = 0;
  Checkpoint policy;
  std::optional<Checkpoint> skill;  // absent for BC runs
};

// Evaluates every `every`-th checkpoint (always including the last) on the
// configured task.
env::EvalReport EvaluateRun(const std::vector<RunCheckpoint>& run, const ExperimentConfig& config);

// In-memory phase-2 run returning its checkpoints.
std::vector<RunCheckpoint> TrainSkillPolicyRun(const ExperimentConfig& config,
                                               const TrajectoryDataset& prior,
                                               const TrajectoryDataset& target,
                                               const Checkpoint& skill, std::uint64_t seed);
std::vector<RunCheckpoint> TrainBcRun(const ExperimentConfig& config,
                                      const TrajectoryDataset& target,
                                      const TrajectoryDataset* prior, std::uint64_t seed);

}  // namespace skillret::cli

#endif  // SKILLRET_CLI_COMMANDS_H_
