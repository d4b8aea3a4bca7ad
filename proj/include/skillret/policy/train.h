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


#ifndef SKILLRET_POLICY_TRAIN_H_
#define SKILLRET_POLICY_TRAIN_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "skillret/data/trajectory.h"
#include "skillret/numcore/checkpoint.h"
#include "skillret/policy/policy.h"
#include "skillret/retrieval/retrieval.h"
#include "skillret/skill/pretrain.h"

namespace skillret {

struct Phase2Config {
  SkillPolicyConfig policy;  // obs_dim and latent_dim are taken from the skill model
  int batch_size = 16;
  int steps = 0;
  double lr_policy = 1e-3;
  double gamma = 1.0;
  RetrievalOptions retrieval;
  // Skip retrieval altogether; the policy sees target data only.
  bool target_only = false;
  // Fine-tune the skill model alongside the policy, alternating prior and
  // target batches.
  bool finetune = true;
  SkillTrainConfig skill;  // fine-tuning rates, weights, batch and offsets
  int log_interval = 100;
  int checkpoint_interval = 0;

  nlohmann::json ToJson() const;
  static Phase2Config FromJson(const nlohmann::json& j);
};

struct Phase2Metrics {
  int step = 0;
  double policy_target_loss = 0.0;
  double policy_retrieval_loss = 0.0;
  double skill_ft_total = 0.0;
};

struct Phase2Hooks {
  std::function<void(const Phase2Metrics&)> on_metrics;
  // Policy and matching fine-tuned skill checkpoint.
  std::function<void(int step, const Checkpoint& policy, const Checkpoint& skill)> on_checkpoint;
  std::function<void(const RetrievalSet&)> on_retrieval;
  std::function<void(const std::string&)> on_warning;
};

struct Phase2Result {
  Checkpoint policy;
  Checkpoint skill;
  int retrieved = 0;
  int target_examples = 0;
};

// Target policy examples: every window of the (normalized) target stream
// with its mean encoding and F-frame history, dataset id 0.
std::vector<PolicyExample> BuildTargetExamples(const SkillModel& model,
                                               const TrajectoryDataset& target_normalized,
                                               int frames);

// Policy learning with retrieval and skill fine-tuning. Datasets are raw;
// they are normalized with the skill checkpoint's statistics. Retrieval
// runs once with the pretrained encoder and all supervision latents are
// frozen before training starts. Deterministic in `seed`.
Phase2Result TrainPhase2(const Phase2Config& config, const TrajectoryDataset& prior,
                         const TrajectoryDataset& target, const Checkpoint& skill_checkpoint,
                         std::uint64_t seed, const Phase2Hooks& hooks = {});

struct BcConfig {
  BcPolicyConfig policy;
  int batch_size = 16;
  int steps = 0;           // on the target dataset
  int prior_steps = 0;     // pretraining on prior data first (the FT variant)
  double lr = 1e-3;
  int log_interval = 100;
  int checkpoint_interval = 0;

  nlohmann::json ToJson() const;
  static BcConfig FromJson(const nlohmann::json& j);
};

struct BcMetrics {
  int step = 0;
  std::string phase;  // "prior" or "target"
  double loss = 0.0;
};

struct BcHooks {
  std::function<void(const BcMetrics&)> on_metrics;
  std::function<void(int step, const std::string& phase, const Checkpoint&)> on_checkpoint;
};

// Per-step action regression from the F frames ending at o_t. With a prior
// dataset, normalization statistics come from it and prior_steps of
// pretraining precede target training; otherwise from the target set.
Checkpoint BcTrain(const BcConfig& config, const TrajectoryDataset& target,
                   const TrajectoryDataset* prior, std::uint64_t seed,
                   const BcHooks& hooks = {});

// Mean over the batch of per-sample action MSE.
double BcLoss(const BcPolicy& policy, const std::vector<const Matrix*>& stacks,
              const Matrix& actions);

}  // namespace skillret

#endif  // SKILLRET_POLICY_TRAIN_H_
