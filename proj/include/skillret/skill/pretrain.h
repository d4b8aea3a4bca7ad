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

#ifndef SKILLRET_SKILL_PRETRAIN_H_
#define SKILLRET_SKILL_PRETRAIN_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "skillret/data/sampling.h"
#include "skillret/data/trajectory.h"
#include "skillret/numcore/adam.h"
#include "skillret/numcore/checkpoint.h"
#include "skillret/skill/skill_model.h"

namespace skillret {

struct SkillTrainConfig {
  int batch_size = 16;
  int steps = 0;
  double lr_vae = 5e-4;
  double lr_tp = 1e-4;
  SkillLossWeights weights;
  int max_offset = 50;
  int log_interval = 100;
  int checkpoint_interval = 0;  // 0 disables periodic checkpoints

  nlohmann::json ToJson() const;
  static SkillTrainConfig FromJson(const nlohmann::json& j);
};

// One optimization step of the combined skill objective: VAE parts at one
// learning rate, the temporal prediction head at another.
class SkillTrainer {
 public:
  SkillTrainer(SkillModel& model, const SkillTrainConfig& config);

  // Draws batch_size temporal pairs and matching reparameterization noise.
  SkillBatch SampleBatch(const SampleStream& stream, const TrajectoryDataset& dataset,
                         Rng& sample_rng, Rng& noise_rng) const;

  // Throws TrainingError on a non-finite loss or gradient; parameters are
  // untouched in that case.
  SkillLossBreakdown Step(const SkillBatch& batch);

  SkillModel& model() { return model_; }

 private:
  SkillModel& model_;
  SkillTrainConfig config_;
  Adam vae_opt_;
  Adam tp_opt_;
};

Checkpoint MakeSkillCheckpoint(const SkillModel& model, const Normalizer& normalizer,
                               nlohmann::json meta = nlohmann::json::object());

struct LoadedSkill {
  std::unique_ptr<SkillModel> model;
  Normalizer normalizer;
  nlohmann::json meta;
};
// Rebuilds the model from the architecture stored in the checkpoint. Throws
// FormatError if the checkpoint is not a skill checkpoint.
LoadedSkill LoadSkillCheckpoint(const Checkpoint& ckpt);

struct SkillMetricsEvent {
  int step = 0;
  SkillLossBreakdown loss;
};

struct PretrainHooks {
  std::function<void(const SkillMetricsEvent&)> on_metrics;
  std::function<void(int step, const Checkpoint&)> on_checkpoint;
};

struct PretrainResult {
  Checkpoint checkpoint;  // final, or last good one on divergence
  int steps_completed = 0;
  bool diverged = false;
  std::string error;
};

// Skill pretraining on the prior dataset. The normalizer is fitted on that
// dataset and stored in every checkpoint. Deterministic in `seed`.
PretrainResult Pretrain(const SkillModelConfig& model_config, const SkillTrainConfig& config,
                        const TrajectoryDataset& prior, std::uint64_t seed,
                        const PretrainHooks& hooks = {});

// Held-out quality of a trained model on a normalized dataset.
struct SkillEvaluation {
  double recon_mse = 0.0;    // decoding with the encoder mean
  double tp_mae = 0.0;
  double tp_baseline_mae = 0.0;  // mean |offset|, the constant-zero predictor
};
SkillEvaluation EvaluateSkillModel(const SkillModel& model, const TrajectoryDataset& normalized,
                                   int num_pairs, int max_offset, std::uint64_t seed);

}  // namespace skillret

#endif  // SKILLRET_SKILL_PRETRAIN_H_
