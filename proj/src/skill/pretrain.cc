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

#include "skillret/skill/pretrain.h"

#include <cmath>

#include "skillret/errors.h"

namespace skillret {

nlohmann::json SkillTrainConfig::ToJson() const {
  return {{"batch_size", batch_size},
          {"steps", steps},
          {"lr_vae", lr_vae},
          {"lr_tp", lr_tp},
          {"beta", weights.beta},
          {"alpha", weights.alpha},
          {"kl_reduction", weights.kl_reduction == KlReduction::kSum ? "sum" : "mean"},
          {"max_offset", max_offset},
          {"log_interval", log_interval},
          {"checkpoint_interval", checkpoint_interval}};
}

SkillTrainConfig SkillTrainConfig::FromJson(const nlohmann::json& j) {
  SkillTrainConfig c;
  try {
    c.batch_size = j.at("batch_size").get<int>();
    c.steps = j.at("steps").get<int>();
    c.lr_vae = j.at("lr_vae").get<double>();
    c.lr_tp = j.at("lr_tp").get<double>();
    c.weights.beta = j.at("beta").get<double>();
    c.weights.alpha = j.at("alpha").get<double>();
    const std::string reduction = j.at("kl_reduction").get<std::string>();
    if (reduction != "sum" && reduction != "mean") {
      throw FormatError("kl_reduction must be sum or mean");
    }
    c.weights.kl_reduction = reduction == "sum" ? KlReduction::kSum : KlReduction::kMean;
    c.max_offset = j.at("max_offset").get<int>();
    c.log_interval = j.at("log_interval").get<int>();
    c.checkpoint_interval = j.at("checkpoint_interval").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed skill training config: ") + e.what());
  }
  return c;
}

SkillTrainer::SkillTrainer(SkillModel& model, const SkillTrainConfig& config)
    : model_(model),
      config_(config),
      vae_opt_(model.VaeTensors(), AdamOptions{.lr = config.lr_vae}),
      tp_opt_(model.TpTensors(), AdamOptions{.lr = config.lr_tp}) {
  if (config.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (config.max_offset < 1) throw ConfigError("max_offset must be >= 1");
}

SkillBatch SkillTrainer::SampleBatch(const SampleStream& stream, const TrajectoryDataset& dataset,
                                     Rng& sample_rng, Rng& noise_rng) const {
  std::vector<TemporalPair> pairs;
  pairs.reserve(config_.batch_size);
  for (int i = 0; i < config_.batch_size; ++i) {
    pairs.push_back(SampleTemporalPair(stream, dataset, model_.config().horizon,
                                       config_.max_offset, sample_rng));
  }
  return SkillBatch::FromPairs(pairs,
                               noise_rng.NormalMatrix(config_.batch_size, model_.config().latent_dim));
}

SkillLossBreakdown SkillTrainer::Step(const SkillBatch& batch) {
  model_.params().ZeroGrad();
  Tape tape;
  const auto loss = model_.Loss(tape, batch, config_.weights);
  tape.Backward(loss.total);
  for (std::size_t i = 0; i < model_.params().num_tensors(); ++i) {
    const ParamTensor& t = model_.params().tensor(i);
    if (!t.grad.allFinite()) {
      throw TrainingError("non-finite gradient in " + t.name + " (loss " +
                          std::to_string(loss.values.total) + ")");
    }
  }
  vae_opt_.Step();
  tp_opt_.Step();
  return loss.values;
}

Checkpoint MakeSkillCheckpoint(const SkillModel& model, const Normalizer& normalizer,
                               nlohmann::json meta) {
  Checkpoint ckpt = CaptureCheckpoint(model.params());
  ckpt.fingerprint = model.config().Fingerprint();
  ckpt.normalizer = normalizer.ToJson();
  meta["kind"] = "skill";
  meta["model"] = model.config().ToJson();
  ckpt.meta = std::move(meta);
  return ckpt;
}

LoadedSkill LoadSkillCheckpoint(const Checkpoint& ckpt) {
  if (!ckpt.meta.is_object() || ckpt.meta.value("kind", "") != "skill") {
    throw FormatError("not a skill checkpoint");
  }
  LoadedSkill out;
  const SkillModelConfig config = SkillModelConfig::FromJson(ckpt.meta.at("model"));
  if (config.Fingerprint() != ckpt.fingerprint) {
    throw FormatError("skill checkpoint fingerprint does not match its stored architecture");
  }
  out.model = std::make_unique<SkillModel>(config);
  RestoreCheckpoint(ckpt, out.model->params());
  out.normalizer = Normalizer::FromJson(ckpt.normalizer);
  out.meta = ckpt.meta;
  return out;
}

PretrainResult Pretrain(const SkillModelConfig& model_config, const SkillTrainConfig& config,
                        const TrajectoryDataset& prior, std::uint64_t seed,
                        const PretrainHooks& hooks) {
  prior.Validate();
  if (prior.role != DatasetRole::kPrior) throw UsageError("pretraining expects a prior dataset");
  if (prior.obs_dim != model_config.obs_dim || prior.act_dim != model_config.act_dim) {
    throw ConfigError("skill model dimensions do not match the prior dataset");
  }
  const Normalizer normalizer = Normalizer::Fit(prior);
  const TrajectoryDataset data = normalizer.Apply(prior);

  SkillModel model(model_config);
  Rng init_rng = Rng::ForStream(seed, "skill/init");
  model.Initialize(init_rng);
  SkillTrainer trainer(model, config);
  const SampleStream stream(data, model_config.horizon);
  Rng sample_rng = Rng::ForStream(seed, "skill/sample");
  Rng noise_rng = Rng::ForStream(seed, "skill/noise");

  PretrainResult result;
  for (int step = 1; step <= config.steps; ++step) {
    const SkillBatch batch = trainer.SampleBatch(stream, data, sample_rng, noise_rng);
    SkillLossBreakdown loss;
    try {
      loss = trainer.Step(batch);
    } catch (const TrainingError& e) {
      result.diverged = true;
      result.error = "step " + std::to_string(step) + ": " + e.what();
      result.steps_completed = step - 1;
      result.checkpoint = MakeSkillCheckpoint(model, normalizer, {{"step", step - 1}});
      return result;
    }
    if (hooks.on_metrics && config.log_interval > 0 && step % config.log_interval == 0) {
      hooks.on_metrics({step, loss});
    }
    if (hooks.on_checkpoint && config.checkpoint_interval > 0 &&
        step % config.checkpoint_interval == 0) {
      hooks.on_checkpoint(step, MakeSkillCheckpoint(model, normalizer, {{"step", step}}));
    }
  }
  result.steps_completed = config.steps;
  result.checkpoint = MakeSkillCheckpoint(model, normalizer, {{"step", config.steps}});
  return result;
}

SkillEvaluation EvaluateSkillModel(const SkillModel& model, const TrajectoryDataset& normalized,
                                   int num_pairs, int max_offset, std::uint64_t seed) {
  if (num_pairs < 1) throw UsageError("need at least one evaluation pair");
  const int horizon = model.config().horizon;
  const SampleStream stream(normalized, horizon);
  Rng rng(seed);
  std::vector<TemporalPair> pairs;
  pairs.reserve(num_pairs);
  for (int i = 0; i < num_pairs; ++i) {
    pairs.push_back(SampleTemporalPair(stream, normalized, horizon, max_offset, rng));
  }

  SkillEvaluation eval;
  double sq_sum = 0.0;
  double count = 0.0;
  constexpr std::size_t kChunk = 256;
  for (std::size_t begin = 0; begin < pairs.size(); begin += kChunk) {
    const std::size_t end = std::min(pairs.size(), begin + kChunk);
    std::vector<const SubTrajectorySample*> first;
    std::vector<const SubTrajectorySample*> second;
    for (std::size_t i = begin; i < end; ++i) {
      first.push_back(&pairs[i].first);
      second.push_back(&pairs[i].second);
    }
    const WindowBatch a = WindowBatch::FromSamples(first);
    const WindowBatch b = WindowBatch::FromSamples(second);
    Tape tape;
    const GaussianVar qa = model.Encode(tape, a);
    const GaussianVar qb = model.Encode(tape, b);
    const auto actions = model.DecodeWindow(tape, qa.mean, a);
    for (std::size_t t = 0; t < actions.size(); ++t) {
      sq_sum += (actions[t].value() - a.actions[t]).squaredNorm();
      count += static_cast<double>(a.actions[t].size());
    }
    const Matrix predicted = model.PredictOffset(tape, qa.mean, qb.mean).value();
    for (std::size_t i = begin; i < end; ++i) {
      const double d = pairs[i].offset;
      eval.tp_mae += std::abs(predicted(static_cast<Eigen::Index>(i - begin), 0) - d);
      eval.tp_baseline_mae += std::abs(d);
    }
  }
  eval.recon_mse = sq_sum / count;
  eval.tp_mae /= num_pairs;
  eval.tp_baseline_mae /= num_pairs;
  return eval;
}

}  // namespace skillret
