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


#include "skillret/policy/train.h"

#include <optional>

#include "skillret/data/sampling.h"
#include "skillret/errors.h"
#include "skillret/numcore/adam.h"

namespace skillret {
namespace {

void CheckFiniteGrads(const ParamSet& params, const char* what) {
  for (std::size_t i = 0; i < params.num_tensors(); ++i) {
    if (!params.tensor(i).grad.allFinite()) {
      throw TrainingError(std::string("non-finite gradient in ") + what + " tensor " +
                          params.tensor(i).name);
    }
  }
}

struct ExampleBatch {
  FrameBatch frames;
  Matrix z;
};

ExampleBatch DrawExamples(const std::vector<PolicyExample>& examples, int batch, Rng& rng) {
  std::vector<const Matrix*> stacks;
  stacks.reserve(batch);
  Matrix z(batch, examples[0].z.size());
  const auto last = static_cast<std::int64_t>(examples.size()) - 1;
  for (int i = 0; i < batch; ++i) {
    const PolicyExample& e = examples[static_cast<std::size_t>(rng.UniformInt(0, last))];
    stacks.push_back(&e.frame_stack);
    z.row(i) = e.z.transpose();
  }
  return {FrameBatch::FromStacks(stacks), std::move(z)};
}

}  // namespace

nlohmann::json Phase2Config::ToJson() const {
  return {{"policy", policy.ToJson()},
          {"batch_size", batch_size},
          {"steps", steps},
          {"lr_policy", lr_policy},
          {"gamma", gamma},
          {"retrieval",
           {{"mode", RetrievalModeName(retrieval.mode)},
            {"fraction", retrieval.fraction},
            {"num_prior", retrieval.num_prior},
            {"num_target", retrieval.num_target}}},
          {"target_only", target_only},
          {"finetune", finetune},
          {"skill", skill.ToJson()},
          {"log_interval", log_interval},
          {"checkpoint_interval", checkpoint_interval}};
}

Phase2Config Phase2Config::FromJson(const nlohmann::json& j) {
  Phase2Config c;
  try {
    c.policy = SkillPolicyConfig::FromJson(j.at("policy"));
    c.batch_size = j.at("batch_size").get<int>();
    c.steps = j.at("steps").get<int>();
    c.lr_policy = j.at("lr_policy").get<double>();
    c.gamma = j.at("gamma").get<double>();
    const auto& r = j.at("retrieval");
    c.retrieval.mode = ParseRetrievalMode(r.at("mode").get<std::string>());
    c.retrieval.fraction = r.at("fraction").get<double>();
    c.retrieval.num_prior = r.at("num_prior").get<int>();
    c.retrieval.num_target = r.at("num_target").get<int>();
    c.target_only = j.at("target_only").get<bool>();
    c.finetune = j.at("finetune").get<bool>();
    c.skill = SkillTrainConfig::FromJson(j.at("skill"));
    c.log_interval = j.at("log_interval").get<int>();
    c.checkpoint_interval = j.at("checkpoint_interval").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed phase-2 config: ") + e.what());
  }
  return c;
}

std::vector<PolicyExample> BuildTargetExamples(const SkillModel& model,
                                               const TrajectoryDataset& target_normalized,
                                               int frames) {
  const int horizon = model.config().horizon;
  const SampleStream stream(target_normalized, horizon);
  std::vector<PolicyExample> out;
  out.reserve(static_cast<std::size_t>(stream.size()));
  constexpr std::int64_t kChunk = 256;
  for (std::int64_t begin = 0; begin < stream.size(); begin += kChunk) {
    const std::int64_t end = std::min(stream.size(), begin + kChunk);
    std::vector<SubTrajectorySample> windows;
    for (std::int64_t p = begin; p < end; ++p) {
      windows.push_back(ExtractSample(target_normalized, stream.At(p), horizon, frames));
    }
    std::vector<const SubTrajectorySample*> ptrs;
    for (const auto& w : windows) ptrs.push_back(&w);
    const auto qs = model.EncodeAll(ptrs);
    for (std::size_t i = 0; i < windows.size(); ++i) {
      out.push_back({std::move(windows[i].frame_stack), qs[i].mean, 0, windows[i].source});
    }
  }
  return out;
}

Phase2Result TrainPhase2(const Phase2Config& config, const TrajectoryDataset& prior,
                         const TrajectoryDataset& target, const Checkpoint& skill_checkpoint,
                         std::uint64_t seed, const Phase2Hooks& hooks) {
  if (config.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (config.gamma < 0.0) throw ConfigError("gamma must be >= 0");
  target.Validate();
  LoadedSkill skill = LoadSkillCheckpoint(skill_checkpoint);
  SkillModel& model = *skill.model;
  const SkillModelConfig& mc = model.config();
  const bool use_prior = !config.target_only || config.finetune;
  if (use_prior) prior.Validate();
  if (target.obs_dim != mc.obs_dim || target.act_dim != mc.act_dim ||
      (use_prior && (prior.obs_dim != mc.obs_dim || prior.act_dim != mc.act_dim))) {
    throw ConfigError("dataset dimensions do not match the skill checkpoint");
  }
  const TrajectoryDataset target_n = skill.normalizer.Apply(target);
  const TrajectoryDataset prior_n = use_prior ? skill.normalizer.Apply(prior) : TrajectoryDataset{};

  SkillPolicyConfig pc = config.policy;
  pc.obs_dim = mc.obs_dim;
  pc.latent_dim = mc.latent_dim;

  // Supervision is fixed here, before any fine-tuning step.
  const std::vector<PolicyExample> target_examples =
      BuildTargetExamples(model, target_n, pc.frames);
  if (target_examples.empty()) throw UsageError("target dataset has no usable windows");
  std::vector<PolicyExample> retrieved;
  if (!config.target_only) {
    Rng retrieval_rng = Rng::ForStream(seed, "phase2/retrieval");
    const RetrievalSet set = Retrieve(model, prior_n, target_n, config.retrieval, retrieval_rng);
    if (hooks.on_retrieval) hooks.on_retrieval(set);
    retrieved = BuildRetrievalDataset(prior_n, set, pc.frames);
    if (retrieved.empty() && config.retrieval.mode != RetrievalMode::kNone && hooks.on_warning) {
      hooks.on_warning("retrieval set is empty; training on target data only");
    }
  }

  SkillPolicy policy(pc);
  Rng init_rng = Rng::ForStream(seed, "phase2/init");
  policy.Initialize(init_rng);
  Adam policy_opt(AllTensors(policy.params()), AdamOptions{.lr = config.lr_policy});
  Rng target_rng = Rng::ForStream(seed, "phase2/target");
  Rng retrieved_rng = Rng::ForStream(seed, "phase2/retrieved");

  SkillTrainer finetuner(model, config.skill);
  std::optional<SampleStream> prior_stream;
  std::optional<SampleStream> target_stream;
  if (config.finetune) {
    prior_stream.emplace(prior_n, mc.horizon);
    target_stream.emplace(target_n, mc.horizon);
  }
  Rng ft_prior_rng = Rng::ForStream(seed, "phase2/ft_prior");
  Rng ft_target_rng = Rng::ForStream(seed, "phase2/ft_target");
  Rng ft_noise_rng = Rng::ForStream(seed, "phase2/ft_noise");

  auto make_checkpoints = [&](int step) {
    nlohmann::json meta = {{"step", step},
                           {"skill_fingerprint", model.config().Fingerprint()},
                           {"horizon", mc.horizon}};
    return std::pair{MakePolicyCheckpoint(policy, skill.normalizer, meta),
                     MakeSkillCheckpoint(model, skill.normalizer,
                                         {{"step", step}, {"finetuned", config.finetune}})};
  };

  for (int step = 1; step <= config.steps; ++step) {
    Phase2Metrics m;
    m.step = step;
    {
      const ExampleBatch tb = DrawExamples(target_examples, config.batch_size, target_rng);
      policy.params().ZeroGrad();
      Tape tape;
      const Var z_hat = policy.Forward(tape, tb.frames, std::vector<int>(config.batch_size, 0));
      const Var z = tape.Constant(tb.z);
      Var z_hat_r;
      Var z_r;
      if (!retrieved.empty()) {
        const ExampleBatch rb = DrawExamples(retrieved, config.batch_size, retrieved_rng);
        z_hat_r = policy.Forward(tape, rb.frames, std::vector<int>(config.batch_size, 1));
        z_r = tape.Constant(rb.z);
        m.policy_retrieval_loss = (z_hat_r.value() - rb.z).array().square().mean();
      }
      m.policy_target_loss = (z_hat.value() - tb.z).array().square().mean();
      tape.Backward(PolicyLoss(z_hat, z, z_hat_r, z_r, config.gamma));
      CheckFiniteGrads(policy.params(), "policy");
      policy_opt.Step();
    }
    if (config.finetune) {
      // Odd steps use prior data, even steps target data.
      const bool on_prior = step % 2 == 1;
      const SkillBatch batch =
          on_prior ? finetuner.SampleBatch(*prior_stream, prior_n, ft_prior_rng, ft_noise_rng)
                   : finetuner.SampleBatch(*target_stream, target_n, ft_target_rng, ft_noise_rng);
      m.skill_ft_total = finetuner.Step(batch).total;
    }
    if (hooks.on_metrics && config.log_interval > 0 && step % config.log_interval == 0) {
      hooks.on_metrics(m);
    }
    if (hooks.on_checkpoint && config.checkpoint_interval > 0 &&
        step % config.checkpoint_interval == 0) {
      const auto [p, s] = make_checkpoints(step);
      hooks.on_checkpoint(step, p, s);
    }
  }
  Phase2Result result;
  auto [p, s] = make_checkpoints(config.steps);
  result.policy = std::move(p);
  result.skill = std::move(s);
  result.retrieved = static_cast<int>(retrieved.size());
  result.target_examples = static_cast<int>(target_examples.size());
  return result;
}

nlohmann::json BcConfig::ToJson() const {
  return {{"policy", policy.ToJson()},     {"batch_size", batch_size},
          {"steps", steps},                {"prior_steps", prior_steps},
          {"lr", lr},                      {"log_interval", log_interval},
          {"checkpoint_interval", checkpoint_interval}};
}

BcConfig BcConfig::FromJson(const nlohmann::json& j) {
  BcConfig c;
  try {
    c.policy = BcPolicyConfig::FromJson(j.at("policy"));
    c.batch_size = j.at("batch_size").get<int>();
    c.steps = j.at("steps").get<int>();
    c.prior_steps = j.at("prior_steps").get<int>();
    c.lr = j.at("lr").get<double>();
    c.log_interval = j.at("log_interval").get<int>();
    c.checkpoint_interval = j.at("checkpoint_interval").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed BC config: ") + e.what());
  }
  return c;
}

double BcLoss(const BcPolicy& policy, const std::vector<const Matrix*>& stacks,
              const Matrix& actions) {
  Tape tape;
  const Var pred = policy.Forward(tape, FrameBatch::FromStacks(stacks));
  return Mean(Square(pred - tape.Constant(actions))).value()(0, 0);
}

Checkpoint BcTrain(const BcConfig& config, const TrajectoryDataset& target,
                   const TrajectoryDataset* prior, std::uint64_t seed, const BcHooks& hooks) {
  if (config.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  target.Validate();
  if (prior != nullptr) prior->Validate();
  BcPolicyConfig pc = config.policy;
  pc.obs_dim = target.obs_dim;
  pc.act_dim = target.act_dim;
  const Normalizer normalizer = Normalizer::Fit(prior != nullptr ? *prior : target);

  BcPolicy policy(pc);
  Rng init_rng = Rng::ForStream(seed, "bc/init");
  policy.Initialize(init_rng);
  Adam opt(AllTensors(policy.params()), AdamOptions{.lr = config.lr});

  auto meta = [&](const std::string& phase, int step) {
    return nlohmann::json{{"phase", phase}, {"step", step}, {"prior_steps", config.prior_steps}};
  };
  auto run = [&](const TrajectoryDataset& raw, int steps, const std::string& phase) {
    if (steps <= 0) return;
    const TrajectoryDataset data = normalizer.Apply(raw);
    const SampleStream stream(data, 1);
    Rng rng = Rng::ForStream(seed, "bc/" + phase);
    for (int step = 1; step <= steps; ++step) {
      std::vector<SubTrajectorySample> samples;
      samples.reserve(config.batch_size);
      for (int i = 0; i < config.batch_size; ++i) {
        samples.push_back(ExtractSample(data, stream.Draw(rng), 1, pc.frames));
      }
      std::vector<const Matrix*> stacks;
      Matrix actions(config.batch_size, pc.act_dim);
      for (int i = 0; i < config.batch_size; ++i) {
        stacks.push_back(&samples[i].frame_stack);
        actions.row(i) = samples[i].window_actions.row(0);
      }
      policy.params().ZeroGrad();
      Tape tape;
      const Var pred = policy.Forward(tape, FrameBatch::FromStacks(stacks));
      const Var loss = Mean(Square(pred - tape.Constant(actions)));
      tape.Backward(loss);
      CheckFiniteGrads(policy.params(), "bc");
      opt.Step();
      if (hooks.on_metrics && config.log_interval > 0 && step % config.log_interval == 0) {
        hooks.on_metrics({step, phase, loss.value()(0, 0)});
      }
      if (hooks.on_checkpoint && config.checkpoint_interval > 0 &&
          step % config.checkpoint_interval == 0) {
        hooks.on_checkpoint(step, phase, MakeBcCheckpoint(policy, normalizer, meta(phase, step)));
      }
    }
  };
  if (prior != nullptr) run(*prior, config.prior_steps, "prior");
  run(target, config.steps, "target");
  return MakeBcCheckpoint(policy, normalizer, meta("target", config.steps));
}

}  // namespace skillret
