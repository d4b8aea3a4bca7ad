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


#include "skillret/cli/config.h"

#include <cstdio>
#include <fstream>

#include "skillret/env/room.h"
#include "skillret/errors.h"
#include "skillret/numcore/rng.h"

namespace skillret::cli {
namespace {

void RejectUnknownKeys(const nlohmann::json& file, const nlohmann::json& known,
                       const std::string& prefix) {
  if (!file.is_object() || !known.is_object()) return;
  for (const auto& [key, value] : file.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!known.contains(key)) throw ConfigError("unknown config key '" + path + "'");
    RejectUnknownKeys(value, known.at(key), path);
  }
}

void Require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid config: " + what);
}

}  // namespace

nlohmann::json ExperimentConfig::ToJson() const {
  return {
      {"preset", preset},
      {"seed", seed},
      {"task", task},
      {"data",
       {{"dir", data.dir},
        {"play_trajectories", data.play_trajectories},
        {"play_steps", data.play_steps},
        {"demos_per_task", data.demos_per_task},
        {"target_demos", data.target_demos},
        {"prior_fraction", data.prior_fraction}}},
      {"paths",
       {{"prior", paths.prior},
        {"target", paths.target},
        {"skill_checkpoint", paths.skill_checkpoint},
        {"run", paths.run}}},
      {"skill_model", skill_model.ToJson()},
      {"skill_train", skill_train.ToJson()},
      {"phase2", phase2.ToJson()},
      {"bc", bc.ToJson()},
      {"eval", {{"episodes", eval.episodes}, {"every", eval.every}, {"seed", eval.seed}}},
      {"ablate",
       {{"seeds", ablate.seeds},
        {"no_tp", ablate.no_tp},
        {"retrieval_modes", ablate.retrieval_modes},
        {"retrieval_fractions", ablate.retrieval_fractions},
        {"gammas", ablate.gammas},
        {"no_prior", ablate.no_prior},
        {"prior_fractions", ablate.prior_fractions},
        {"include_bc", ablate.include_bc}}},
  };
}

ExperimentConfig ExperimentConfig::FromJson(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    c.preset = j.at("preset").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.task = j.at("task").get<std::string>();
    const auto& d = j.at("data");
    c.data.dir = d.at("dir").get<std::string>();
    c.data.play_trajectories = d.at("play_trajectories").get<int>();
    c.data.play_steps = d.at("play_steps").get<int>();
    c.data.demos_per_task = d.at("demos_per_task").get<int>();
    c.data.target_demos = d.at("target_demos").get<int>();
    c.data.prior_fraction = d.at("prior_fraction").get<double>();
    const auto& p = j.at("paths");
    c.paths.prior = p.at("prior").get<std::string>();
    c.paths.target = p.at("target").get<std::string>();
    c.paths.skill_checkpoint = p.at("skill_checkpoint").get<std::string>();
    c.paths.run = p.at("run").get<std::string>();
    c.skill_model = SkillModelConfig::FromJson(j.at("skill_model"));
    c.skill_train = SkillTrainConfig::FromJson(j.at("skill_train"));
    c.phase2 = Phase2Config::FromJson(j.at("phase2"));
    c.bc = BcConfig::FromJson(j.at("bc"));
    const auto& e = j.at("eval");
    c.eval.episodes = e.at("episodes").get<int>();
    c.eval.every = e.at("every").get<int>();
    c.eval.seed = e.at("seed").get<std::uint64_t>();
    const auto& a = j.at("ablate");
    c.ablate.seeds = a.at("seeds").get<std::vector<std::uint64_t>>();
    c.ablate.no_tp = a.at("no_tp").get<std::vector<bool>>();
    c.ablate.retrieval_modes = a.at("retrieval_modes").get<std::vector<std::string>>();
    c.ablate.retrieval_fractions = a.at("retrieval_fractions").get<std::vector<double>>();
    c.ablate.gammas = a.at("gammas").get<std::vector<double>>();
    c.ablate.no_prior = a.at("no_prior").get<std::vector<bool>>();
    c.ablate.prior_fractions = a.at("prior_fractions").get<std::vector<double>>();
    c.ablate.include_bc = a.at("include_bc").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return c;
}

void ExperimentConfig::Validate() const {
  Require(preset == "desk" || preset == "paper", "preset must be desk or paper");
  try {
    env::ParseTask(task);
  } catch (const std::exception&) {
    throw ConfigError("invalid config: unknown task '" + task + "'");
  }
  Require(data.play_trajectories >= 1, "data.play_trajectories >= 1");
  Require(data.play_steps >= 1, "data.play_steps >= 1");
  Require(data.demos_per_task >= 1, "data.demos_per_task >= 1");
  Require(data.target_demos >= 1 && data.target_demos <= data.demos_per_task,
          "1 <= data.target_demos <= data.demos_per_task");
  Require(data.prior_fraction > 0.0 && data.prior_fraction <= 1.0,
          "data.prior_fraction in (0, 1]");
  const auto& m = skill_model;
  Require(m.horizon >= 1, "skill_model.horizon >= 1");
  Require(m.latent_dim >= 1, "skill_model.latent_dim >= 1");
  Require(m.rnn_hidden >= 1 && m.rnn_layers >= 1, "skill_model recurrent sizes >= 1");
  Require(m.obs_dim == env::kObsDim && m.act_dim == env::kActDim,
          "skill_model dimensions must match the environment (13, 4)");
  for (const SkillTrainConfig* s : {&skill_train, &phase2.skill}) {
    Require(s->batch_size >= 1, "skill batch_size >= 1");
    Require(s->steps >= 0, "skill steps >= 0");
    Require(s->lr_vae > 0.0 && s->lr_tp > 0.0, "skill learning rates > 0");
    Require(s->weights.beta >= 0.0 && s->weights.alpha >= 0.0, "beta, alpha >= 0");
    Require(s->max_offset >= 1, "max_offset >= 1");
  }
  Require(phase2.policy.frames >= 1, "phase2.policy.frames >= 1");
  Require(phase2.batch_size >= 1 && phase2.steps >= 0, "phase2 batch_size >= 1, steps >= 0");
  Require(phase2.lr_policy > 0.0, "phase2.lr_policy > 0");
  Require(phase2.gamma >= 0.0, "phase2.gamma >= 0");
  Require(phase2.retrieval.fraction >= 0.0 && phase2.retrieval.fraction <= 1.0,
          "phase2.retrieval.fraction in [0, 1]");
  Require(phase2.retrieval.num_prior >= 1 && phase2.retrieval.num_target >= 1,
          "retrieval sample counts >= 1");
  Require(bc.policy.frames >= 1 && bc.batch_size >= 1, "bc frames and batch_size >= 1");
  Require(bc.steps >= 0 && bc.prior_steps >= 0 && bc.lr > 0.0, "bc steps >= 0, lr > 0");
  Require(eval.episodes >= 1 && eval.every >= 1, "eval.episodes and eval.every >= 1");
  Require(!ablate.seeds.empty(), "ablate.seeds nonempty");
  for (const auto& mode : ablate.retrieval_modes) ParseRetrievalMode(mode);
  for (double r : ablate.retrieval_fractions) Require(r >= 0.0 && r <= 1.0, "ablate fractions");
  for (double g : ablate.gammas) Require(g >= 0.0, "ablate gammas >= 0");
  for (double f : ablate.prior_fractions) Require(f > 0.0 && f <= 1.0, "ablate prior_fractions");
}

std::string ExperimentConfig::Fingerprint() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(Fnv1a64("experiment:" + ToJson().dump())));
  return buf;
}

std::filesystem::path ExperimentConfig::PriorPath() const {
  return paths.prior.empty() ? std::filesystem::path(data.dir) / "prior" : std::filesystem::path(paths.prior);
}

std::filesystem::path ExperimentConfig::TargetPath() const {
  return paths.target.empty() ? std::filesystem::path(data.dir) / ("target_" + task)
                              : std::filesystem::path(paths.target);
}

ExperimentConfig Preset(const std::string& name) {
  ExperimentConfig c;
  c.preset = name;
  if (name == "desk") {
    c.skill_train.steps = 20000;
    c.skill_train.log_interval = 100;
    c.phase2.steps = 8000;
    c.phase2.checkpoint_interval = 500;
    c.phase2.log_interval = 100;
    // The small-prior retrieval fraction: 20k windows from 200 play runs.
    c.phase2.retrieval = {RetrievalMode::kL2, 0.05, 20000, 1000};
    c.bc.steps = 8000;
    c.bc.prior_steps = 5000;
    c.bc.checkpoint_interval = 500;
    c.eval.every = 1;
  } else if (name == "paper") {
    c.skill_model.latent_dim = 64;
    c.skill_model.rnn_hidden = 1000;
    c.skill_model.mlp_hidden = {1024, 1024};
    c.skill_model.prior_hidden = {1024, 1024};
    c.skill_model.tp_hidden = {128, 128};
    c.phase2.policy.rnn_hidden = 1000;
    c.bc.policy.rnn_hidden = 1000;
    c.skill_train.steps = 200000;
    c.skill_train.log_interval = 1000;
    c.skill_train.checkpoint_interval = 10000;
    c.phase2.steps = 100000;
    c.phase2.checkpoint_interval = 2000;
    c.phase2.log_interval = 1000;
    c.phase2.retrieval = {RetrievalMode::kL2, 0.1, 250000, 2500};
    c.bc.steps = 100000;
    c.bc.prior_steps = 100000;
    c.bc.checkpoint_interval = 2000;
    c.eval.episodes = 100;
    c.eval.every = 10;
  } else {
    throw UsageError("unknown preset '" + name + "' (expected desk or paper)");
  }
  c.phase2.policy.latent_dim = c.skill_model.latent_dim;
  c.phase2.skill = c.skill_train;
  c.phase2.skill.steps = 0;
  c.phase2.skill.checkpoint_interval = 0;
  return c;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path, const std::string& preset) {
  nlohmann::json file = nlohmann::json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    try {
      file = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!file.is_object()) throw ConfigError("config file must hold a JSON object");
  }
  const std::string name = !preset.empty() ? preset : file.value("preset", std::string("desk"));
  nlohmann::json merged = Preset(name).ToJson();
  RejectUnknownKeys(file, merged, "");
  merged.merge_patch(file);
  merged["preset"] = name;
  ExperimentConfig c = ExperimentConfig::FromJson(merged);
  c.Validate();
  return c;
}

}  // namespace skillret::cli
