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


#include "skillret/cli/commands.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "skillret/env/scripted.h"
#include "skillret/errors.h"
#include "skillret/policy/agents.h"
#include "skillret/policy/train.h"

namespace skillret::cli {
namespace fs = std::filesystem;
namespace {

void Log(const CommandContext& ctx, const std::string& line) {
  if (ctx.log != nullptr) *ctx.log << line << std::endl;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

void WriteJson(const fs::path& path, const nlohmann::json& j) { WriteText(path, j.dump(2) + "\n"); }

nlohmann::json ReadJson(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// Creates the output directory and records the effective configuration.
void PrepareOutput(const ExperimentConfig& config, const CommandContext& ctx) {
  fs::create_directories(ctx.out);
  WriteJson(ctx.out / "config.json",
            {{"fingerprint", config.Fingerprint()}, {"config", config.ToJson()}});
}

std::string StepName(const std::string& prefix, int step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_step_%06d.ckpt", prefix.c_str(), step);
  return buf;
}

// What a checkpoint looks like after a trip through the f32 file format, so
// in-memory runs match runs that go through disk.
Checkpoint AsStored(const Checkpoint& ckpt) {
  return DecodeCheckpoint(EncodeCheckpoint(ckpt, Dtype::kF32));
}

Checkpoint Stamp(Checkpoint ckpt, const ExperimentConfig& config) {
  ckpt.meta["config_fingerprint"] = config.Fingerprint();
  return ckpt;
}

Checkpoint LoadSkill(const ExperimentConfig& config) {
  if (config.paths.skill_checkpoint.empty()) {
    throw UsageError("no skill checkpoint given (--skill or paths.skill_checkpoint)");
  }
  Checkpoint ckpt = ReadCheckpoint(config.paths.skill_checkpoint);
  if (ckpt.fingerprint != config.skill_model.Fingerprint()) {
    throw ConfigError("skill checkpoint " + config.paths.skill_checkpoint + " has fingerprint " +
                      ckpt.fingerprint + " but the config's skill model has " +
                      config.skill_model.Fingerprint() + "; refusing to run");
  }
  return ckpt;
}

SkillPolicyConfig EffectivePolicyConfig(const ExperimentConfig& config) {
  SkillPolicyConfig pc = config.phase2.policy;
  pc.obs_dim = config.skill_model.obs_dim;
  pc.latent_dim = config.skill_model.latent_dim;
  return pc;
}

BcPolicyConfig EffectiveBcConfig(const ExperimentConfig& config) {
  BcPolicyConfig pc = config.bc.policy;
  pc.obs_dim = env::kObsDim;
  pc.act_dim = env::kActDim;
  return pc;
}

// Datasets the skill model is pretrained on: play data, or the target
// demos themselves when prior data is ablated away.
TrajectoryDataset PretrainingData(const ExperimentConfig& config) {
  if (!config.phase2.target_only) return LoadPrior(config);
  TrajectoryDataset target = LoadTarget(config);
  target.role = DatasetRole::kPrior;
  return target;
}

std::vector<RunCheckpoint> CollectRun(std::vector<RunCheckpoint> saved, int steps,
                                      RunCheckpoint final_ckpt) {
  if (saved.empty() || saved.back().step != steps) saved.push_back(std::move(final_ckpt));
  return saved;
}

}  // namespace

TrajectoryDataset LoadPrior(const ExperimentConfig& config) {
  TrajectoryDataset prior = LoadDataset(config.PriorPath());
  if (prior.role != DatasetRole::kPrior) {
    throw UsageError(config.PriorPath().string() + " is not a prior dataset");
  }
  return config.data.prior_fraction < 1.0 ? TakeFraction(prior, config.data.prior_fraction)
                                          : prior;
}

TrajectoryDataset LoadTarget(const ExperimentConfig& config) {
  TrajectoryDataset target = LoadDataset(config.TargetPath());
  if (target.role != DatasetRole::kTarget) {
    throw UsageError(config.TargetPath().string() + " is not a target dataset");
  }
  if (static_cast<int>(target.trajectories.size()) < config.data.target_demos) {
    throw UsageError(config.TargetPath().string() + " holds fewer than " +
                     std::to_string(config.data.target_demos) + " demos");
  }
  return TakeFirst(target, static_cast<std::size_t>(config.data.target_demos));
}

void GenData(const ExperimentConfig& config, const CommandContext& ctx) {
  const std::vector<env::TaskName> tasks = {env::TaskName::kSettingUp, env::TaskName::kCleaningUp};
  std::vector<fs::path> dirs = {ctx.out / "prior"};
  for (auto t : tasks) dirs.push_back(ctx.out / ("target_" + env::TaskString(t)));
  for (const auto& d : dirs) {
    if (fs::exists(d)) {
      if (!ctx.force) throw UsageError(d.string() + " already exists; pass --force to overwrite");
      fs::remove_all(d);
    }
  }
  PrepareOutput(config, ctx);
  Log(ctx, "generating " + std::to_string(config.data.play_trajectories) + " play trajectories");
  const TrajectoryDataset play = env::GeneratePlayDataset(
      config.seed, config.data.play_trajectories, config.data.play_steps);
  WriteDataset(play, dirs[0]);
  env::PlayEvents events;
  for (const auto& t : play.trajectories) {
    const env::PlayEvents e = env::CountEvents(t);
    for (int i = 0; i < env::kNumLights; ++i) events.light_toggles[i] += e.light_toggles[i];
    for (int i = 0; i < env::kNumBlocks; ++i) events.grasps[i] += e.grasps[i];
    events.drawer_moves += e.drawer_moves;
  }
  nlohmann::json report = {
      {"schema_version", 1},
      {"seed", config.seed},
      {"play",
       {{"trajectories", play.trajectories.size()},
        {"transitions", play.total_transitions()},
        {"light_toggles", events.light_toggles},
        {"drawer_moves", events.drawer_moves},
        {"grasps", events.grasps}}}};
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    Log(ctx, "generating " + std::to_string(config.data.demos_per_task) + " demos for " +
                 env::TaskString(tasks[i]));
    const TrajectoryDataset demos =
        env::GenerateDemoDataset(env::MakeTask(tasks[i]), config.seed, config.data.demos_per_task);
    WriteDataset(demos, dirs[i + 1]);
    std::vector<int> lengths;
    for (const auto& t : demos.trajectories) lengths.push_back(static_cast<int>(t.actions.rows()));
    report["demos"][env::TaskString(tasks[i])] = {{"count", demos.trajectories.size()},
                                                  {"transitions", demos.total_transitions()},
                                                  {"lengths", lengths}};
  }
  WriteJson(ctx.out / "gen_report.json", report);
  Log(ctx, "wrote " + std::to_string(play.total_transitions()) + " play transitions to " +
               dirs[0].string());
}

void SkillPretrain(const ExperimentConfig& config, const CommandContext& ctx) {
  const TrajectoryDataset prior = PretrainingData(config);
  PrepareOutput(config, ctx);
  std::ofstream metrics(ctx.out / "skill_metrics.jsonl", std::ios::binary);
  PretrainHooks hooks;
  hooks.on_metrics = [&](const SkillMetricsEvent& e) {
    const nlohmann::json line = {{"step", e.step},         {"recon", e.loss.recon},
                                 {"kl", e.loss.kl},         {"tp", e.loss.tp},
                                 {"total", e.loss.total}};
    metrics << line.dump() << "\n";
    if (e.step % (config.skill_train.log_interval * 10) == 0) Log(ctx, "skill " + line.dump());
  };
  hooks.on_checkpoint = [&](int step, const Checkpoint& ckpt) {
    WriteCheckpoint(ctx.out / StepName("skill", step), Stamp(ckpt, config));
  };
  const PretrainResult r =
      Pretrain(config.skill_model, config.skill_train, prior, config.seed, hooks);
  WriteCheckpoint(ctx.out / "skill.ckpt", Stamp(r.checkpoint, config));
  if (r.diverged) {
    throw TrainingError("pretraining diverged (" + r.error + "); last good checkpoint at step " +
                        std::to_string(r.steps_completed) + " written to skill.ckpt");
  }
  Log(ctx, "wrote " + (ctx.out / "skill.ckpt").string());
}

void RetrieveCmd(const ExperimentConfig& config, const CommandContext& ctx) {
  const Checkpoint ckpt = LoadSkill(config);
  const LoadedSkill skill = LoadSkillCheckpoint(ckpt);
  const TrajectoryDataset prior = skill.normalizer.Apply(LoadPrior(config));
  const TrajectoryDataset target = skill.normalizer.Apply(LoadTarget(config));
  PrepareOutput(config, ctx);
  Rng rng = Rng::ForStream(config.seed, "phase2/retrieval");
  const RetrievalSet set = Retrieve(*skill.model, prior, target, config.phase2.retrieval, rng);
  WriteJson(ctx.out / "retrieval.json", set.ReportJson());
  Log(ctx, "retrieved " + std::to_string(set.ranked.size()) + " of " +
               std::to_string(set.num_prior) + " prior windows");
}

std::vector<RunCheckpoint> TrainSkillPolicyRun(const ExperimentConfig& config,
                                               const TrajectoryDataset& prior,
                                               const TrajectoryDataset& target,
                                               const Checkpoint& skill, std::uint64_t seed) {
  std::vector<RunCheckpoint> saved;
  Phase2Hooks hooks;
  hooks.on_checkpoint = [&](int step, const Checkpoint& p, const Checkpoint& s) {
    saved.push_back({step, AsStored(p), AsStored(s)});
  };
  const Phase2Result r = TrainPhase2(config.phase2, prior, target, skill, seed, hooks);
  return CollectRun(std::move(saved), config.phase2.steps,
                    {config.phase2.steps, AsStored(r.policy), AsStored(r.skill)});
}

std::vector<RunCheckpoint> TrainBcRun(const ExperimentConfig& config,
                                      const TrajectoryDataset& target,
                                      const TrajectoryDataset* prior, std::uint64_t seed) {
  std::vector<RunCheckpoint> saved;
  BcHooks hooks;
  hooks.on_checkpoint = [&](int step, const std::string& phase, const Checkpoint& c) {
    if (phase == "target") saved.push_back({step, AsStored(c), std::nullopt});
  };
  BcConfig bc = config.bc;
  if (prior == nullptr) bc.prior_steps = 0;
  const Checkpoint final_ckpt = BcTrain(bc, target, prior, seed, hooks);
  return CollectRun(std::move(saved), bc.steps, {bc.steps, AsStored(final_ckpt), std::nullopt});
}

void PolicyTrain(const ExperimentConfig& config, const CommandContext& ctx) {
  const Checkpoint skill = LoadSkill(config);
  const TrajectoryDataset target = LoadTarget(config);
  const TrajectoryDataset prior = config.phase2.target_only ? target : LoadPrior(config);
  PrepareOutput(config, ctx);
  std::ofstream metrics(ctx.out / "policy_metrics.jsonl", std::ios::binary);
  nlohmann::json index = {{"kind", "skill_policy"}, {"task", config.task},
                          {"checkpoints", nlohmann::json::array()}};
  Phase2Hooks hooks;
  hooks.on_metrics = [&](const Phase2Metrics& m) {
    const nlohmann::json line = {{"step", m.step},
                                 {"policy_target_loss", m.policy_target_loss},
                                 {"policy_retrieval_loss", m.policy_retrieval_loss},
                                 {"skill_ft_total", m.skill_ft_total}};
    metrics << line.dump() << "\n";
    if (m.step % (config.phase2.log_interval * 10) == 0) Log(ctx, "policy " + line.dump());
  };
  auto save = [&](int step, const Checkpoint& p, const Checkpoint& s) {
    const std::string pn = StepName("policy", step);
    const std::string sn = StepName("skill_ft", step);
    WriteCheckpoint(ctx.out / pn, Stamp(p, config));
    WriteCheckpoint(ctx.out / sn, Stamp(s, config));
    index["checkpoints"].push_back({{"step", step}, {"policy", pn}, {"skill", sn}});
  };
  hooks.on_checkpoint = save;
  hooks.on_retrieval = [&](const RetrievalSet& set) {
    WriteJson(ctx.out / "retrieval.json", set.ReportJson());
    Log(ctx, "retrieved " + std::to_string(set.ranked.size()) + " of " +
                 std::to_string(set.num_prior) + " prior windows");
  };
  hooks.on_warning = [&](const std::string& w) { Log(ctx, "warning: " + w); };
  const Phase2Result r = TrainPhase2(config.phase2, prior, target, skill, config.seed, hooks);
  if (index["checkpoints"].empty() || index["checkpoints"].back()["step"] != config.phase2.steps) {
    save(config.phase2.steps, r.policy, r.skill);
  }
  WriteCheckpoint(ctx.out / "policy.ckpt", Stamp(r.policy, config));
  WriteCheckpoint(ctx.out / "skill_ft.ckpt", Stamp(r.skill, config));
  WriteJson(ctx.out / "checkpoints.json", index);
  Log(ctx, "trained policy on " + std::to_string(r.target_examples) + " target and " +
               std::to_string(r.retrieved) + " retrieved examples");
}

void BcTrainCmd(const ExperimentConfig& config, bool finetune, const CommandContext& ctx) {
  const TrajectoryDataset target = LoadTarget(config);
  std::optional<TrajectoryDataset> prior;
  if (finetune) prior = LoadPrior(config);
  PrepareOutput(config, ctx);
  std::ofstream metrics(ctx.out / "bc_metrics.jsonl", std::ios::binary);
  nlohmann::json index = {{"kind", "bc"}, {"task", config.task}, {"finetune", finetune},
                          {"checkpoints", nlohmann::json::array()}};
  BcConfig bc = config.bc;
  if (!finetune) bc.prior_steps = 0;
  auto save = [&](int step, const std::string& phase, const Checkpoint& c) {
    const std::string name = StepName(phase == "prior" ? "bc_prior" : "bc", step);
    WriteCheckpoint(ctx.out / name, Stamp(c, config));
    if (phase == "target") index["checkpoints"].push_back({{"step", step}, {"policy", name}});
  };
  BcHooks hooks;
  hooks.on_metrics = [&](const BcMetrics& m) {
    metrics << nlohmann::json{{"step", m.step}, {"phase", m.phase}, {"loss", m.loss}}.dump()
            << "\n";
  };
  hooks.on_checkpoint = save;
  const Checkpoint final_ckpt =
      BcTrain(bc, target, prior ? &*prior : nullptr, config.seed, hooks);
  if (index["checkpoints"].empty() || index["checkpoints"].back()["step"] != bc.steps) {
    save(bc.steps, "target", final_ckpt);
  }
  WriteCheckpoint(ctx.out / "bc.ckpt", Stamp(final_ckpt, config));
  WriteJson(ctx.out / "checkpoints.json", index);
  Log(ctx, "wrote " + (ctx.out / "bc.ckpt").string());
}

env::EvalReport EvaluateRun(const std::vector<RunCheckpoint>& run,
                            const ExperimentConfig& config) {
  if (run.empty()) throw UsageError("no checkpoints to evaluate");
  std::vector<const RunCheckpoint*> chosen;
  const int every = config.eval.every;
  for (std::size_t i = 0; i < run.size(); ++i) {
    if ((i + 1) % every == 0 || i + 1 == run.size()) chosen.push_back(&run[i]);
  }
  const bool bc = !chosen.front()->skill.has_value();
  std::vector<LoadedPolicy> policies;
  std::vector<LoadedSkill> skills;
  std::vector<LoadedBc> bcs;
  std::vector<std::string> names;
  for (const RunCheckpoint* c : chosen) {
    names.push_back("step_" + std::to_string(c->step));
    if (bc) {
      bcs.push_back(LoadBcCheckpoint(c->policy));
      continue;
    }
    policies.push_back(LoadPolicyCheckpoint(c->policy));
    skills.push_back(LoadSkillCheckpoint(*c->skill));
    if (policies.back().meta.value("skill_fingerprint", "") != c->skill->fingerprint) {
      throw ConfigError("policy checkpoint at step " + std::to_string(c->step) +
                        " was trained against a different skill model");
    }
  }
  const env::TaskSpec task = env::MakeTask(env::ParseTask(config.task));
  return env::Evaluate(
      names,
      [&](std::size_t i) -> std::unique_ptr<env::Controller> {
        if (bc) return std::make_unique<BcAgent>(*bcs[i].policy, bcs[i].normalizer);
        return std::make_unique<SkillAgent>(*policies[i].policy, *skills[i].model,
                                            skills[i].normalizer);
      },
      task, config.eval.episodes, config.eval.seed);
}

env::EvalReport EvalCmd(const ExperimentConfig& config, bool scripted, const CommandContext& ctx) {
  env::EvalReport report;
  nlohmann::json extra = {{"config_fingerprint", config.Fingerprint()}};
  if (scripted) {
    const env::TaskSpec task = env::MakeTask(env::ParseTask(config.task));
    report = env::Evaluate(
        {"scripted"},
        [&](std::size_t) -> std::unique_ptr<env::Controller> {
          return std::make_unique<env::ScriptedController>(task, config.seed);
        },
        task, config.eval.episodes, config.eval.seed);
  } else {
    if (config.paths.run.empty()) throw UsageError("no run directory given (--run)");
    const fs::path run_dir = config.paths.run;
    const nlohmann::json index = ReadJson(run_dir / "checkpoints.json");
    const bool bc = index.at("kind") == "bc";
    std::vector<RunCheckpoint> run;
    for (const auto& e : index.at("checkpoints")) {
      RunCheckpoint c;
      c.step = e.at("step").get<int>();
      c.policy = ReadCheckpoint(run_dir / e.at("policy").get<std::string>());
      if (bc) {
        if (c.policy.fingerprint != EffectiveBcConfig(config).Fingerprint()) {
          throw ConfigError("BC checkpoint fingerprint does not match the config; refusing");
        }
      } else {
        c.skill = ReadCheckpoint(run_dir / e.at("skill").get<std::string>());
        if (c.skill->fingerprint != config.skill_model.Fingerprint() ||
            c.policy.fingerprint != EffectivePolicyConfig(config).Fingerprint()) {
          throw ConfigError("checkpoint fingerprints in " + run_dir.string() +
                            " do not match the config; refusing");
        }
      }
      run.push_back(std::move(c));
    }
    report = EvaluateRun(run, config);
    extra["run"] = run_dir.string();
  }
  PrepareOutput(config, ctx);
  nlohmann::json j = report.ToJson();
  j.update(extra);
  WriteJson(ctx.out / "eval.json", j);
  std::ostringstream s;
  s << "best success " << report.best << " (" << report.checkpoints[report.best_index] << ")";
  Log(ctx, s.str());
  return report;
}

namespace {

struct Cell {
  bool no_tp = false;
  bool no_prior = false;
  double prior_fraction = 1.0;
  std::string mode = "l2";
  double fraction = 0.1;
  double gamma = 1.0;
  bool bc = false;

  std::string Label() const {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2);
    if (bc) return "bc-rnn";
    s << (no_tp ? "no-tp" : "tp") << " ";
    if (no_prior) {
      s << "no-prior";
    } else {
      s << "prior=" << prior_fraction << " mode=" << mode << " r=" << fraction
        << " gamma=" << gamma;
    }
    return s.str();
  }
};

ExperimentConfig ApplyCell(ExperimentConfig c, const Cell& cell, std::uint64_t seed) {
  c.seed = seed;
  if (cell.no_tp) {
    c.skill_train.weights.alpha = 0.0;
    c.phase2.skill.weights.alpha = 0.0;
  }
  c.data.prior_fraction = cell.prior_fraction;
  c.phase2.target_only = cell.no_prior;
  c.phase2.retrieval.mode = ParseRetrievalMode(cell.mode);
  c.phase2.retrieval.fraction = cell.fraction;
  c.phase2.gamma = cell.gamma;
  return c;
}

std::vector<Cell> GridCells(const AblateConfig& a) {
  std::vector<Cell> cells;
  std::map<std::string, bool> seen;
  auto add = [&](const Cell& c) {
    if (!seen[c.Label()]) {
      seen[c.Label()] = true;
      cells.push_back(c);
    }
  };
  for (bool no_tp : a.no_tp) {
    for (bool no_prior : a.no_prior) {
      if (no_prior) {
        Cell c;
        c.no_tp = no_tp;
        c.no_prior = true;
        c.mode = "none";
        c.fraction = 0.0;
        add(c);
        continue;
      }
      for (double pf : a.prior_fractions) {
        for (const auto& mode : a.retrieval_modes) {
          for (double r : a.retrieval_fractions) {
            for (double g : a.gammas) add({no_tp, false, pf, mode, r, g, false});
          }
        }
      }
    }
  }
  if (a.include_bc) {
    Cell c;
    c.bc = true;
    add(c);
  }
  return cells;
}

}  // namespace

nlohmann::json Ablate(const ExperimentConfig& config, const CommandContext& ctx) {
  PrepareOutput(config, ctx);
  const std::vector<Cell> cells = GridCells(config.ablate);
  const TrajectoryDataset target = LoadTarget(config);
  std::optional<TrajectoryDataset> full_prior;
  std::map<std::string, Checkpoint> skills;  // pretraining shared between cells
  nlohmann::json rows = nlohmann::json::array();
  std::ostringstream table;
  table << "task " << config.task << ", seeds";
  for (auto s : config.ablate.seeds) table << " " << s;
  table << "\n";
  for (const Cell& cell : cells) {
    std::vector<double> rates;
    nlohmann::json errors = nlohmann::json::array();
    for (std::uint64_t seed : config.ablate.seeds) {
      const ExperimentConfig c = ApplyCell(config, cell, seed);
      try {
        env::EvalReport report;
        if (cell.bc) {
          report = EvaluateRun(TrainBcRun(c, target, nullptr, seed), c);
        } else {
          if (!full_prior) full_prior = LoadDataset(config.PriorPath());
          TrajectoryDataset prior = cell.no_prior ? target
                                    : cell.prior_fraction < 1.0
                                        ? TakeFraction(*full_prior, cell.prior_fraction)
                                        : *full_prior;
          std::ostringstream key;
          key << seed << "/" << cell.no_tp << "/" << cell.no_prior << "/" << cell.prior_fraction;
          if (!skills.contains(key.str())) {
            TrajectoryDataset pre = prior;
            pre.role = DatasetRole::kPrior;
            Log(ctx, "pretraining skills for " + key.str());
            const PretrainResult r = Pretrain(c.skill_model, c.skill_train, pre, seed);
            if (r.diverged) throw TrainingError("pretraining diverged: " + r.error);
            skills[key.str()] = AsStored(Stamp(r.checkpoint, c));
          }
          report = EvaluateRun(TrainSkillPolicyRun(c, prior, target, skills[key.str()], seed), c);
        }
        rates.push_back(report.best);
        Log(ctx, cell.Label() + " seed " + std::to_string(seed) + ": " +
                     std::to_string(report.best));
      } catch (const std::exception& e) {
        errors.push_back({{"seed", seed}, {"error", e.what()}});
        Log(ctx, cell.Label() + " seed " + std::to_string(seed) + " failed: " + e.what());
      }
    }
    double mean = 0.0;
    double var = 0.0;
    for (double r : rates) mean += r;
    if (!rates.empty()) mean /= static_cast<double>(rates.size());
    for (double r : rates) var += (r - mean) * (r - mean);
    const double std_dev =
        rates.size() > 1 ? std::sqrt(var / static_cast<double>(rates.size() - 1)) : 0.0;
    rows.push_back({{"label", cell.Label()},
                    {"no_tp", cell.no_tp},
                    {"no_prior", cell.no_prior},
                    {"prior_fraction", cell.prior_fraction},
                    {"retrieval_mode", cell.mode},
                    {"retrieval_fraction", cell.fraction},
                    {"gamma", cell.gamma},
                    {"bc", cell.bc},
                    {"rates", rates},
                    {"mean", rates.empty() ? nlohmann::json(nullptr) : nlohmann::json(mean)},
                    {"std", rates.empty() ? nlohmann::json(nullptr) : nlohmann::json(std_dev)},
                    {"errors", errors}});
    table << std::left << std::setw(48) << cell.Label() << std::fixed << std::setprecision(3);
    if (rates.empty()) {
      table << "failed";
    } else {
      table << mean << " +- " << std_dev;
    }
    table << "\n";
  }
  const nlohmann::json out = {{"schema_version", 1},
                              {"task", config.task},
                              {"seeds", config.ablate.seeds},
                              {"episodes_per_checkpoint", config.eval.episodes},
                              {"cells", rows}};
  WriteJson(ctx.out / "ablation.json", out);
  WriteText(ctx.out / "ablation.txt", table.str());
  Log(ctx, table.str());
  return out;
}

}  // namespace skillret::cli
