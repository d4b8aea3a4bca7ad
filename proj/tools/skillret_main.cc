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


// Command-line front end: skillret <command> [flags].

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "skillret/cli/commands.h"
#include "skillret/cli/config.h"
#include "skillret/errors.h"

namespace {

using skillret::cli::ExperimentConfig;

struct Flags {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string data;
  std::string prior;
  std::string target;
  std::string skill;
  std::string run;
  std::string task;
  bool force = false;
  bool ft = false;
  bool scripted = false;
  // Ablation switches; single values for training commands, lists for ablate.
  bool no_tp = false;
  std::vector<std::string> retrieval_mode;
  std::vector<double> retrieval_frac;
  std::vector<double> gamma;
  std::vector<double> prior_frac;
  std::vector<std::uint64_t> seeds;
  bool no_prior = false;
  bool with_bc = false;
};

void AddShared(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON config file (overrides the preset)");
  cmd->add_option("--preset", f.preset, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--out", f.out, "output directory")->required();
  cmd->add_option("--data", f.data, "dataset root written by gen-data");
  cmd->add_option("--task", f.task, "setting_up or cleaning_up");
}

void AddInputs(CLI::App* cmd, Flags& f) {
  cmd->add_option("--prior", f.prior, "prior dataset directory");
  cmd->add_option("--target", f.target, "target dataset directory");
  cmd->add_option("--skill", f.skill, "pretrained skill checkpoint");
}

void AddAblation(CLI::App* cmd, Flags& f, bool lists) {
  cmd->add_flag("--no-tp", f.no_tp, "drop the temporal-predictability term (alpha = 0)");
  auto* mode = cmd->add_option("--retrieval-mode", f.retrieval_mode, "l2, kl, random, none or all")
                   ->check(CLI::IsMember({"l2", "kl", "random", "none", "all"}));
  auto* frac = cmd->add_option("--retrieval-frac", f.retrieval_frac, "retrieved fraction r");
  auto* gamma = cmd->add_option("--gamma", f.gamma, "retrieval loss weight");
  auto* pf = cmd->add_option("--prior-frac", f.prior_frac, "fraction of prior data used");
  if (lists) {
    for (auto* o : {mode, frac, gamma, pf}) o->delimiter(',');
  } else {
    for (auto* o : {mode, frac, gamma, pf}) o->expected(1);
  }
}

ExperimentConfig Resolve(const Flags& f, const std::string& command) {
  ExperimentConfig c = skillret::cli::LoadConfig(f.config, f.preset);
  if (f.seed) c.seed = *f.seed;
  if (!f.data.empty()) c.data.dir = f.data;
  if (!f.prior.empty()) c.paths.prior = f.prior;
  if (!f.target.empty()) c.paths.target = f.target;
  if (!f.skill.empty()) c.paths.skill_checkpoint = f.skill;
  if (!f.run.empty()) c.paths.run = f.run;
  if (!f.task.empty()) c.task = f.task;
  if (command == "ablate") {
    if (f.no_tp) c.ablate.no_tp = {false, true};
    if (f.no_prior) c.ablate.no_prior = {false, true};
    if (f.with_bc) c.ablate.include_bc = true;
    if (!f.retrieval_mode.empty()) c.ablate.retrieval_modes = f.retrieval_mode;
    if (!f.retrieval_frac.empty()) c.ablate.retrieval_fractions = f.retrieval_frac;
    if (!f.gamma.empty()) c.ablate.gammas = f.gamma;
    if (!f.prior_frac.empty()) c.ablate.prior_fractions = f.prior_frac;
    if (!f.seeds.empty()) c.ablate.seeds = f.seeds;
  } else {
    if (f.no_tp) {
      c.skill_train.weights.alpha = 0.0;
      c.phase2.skill.weights.alpha = 0.0;
    }
    if (!f.retrieval_mode.empty()) {
      c.phase2.retrieval.mode = skillret::ParseRetrievalMode(f.retrieval_mode[0]);
    }
    if (!f.retrieval_frac.empty()) c.phase2.retrieval.fraction = f.retrieval_frac[0];
    if (!f.gamma.empty()) c.phase2.gamma = f.gamma[0];
    if (!f.prior_frac.empty()) c.data.prior_fraction = f.prior_frac[0];
  }
  c.Validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skill-based imitation learning with prior-data retrieval"};
  app.require_subcommand(1);
  Flags f;

  auto* gen = app.add_subcommand("gen-data", "generate play data and task demos");
  AddShared(gen, f);
  gen->add_flag("--force", f.force, "overwrite existing dataset directories");

  auto* pre = app.add_subcommand("skill-pretrain", "pretrain the skill model on prior data");
  AddShared(pre, f);
  AddInputs(pre, f);
  AddAblation(pre, f, false);

  auto* ret = app.add_subcommand("retrieve", "rank prior windows against the target demos");
  AddShared(ret, f);
  AddInputs(ret, f);
  AddAblation(ret, f, false);

  auto* pol = app.add_subcommand("policy-train", "train the skill policy with retrieval");
  AddShared(pol, f);
  AddInputs(pol, f);
  AddAblation(pol, f, false);

  auto* bc = app.add_subcommand("bc-train", "train the BC-RNN baseline");
  AddShared(bc, f);
  AddInputs(bc, f);
  bc->add_flag("--ft", f.ft, "pretrain on prior data first (BC-RNN FT)");

  auto* ev = app.add_subcommand("eval", "evaluate a training run's checkpoints");
  AddShared(ev, f);
  ev->add_option("--run", f.run, "directory of a policy-train or bc-train run");
  ev->add_flag("--scripted", f.scripted, "evaluate the scripted solver instead");

  auto* abl = app.add_subcommand("ablate", "run an ablation grid over seeds");
  AddShared(abl, f);
  AddInputs(abl, f);
  AddAblation(abl, f, true);
  abl->add_flag("--no-prior", f.no_prior, "add the no-prior-data cells");
  abl->add_flag("--with-bc", f.with_bc, "add a BC-RNN cell");
  abl->add_option("--seeds", f.seeds, "seeds to average over")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    const ExperimentConfig config = Resolve(f, name);
    const skillret::cli::CommandContext ctx{f.out, &std::cerr, f.force};
    if (name == "gen-data") {
      skillret::cli::GenData(config, ctx);
    } else if (name == "skill-pretrain") {
      skillret::cli::SkillPretrain(config, ctx);
    } else if (name == "retrieve") {
      skillret::cli::RetrieveCmd(config, ctx);
    } else if (name == "policy-train") {
      skillret::cli::PolicyTrain(config, ctx);
    } else if (name == "bc-train") {
      skillret::cli::BcTrainCmd(config, f.ft, ctx);
    } else if (name == "eval") {
      skillret::cli::EvalCmd(config, f.scripted, ctx);
    } else if (name == "ablate") {
      skillret::cli::Ablate(config, ctx);
    }
  } catch (const skillret::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const skillret::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
