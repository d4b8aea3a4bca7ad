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

#include "skillret/env/rollout.h"

#include <iostream>

#include "skillret/errors.h"

namespace skillret::env {

EpisodeResult Rollout(Controller& controller, const TaskSpec& task, Rng& rng, int budget,
                      RolloutTrace* trace) {
  const int horizon = controller.horizon();
  if (horizon < 1) throw ConfigError("controller horizon must be >= 1");
  EpisodeResult result;
  RoomState state = task.Reset(rng);
  std::vector<Vector> history{Observe(state)};
  controller.BeginEpisode();
  bool done = task.Success(state);
  while (!done && result.steps < budget) {
    controller.SelectSkill(history);
    ++result.policy_queries;
    if (trace != nullptr) trace->query_steps.push_back(result.steps);
    for (int k = 0; k < horizon && result.steps < budget; ++k) {
      Vector action = controller.Act(history.back());
      if (!action.allFinite()) ++result.nonfinite_actions;
      state = Step(state, action);
      history.push_back(Observe(state));
      ++result.steps;
      if (task.Success(state)) {
        done = true;
        break;
      }
    }
  }
  if (result.nonfinite_actions > 0) {
    std::cerr << "rollout: clamped " << result.nonfinite_actions << " non-finite actions\n";
  }
  result.success = task.Success(state);
  result.subtasks = task.Subtasks(state);
  return result;
}

ScriptedController::ScriptedController(const TaskSpec& task, std::uint64_t seed, int horizon)
    : task_(task), rng_(seed), horizon_(horizon) {}

void ScriptedController::BeginEpisode() { solver_ = std::make_unique<TaskSolver>(task_, rng_); }

Vector ScriptedController::Act(const Vector& observation) {
  const RoomState s = StateFromObservation(observation);
  const auto action = solver_->Act(s);
  if (!action) return Vector::Zero(kActDim);
  return PerturbAction(*action, rng_);
}

nlohmann::json EvalReport::ToJson() const {
  return {{"schema_version", kSchemaVersion},
          {"task", TaskString(task)},
          {"checkpoints", checkpoints},
          {"rates", rates},
          {"best", best},
          {"best_index", best_index},
          {"episodes_per_checkpoint", episodes},
          {"seed", seed}};
}

std::uint64_t EpisodeSeed(std::uint64_t seed, int index) {
  return Rng::DeriveSeed(seed, "eval-episode/" + std::to_string(index));
}

EvalReport Evaluate(const std::vector<std::string>& checkpoints, const ControllerFactory& make,
                    const TaskSpec& task, int episodes_per_checkpoint, std::uint64_t seed) {
  if (episodes_per_checkpoint < 1) throw UsageError("episodes_per_checkpoint must be >= 1");
  EvalReport report;
  report.task = task.name;
  report.checkpoints = checkpoints;
  report.episodes = episodes_per_checkpoint;
  report.seed = seed;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    auto controller = make(c);
    int successes = 0;
    for (int e = 0; e < episodes_per_checkpoint; ++e) {
      Rng rng(EpisodeSeed(seed, e));
      if (Rollout(*controller, task, rng, task.budget).success) ++successes;
    }
    const double rate = static_cast<double>(successes) / episodes_per_checkpoint;
    report.rates.push_back(rate);
    if (report.best_index < 0 || rate > report.best) {
      report.best = rate;
      report.best_index = static_cast<int>(c);
    }
  }
  return report;
}

}  // namespace skillret::env
