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

#ifndef SKILLRET_ENV_ROLLOUT_H_
#define SKILLRET_ENV_ROLLOUT_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "skillret/env/room.h"
#include "skillret/env/scripted.h"

namespace skillret::env {

// What the rollout loop drives. SelectSkill is called once per skill with
// the raw observation history (oldest first, last entry is current); Act is
// then called for each of the next horizon() steps.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual int horizon() const = 0;
  virtual void BeginEpisode() {}
  virtual void SelectSkill(std::span<const Vector> history) = 0;
  virtual Vector Act(const Vector& observation) = 0;
};

struct EpisodeResult {
  bool success = false;
  int steps = 0;
  int policy_queries = 0;
  int nonfinite_actions = 0;
  SubtaskFlags subtasks;
};

// Optional instrumentation filled by Rollout.
struct RolloutTrace {
  std::vector<int> query_steps;  // env step index at each SelectSkill
};

// Query, execute exactly horizon() steps (or until the budget ends), repeat.
// Stops on success or when `budget` steps have been taken.
EpisodeResult Rollout(Controller& controller, const TaskSpec& task, Rng& rng, int budget,
                      RolloutTrace* trace = nullptr);

// The reactive scripted solver behind the Controller interface, with action
// noise from its own stream.
class ScriptedController : public Controller {
 public:
  ScriptedController(const TaskSpec& task, std::uint64_t seed, int horizon = 10);
  int horizon() const override { return horizon_; }
  void BeginEpisode() override;
  void SelectSkill(std::span<const Vector>) override {}
  Vector Act(const Vector& observation) override;

 private:
  TaskSpec task_;
  Rng rng_;
  int horizon_;
  std::unique_ptr<TaskSolver> solver_;
};

struct EvalReport {
  static constexpr int kSchemaVersion = 1;

  TaskName task = TaskName::kSettingUp;
  std::vector<std::string> checkpoints;
  std::vector<double> rates;
  double best = 0.0;
  int best_index = -1;
  int episodes = 0;
  std::uint64_t seed = 0;

  nlohmann::json ToJson() const;
};

using ControllerFactory = std::function<std::unique_ptr<Controller>(std::size_t)>;

// Runs the same seeded episodes against every checkpoint and reports each
// success rate and the best one.
EvalReport Evaluate(const std::vector<std::string>& checkpoints, const ControllerFactory& make,
                    const TaskSpec& task, int episodes_per_checkpoint, std::uint64_t seed);

// Seed of evaluation episode `index` under master `seed`.
std::uint64_t EpisodeSeed(std::uint64_t seed, int index);

}  // namespace skillret::env

#endif  // SKILLRET_ENV_ROLLOUT_H_
