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

#ifndef SKILLRET_ENV_SCRIPTED_H_
#define SKILLRET_ENV_SCRIPTED_H_

#include <array>
#include <cstdint>
#include <optional>

#include "skillret/data/trajectory.h"
#include "skillret/env/room.h"
#include "skillret/numcore/rng.h"

namespace skillret::env {

inline constexpr double kActionNoise = 0.02;

// A primitive the waypoint controllers know how to achieve.
struct Goal {
  enum class Kind { kPickPlace, kToggle, kDrawer };
  Kind kind = Kind::kPickPlace;
  int index = 0;     // block for kPickPlace, light for kToggle
  Point target{};    // kPickPlace destination
  bool value = false;  // kToggle: desired light state; kDrawer: true = open
};

// Noise-free action toward `goal`, or nullopt once it holds. Also nullopt
// when the goal is unreachable from `state` (a block locked in the closed
// drawer).
std::optional<Vector> GoalAction(const RoomState& state, const Goal& goal);

// Gaussian action noise followed by clamping to [-1, 1].
Vector PerturbAction(const Vector& action, Rng& rng, double sigma = kActionNoise);

// Reactive solver: the next goal is a function of the current state and the
// per-episode placement targets chosen at construction.
class TaskSolver {
 public:
  TaskSolver(const TaskSpec& task, Rng& rng);

  std::optional<Goal> NextGoal(const RoomState& state) const;
  // Noise-free action, or nullopt once the task predicate holds.
  std::optional<Vector> Act(const RoomState& state) const;

 private:
  TaskSpec task_;
  std::array<Point, kNumBlocks> targets_{};
};

// Task-agnostic play: random primitives chained by the waypoint controllers
// with action noise until exactly `steps` actions are recorded.
Trajectory ScriptedPlay(Rng& rng, int steps, std::int64_t id);

// One demonstration that ends at the first state satisfying the task
// predicate. Throws std::runtime_error if the budget runs out.
Trajectory ScriptedDemo(const TaskSpec& task, Rng& rng, std::int64_t id);

// Counts of primitive events observed in a trajectory.
struct PlayEvents {
  std::array<int, kNumLights> light_toggles{};
  int drawer_moves = 0;
  std::array<int, kNumBlocks> grasps{};
};
PlayEvents CountEvents(const Trajectory& trajectory);

// Seeded generators; trajectory i draws from its own stream so datasets of
// different sizes share their common prefix.
TrajectoryDataset GeneratePlayDataset(std::uint64_t seed, int count, int steps);
// Every demo is checked against the task predicate before it is kept.
TrajectoryDataset GenerateDemoDataset(const TaskSpec& task, std::uint64_t seed, int count);

}  // namespace skillret::env

#endif  // SKILLRET_ENV_SCRIPTED_H_
