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

#include "skillret/env/scripted.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace skillret::env {
namespace {

constexpr double kArrive = 0.01;
constexpr double kPlaced = 0.02;
constexpr double kEngage = 0.03;
constexpr int kPlayGoalCap = 80;
constexpr double kMinBlockSeparation = 0.08;

double Unit(double v) { return std::clamp(v, -1.0, 1.0); }

Vector MakeAction(double dx, double dy, double grip, double interact) {
  Vector a(kActDim);
  a << dx, dy, grip, interact;
  return a;
}

Vector MoveToward(Point from, Point to, double grip) {
  return MakeAction(Unit((to.x - from.x) / kMaxStep), Unit((to.y - from.y) / kMaxStep), grip,
                    -1.0);
}

Vector Release() { return MakeAction(0.0, 0.0, -1.0, -1.0); }

Point RandomPointIn(const Zone& zone, Rng& rng, double inset) {
  return {rng.Uniform(zone.x0 + inset, zone.x1 - inset),
          rng.Uniform(zone.y0 + inset, zone.y1 - inset)};
}

// A point in `zone` away from every block except `skip`.
Point SeparatedPoint(const RoomState& s, const Zone& zone, int skip, Rng& rng) {
  Point p = RandomPointIn(zone, rng, 0.03);
  for (int attempt = 0; attempt < 20; ++attempt) {
    bool clear = true;
    for (int k = 0; k < kNumBlocks; ++k) {
      if (k != skip && Distance(p, s.blocks[k]) < kMinBlockSeparation) clear = false;
    }
    if (clear) break;
    p = RandomPointIn(zone, rng, 0.03);
  }
  return p;
}

Goal SamplePlayGoal(const RoomState& s, Rng& rng) {
  const double u = rng.Uniform();
  if (u < 0.5) {
    const int k = static_cast<int>(rng.UniformInt(0, kNumBlocks - 1));
    if (kDrawerZone.Contains(s.blocks[k]) && !s.drawer_accessible()) {
      return {Goal::Kind::kDrawer, 0, {}, true};
    }
    const bool to_drawer = s.drawer_accessible() && rng.Uniform() < 0.4;
    const Point dest = SeparatedPoint(s, to_drawer ? kDrawerZone : kTableZone, k, rng);
    return {Goal::Kind::kPickPlace, k, dest, false};
  }
  if (u < 0.75) {
    const int i = static_cast<int>(rng.UniformInt(0, kNumLights - 1));
    return {Goal::Kind::kToggle, i, {}, !s.lights[i]};
  }
  return {Goal::Kind::kDrawer, 0, {}, s.drawer < 0.5};
}

RoomState RandomPlayState(Rng& rng) {
  RoomState s;
  s.effector = {rng.Uniform(0.1, 0.9), rng.Uniform(0.1, 0.9)};
  s.lights = {rng.Uniform() < 0.5, rng.Uniform() < 0.5};
  s.drawer = rng.Uniform() < 0.5 ? 0.0 : 1.0;
  // Park blocks far away first so separation checks only see placed ones.
  for (auto& b : s.blocks) b = {-1.0, -1.0};
  for (int k = 0; k < kNumBlocks; ++k) {
    const bool in_drawer = rng.Uniform() < 0.4;
    s.blocks[k] = SeparatedPoint(s, in_drawer ? kDrawerZone : kTableZone, k, rng);
  }
  return s;
}

void Record(Trajectory& traj, std::vector<Vector>& obs, std::vector<Vector>& act) {
  const int t = static_cast<int>(act.size());
  traj.observations.resize(t + 1, kObsDim);
  traj.actions.resize(t, kActDim);
  for (int i = 0; i <= t; ++i) traj.observations.row(i) = obs[i].transpose();
  for (int i = 0; i < t; ++i) traj.actions.row(i) = act[i].transpose();
}

Vector RoundF32(Vector v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = static_cast<float>(v[i]);
  return v;
}

}  // namespace

std::optional<Vector> GoalAction(const RoomState& s, const Goal& goal) {
  switch (goal.kind) {
    case Goal::Kind::kPickPlace: {
      const int k = goal.index;
      if (s.held == k) {
        if (kDrawerZone.Contains(goal.target) && !s.drawer_accessible()) return std::nullopt;
        if (Distance(s.effector, goal.target) <= kArrive) return Release();
        return MoveToward(s.effector, goal.target, 1.0);
      }
      if (Distance(s.blocks[k], goal.target) <= kPlaced) return std::nullopt;
      if (s.held >= 0) return Release();
      if (kDrawerZone.Contains(s.blocks[k]) && !s.drawer_accessible()) return std::nullopt;
      if (Distance(s.effector, s.blocks[k]) <= kArrive) return MakeAction(0.0, 0.0, 1.0, -1.0);
      return MoveToward(s.effector, s.blocks[k], -1.0);
    }
    case Goal::Kind::kToggle: {
      const Point sw = kSwitches[goal.index];
      if (s.lights[goal.index] == goal.value) return std::nullopt;
      if (s.held >= 0) return Release();
      if (Distance(s.effector, sw) <= kArrive) return MakeAction(0.0, 0.0, -1.0, 1.0);
      return MoveToward(s.effector, sw, -1.0);
    }
    case Goal::Kind::kDrawer: {
      const double desired = goal.value ? 1.0 : 0.0;
      if (std::abs(s.drawer - desired) < 1e-9) return std::nullopt;
      if (s.held >= 0) return Release();
      const Point h = s.handle();
      if (Distance(s.effector, h) <= kEngage) {
        return MakeAction(goal.value ? 1.0 : -1.0, Unit((h.y - s.effector.y) / kMaxStep), -1.0,
                          1.0);
      }
      return MoveToward(s.effector, h, -1.0);
    }
  }
  return std::nullopt;
}

Vector PerturbAction(const Vector& action, Rng& rng, double sigma) {
  Vector out = action;
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = Unit(out[i] + sigma * rng.Normal());
  return out;
}

TaskSolver::TaskSolver(const TaskSpec& task, Rng& rng) : task_(task) {
  for (int k = 0; k < kNumBlocks; ++k) {
    if (task.name == TaskName::kSettingUp) {
      targets_[k] = {kTableSlots[k].x + rng.Uniform(-0.03, 0.03),
                     kTableSlots[k].y + rng.Uniform(-0.03, 0.03)};
    } else {
      targets_[k] = {kDrawerSlots[k].x + rng.Uniform(-0.02, 0.02),
                     kDrawerSlots[k].y + rng.Uniform(-0.02, 0.02)};
    }
  }
}

std::optional<Goal> TaskSolver::NextGoal(const RoomState& s) const {
  if (s.held >= 0) return Goal{Goal::Kind::kPickPlace, s.held, targets_[s.held], false};
  if (task_.name == TaskName::kSettingUp) {
    for (int i = 0; i < kNumLights; ++i) {
      if (!s.lights[i]) return Goal{Goal::Kind::kToggle, i, {}, true};
    }
    for (int k = 0; k < kNumBlocks; ++k) {
      if (!kTableZone.Contains(s.blocks[k])) {
        return Goal{Goal::Kind::kPickPlace, k, targets_[k], false};
      }
    }
    return std::nullopt;
  }
  for (int k = 0; k < kNumBlocks; ++k) {
    if (!kDrawerZone.Contains(s.blocks[k])) {
      if (s.drawer < 1.0 - 1e-9) return Goal{Goal::Kind::kDrawer, 0, {}, true};
      return Goal{Goal::Kind::kPickPlace, k, targets_[k], false};
    }
  }
  if (s.drawer > 1e-9) return Goal{Goal::Kind::kDrawer, 0, {}, false};
  for (int i = 0; i < kNumLights; ++i) {
    if (s.lights[i]) return Goal{Goal::Kind::kToggle, i, {}, false};
  }
  return std::nullopt;
}

std::optional<Vector> TaskSolver::Act(const RoomState& s) const {
  if (task_.Success(s)) return std::nullopt;
  const auto goal = NextGoal(s);
  if (!goal) return MakeAction(0.0, 0.0, 0.0, 0.0);
  auto action = GoalAction(s, *goal);
  return action ? *action : MakeAction(0.0, 0.0, 0.0, 0.0);
}

Trajectory ScriptedPlay(Rng& rng, int steps, std::int64_t id) {
  if (steps < 1) throw std::invalid_argument("play trajectory needs at least one step");
  RoomState s = RandomPlayState(rng);
  std::vector<Vector> obs{Observe(s)};
  std::vector<Vector> act;
  Goal goal = SamplePlayGoal(s, rng);
  int goal_steps = 0;
  while (static_cast<int>(act.size()) < steps) {
    const auto a = GoalAction(s, goal);
    if (!a || goal_steps >= kPlayGoalCap) {
      goal = SamplePlayGoal(s, rng);
      goal_steps = 0;
      continue;
    }
    const Vector noisy = RoundF32(PerturbAction(*a, rng));
    act.push_back(noisy);
    s = Step(s, noisy);
    obs.push_back(Observe(s));
    ++goal_steps;
  }
  Trajectory traj;
  traj.id = id;
  Record(traj, obs, act);
  return traj;
}

Trajectory ScriptedDemo(const TaskSpec& task, Rng& rng, std::int64_t id) {
  RoomState s = task.Reset(rng);
  const TaskSolver solver(task, rng);
  std::vector<Vector> obs{Observe(s)};
  std::vector<Vector> act;
  while (!task.Success(s)) {
    if (static_cast<int>(act.size()) >= task.budget) {
      throw std::runtime_error("scripted demo for " + TaskString(task.name) +
                               " exceeded its budget");
    }
    const Vector noisy = RoundF32(PerturbAction(*solver.Act(s), rng));
    act.push_back(noisy);
    s = Step(s, noisy);
    obs.push_back(Observe(s));
  }
  if (act.empty()) throw std::runtime_error("task already solved at reset");
  Trajectory traj;
  traj.id = id;
  Record(traj, obs, act);
  return traj;
}

PlayEvents CountEvents(const Trajectory& trajectory) {
  PlayEvents events;
  const Matrix& o = trajectory.observations;
  for (Eigen::Index t = 0; t + 1 < o.rows(); ++t) {
    for (int i = 0; i < kNumLights; ++i) {
      if (o(t, 9 + i) != o(t + 1, 9 + i)) ++events.light_toggles[i];
    }
    if (o(t, 11) != o(t + 1, 11)) ++events.drawer_moves;
    if (o(t, 12) < 0.5 && o(t + 1, 12) > 0.5) {
      const RoomState next = StateFromObservation(o.row(t + 1).transpose());
      if (next.held >= 0) ++events.grasps[next.held];
    }
  }
  return events;
}

TrajectoryDataset GeneratePlayDataset(std::uint64_t seed, int count, int steps) {
  TrajectoryDataset ds;
  ds.role = DatasetRole::kPrior;
  ds.obs_dim = kObsDim;
  ds.act_dim = kActDim;
  for (int i = 0; i < count; ++i) {
    Rng rng = Rng::ForStream(seed, "play/" + std::to_string(i));
    ds.trajectories.push_back(ScriptedPlay(rng, steps, i));
  }
  return ds;
}

TrajectoryDataset GenerateDemoDataset(const TaskSpec& task, std::uint64_t seed, int count) {
  TrajectoryDataset ds;
  ds.role = DatasetRole::kTarget;
  ds.obs_dim = kObsDim;
  ds.act_dim = kActDim;
  const std::string prefix = "demo/" + TaskString(task.name) + "/";
  for (int i = 0; i < count; ++i) {
    Rng rng = Rng::ForStream(seed, prefix + std::to_string(i));
    Trajectory t = ScriptedDemo(task, rng, i);
    if (!task.Success(StateFromObservation(t.observations.bottomRows(1).transpose()))) {
      throw std::runtime_error("generated demo " + std::to_string(i) + " does not solve " +
                               TaskString(task.name));
    }
    ds.trajectories.push_back(std::move(t));
  }
  return ds;
}

}  // namespace skillret::env
