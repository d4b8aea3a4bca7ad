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

#include "skillret/env/room.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skillret/errors.h"

namespace skillret::env {
namespace {

double F32(double v) { return static_cast<double>(static_cast<float>(v)); }

double ClampUnit(double v) { return std::clamp(v, 0.0, 1.0); }

double SanitizeAction(double v) {
  if (!std::isfinite(v)) return 0.0;
  return std::clamp(v, -1.0, 1.0);
}

std::array<int, kNumBlocks> Shuffled(Rng& rng) {
  std::array<int, kNumBlocks> order{0, 1, 2};
  for (int i = kNumBlocks - 1; i > 0; --i) {
    std::swap(order[i], order[rng.UniformInt(0, i)]);
  }
  return order;
}

}  // namespace

double Distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Vector Observe(const RoomState& s) {
  Vector obs(kObsDim);
  obs << s.effector.x, s.effector.y, s.grip_closed ? 1.0 : 0.0, s.blocks[0].x, s.blocks[0].y,
      s.blocks[1].x, s.blocks[1].y, s.blocks[2].x, s.blocks[2].y, s.lights[0] ? 1.0 : 0.0,
      s.lights[1] ? 1.0 : 0.0, s.drawer, s.held >= 0 ? 1.0 : 0.0;
  for (int i = 0; i < kObsDim; ++i) obs[i] = F32(obs[i]);
  return obs;
}

RoomState StateFromObservation(const Vector& obs) {
  if (obs.size() != kObsDim) throw UsageError("observation must have 13 entries");
  RoomState s;
  s.effector = {obs[0], obs[1]};
  s.grip_closed = obs[2] > 0.5;
  for (int k = 0; k < kNumBlocks; ++k) s.blocks[k] = {obs[3 + 2 * k], obs[4 + 2 * k]};
  s.lights = {obs[9] > 0.5, obs[10] > 0.5};
  s.drawer = std::round(obs[11] * 10.0) / 10.0;
  s.held = -1;
  if (obs[12] > 0.5) {
    // The held block is the one sitting on the effector.
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kNumBlocks; ++k) {
      const double d = Distance(s.blocks[k], s.effector);
      if (d < best) {
        best = d;
        s.held = k;
      }
    }
  }
  return s;
}

RoomState Step(const RoomState& state, const Vector& action) {
  if (action.size() != kActDim) throw UsageError("action must have 4 entries");
  const double dx = SanitizeAction(action[0]);
  const double dy = SanitizeAction(action[1]);
  const double grip = SanitizeAction(action[2]);
  const double interact = SanitizeAction(action[3]);
  RoomState s = state;

  if (interact > 0.5) {
    int nearest_switch = -1;
    double best = kInteractRadius;
    for (int i = 0; i < kNumLights; ++i) {
      const double d = Distance(s.effector, kSwitches[i]);
      if (d <= best) {
        best = d;
        nearest_switch = i;
      }
    }
    const double handle_dist = Distance(s.effector, s.handle());
    if (handle_dist <= best && handle_dist <= kInteractRadius) {
      if (dx > 0.25) {
        s.drawer = std::min(1.0, std::round((s.drawer + kDrawerStep) * 10.0) / 10.0);
      } else if (dx < -0.25) {
        s.drawer = std::max(0.0, std::round((s.drawer - kDrawerStep) * 10.0) / 10.0);
      }
    } else if (nearest_switch >= 0) {
      s.lights[nearest_switch] = !s.lights[nearest_switch];
    }
  }

  if (grip > 0.0) {
    s.grip_closed = true;
    if (s.held < 0) {
      double best = kGraspRadius;
      for (int k = 0; k < kNumBlocks; ++k) {
        const double d = Distance(s.effector, s.blocks[k]);
        const bool reachable = !kDrawerZone.Contains(s.blocks[k]) || s.drawer_accessible();
        if (d <= best && reachable) {
          best = d;
          s.held = k;
        }
      }
    }
  } else if (grip < 0.0) {
    const bool blocked = s.held >= 0 && kDrawerZone.Contains(s.effector) && !s.drawer_accessible();
    if (!blocked) {
      s.grip_closed = false;
      s.held = -1;
    }
  }

  s.effector.x = ClampUnit(s.effector.x + kMaxStep * dx);
  s.effector.y = ClampUnit(s.effector.y + kMaxStep * dy);
  if (s.held >= 0) s.blocks[s.held] = s.effector;
  return s;
}

std::string TaskString(TaskName task) {
  return task == TaskName::kSettingUp ? "setting_up" : "cleaning_up";
}

TaskName ParseTask(const std::string& name) {
  if (name == "setting_up") return TaskName::kSettingUp;
  if (name == "cleaning_up") return TaskName::kCleaningUp;
  throw UsageError("unknown task: " + name);
}

TaskSpec MakeTask(TaskName name) { return TaskSpec{name, 300}; }

RoomState TaskSpec::Reset(Rng& rng) const {
  RoomState s;
  s.effector = {0.5 + rng.Uniform(-0.05, 0.05), 0.5 + rng.Uniform(-0.05, 0.05)};
  const auto order = Shuffled(rng);
  if (name == TaskName::kSettingUp) {
    s.lights = {false, false};
    s.drawer = 1.0;
    for (int k = 0; k < kNumBlocks; ++k) {
      const Point slot = kDrawerSlots[order[k]];
      s.blocks[k] = {slot.x + rng.Uniform(-0.02, 0.02), slot.y + rng.Uniform(-0.02, 0.02)};
    }
  } else {
    s.lights = {true, true};
    s.drawer = 0.0;
    for (int k = 0; k < kNumBlocks; ++k) {
      const Point slot = kTableSlots[order[k]];
      s.blocks[k] = {slot.x + rng.Uniform(-0.03, 0.03), slot.y + rng.Uniform(-0.03, 0.03)};
    }
  }
  return s;
}

SubtaskFlags TaskSpec::Subtasks(const RoomState& s) const {
  SubtaskFlags f;
  const bool want_on = name == TaskName::kSettingUp;
  for (int i = 0; i < kNumLights; ++i) f.lights[i] = s.lights[i] == want_on;
  const Zone& goal = want_on ? kTableZone : kDrawerZone;
  for (int k = 0; k < kNumBlocks; ++k) f.blocks[k] = s.held != k && goal.Contains(s.blocks[k]);
  f.drawer = want_on || s.drawer <= 1e-9;
  return f;
}

bool TaskSpec::Success(const RoomState& s) const {
  const SubtaskFlags f = Subtasks(s);
  return std::ranges::all_of(f.lights, [](bool b) { return b; }) &&
         std::ranges::all_of(f.blocks, [](bool b) { return b; }) && f.drawer;
}

}  // namespace skillret::env
