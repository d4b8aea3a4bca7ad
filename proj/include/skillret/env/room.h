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

#ifndef SKILLRET_ENV_ROOM_H_
#define SKILLRET_ENV_ROOM_H_

#include <array>
#include <optional>
#include <string>

#include "skillret/numcore/rng.h"
#include "skillret/numcore/tensor.h"

namespace skillret::env {

inline constexpr int kNumBlocks = 3;
inline constexpr int kNumLights = 2;
inline constexpr int kObsDim = 13;
inline constexpr int kActDim = 4;

inline constexpr double kMaxStep = 0.05;
inline constexpr double kGraspRadius = 0.08;
inline constexpr double kInteractRadius = 0.05;
inline constexpr double kDrawerStep = 0.1;
// Blocks can be grasped or released inside the drawer only when it is at
// least this open.
inline constexpr double kDrawerAccessOpenness = 0.5;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double Distance(Point a, Point b);

struct Zone {
  double x0, y0, x1, y1;
  bool Contains(Point p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

inline constexpr Zone kDrawerZone{0.04, 0.04, 0.32, 0.32};
inline constexpr Zone kTableZone{0.40, 0.45, 0.95, 0.95};
inline constexpr std::array<Point, kNumLights> kSwitches{{{0.06, 0.60}, {0.06, 0.85}}};
// Nominal block placements inside each zone.
inline constexpr std::array<Point, 3> kDrawerSlots{{{0.10, 0.10}, {0.18, 0.24}, {0.26, 0.12}}};
inline constexpr std::array<Point, 3> kTableSlots{{{0.55, 0.60}, {0.70, 0.80}, {0.85, 0.60}}};
// The handle slides along y = kHandleY as the drawer opens.
inline constexpr double kHandleY = 0.10;
inline constexpr double kHandleClosedX = 0.40;
inline constexpr double kHandleTravel = 0.50;

struct RoomState {
  Point effector{0.5, 0.5};
  bool grip_closed = false;
  int held = -1;  // block index or -1
  std::array<Point, kNumBlocks> blocks{};
  std::array<bool, kNumLights> lights{};
  double drawer = 0.0;  // openness in [0, 1], multiples of 0.1

  Point handle() const { return {kHandleClosedX + kHandleTravel * drawer, kHandleY}; }
  bool drawer_accessible() const { return drawer >= kDrawerAccessOpenness - 1e-9; }
};

// Flat observation: effector(2) grip(1) blocks(6) lights(2) drawer(1)
// held-flag(1), rounded to f32 precision so live and recorded observations
// agree bit-for-bit.
Vector Observe(const RoomState& state);
RoomState StateFromObservation(const Vector& obs);

// Pure transition. Actions (dx, dy, grip, interact) are clamped to [-1, 1];
// non-finite components are treated as 0.
RoomState Step(const RoomState& state, const Vector& action);

enum class TaskName { kSettingUp, kCleaningUp };

std::string TaskString(TaskName task);
TaskName ParseTask(const std::string& name);

struct SubtaskFlags {
  std::array<bool, kNumLights> lights{};
  std::array<bool, kNumBlocks> blocks{};
  bool drawer = true;
};

struct TaskSpec {
  TaskName name = TaskName::kSettingUp;
  int budget = 300;

  RoomState Reset(Rng& rng) const;
  SubtaskFlags Subtasks(const RoomState& state) const;
  bool Success(const RoomState& state) const;
};

TaskSpec MakeTask(TaskName name);

}  // namespace skillret::env

#endif  // SKILLRET_ENV_ROOM_H_
