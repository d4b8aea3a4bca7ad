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

#ifndef SKILLRET_DATA_TRAJECTORY_H_
#define SKILLRET_DATA_TRAJECTORY_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "skillret/numcore/tensor.h"

namespace skillret {

// One episode: T+1 observations and T actions, o_0 a_0 o_1 ... o_T.
struct Trajectory {
  Matrix observations;  // (T+1) x obs_dim
  Matrix actions;       // T x act_dim
  std::int64_t id = 0;

  int length() const { return static_cast<int>(actions.rows()); }
};

enum class DatasetRole { kPrior, kTarget };

std::string RoleName(DatasetRole role);
DatasetRole ParseRole(const std::string& name);

struct TrajectoryDataset {
  std::vector<Trajectory> trajectories;
  DatasetRole role = DatasetRole::kPrior;
  int obs_dim = 0;
  int act_dim = 0;

  std::int64_t total_transitions() const;
  // Throws UsageError on an empty dataset and FormatError on inconsistent
  // shapes or non-finite values.
  void Validate() const;
};

// The first `count` trajectories (clamped to the dataset size, at least one).
TrajectoryDataset TakeFirst(const TrajectoryDataset& dataset, std::size_t count);
// The first ceil(fraction * n) trajectories; fraction in (0, 1].
TrajectoryDataset TakeFraction(const TrajectoryDataset& dataset, double fraction);

// Directory layout:
//   manifest.json   {version, role, obs_dim, act_dim,
//                    trajectories: [{id, file, length}]}
//   traj_NNNNNN.bin "SAL1" | u32 T | observations | actions
// with arrays as little-endian f32, row-major.
inline constexpr char kTrajectoryMagic[4] = {'S', 'A', 'L', '1'};
inline constexpr int kDatasetVersion = 1;

void WriteDataset(const TrajectoryDataset& dataset, const std::filesystem::path& dir);
// Throws FormatError naming the offending file.
TrajectoryDataset LoadDataset(const std::filesystem::path& dir);

// Per-dimension standardization fitted on one dataset and shared by all.
struct Normalizer {
  static constexpr double kMinStd = 1e-6;

  Vector obs_mean;
  Vector obs_std;
  Vector act_mean;
  Vector act_std;

  static Normalizer Fit(const TrajectoryDataset& dataset);
  static Normalizer Identity(int obs_dim, int act_dim);

  Matrix ApplyObs(const Matrix& rows) const;
  Matrix InvertObs(const Matrix& rows) const;
  Matrix ApplyAct(const Matrix& rows) const;
  Matrix InvertAct(const Matrix& rows) const;
  TrajectoryDataset Apply(const TrajectoryDataset& dataset) const;

  nlohmann::json ToJson() const;
  static Normalizer FromJson(const nlohmann::json& j);
};

}  // namespace skillret

#endif  // SKILLRET_DATA_TRAJECTORY_H_
