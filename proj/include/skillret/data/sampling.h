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

#ifndef SKILLRET_DATA_SAMPLING_H_
#define SKILLRET_DATA_SAMPLING_H_

#include <compare>
#include <cstdint>
#include <vector>

#include "skillret/data/trajectory.h"
#include "skillret/numcore/rng.h"

namespace skillret {

// Where a window was cut from: trajectory index within its dataset, that
// trajectory's id (to detect stale references) and the window's start step.
struct SampleSource {
  int trajectory = 0;
  std::int64_t trajectory_id = 0;
  int start = 0;

  auto operator<=>(const SampleSource&) const = default;
};

// An H-step window plus the F observations ending at its first observation.
struct SubTrajectorySample {
  Matrix window_obs;      // (H+1) x obs_dim
  Matrix window_actions;  // H x act_dim
  Matrix frame_stack;     // F x obs_dim, oldest first; last row is o_start
  SampleSource source;
};

// Cuts a window at (trajectory, start). Steps past the trajectory's end
// repeat its last observation with zero actions; frame-stack rows before
// step 0 repeat its first observation. Throws IntegrityError if the
// source does not fit the dataset.
SubTrajectorySample ExtractSample(const TrajectoryDataset& dataset, const SampleSource& source,
                                  int horizon, int frames);

// All trajectories concatenated into one stream of transitions. Trajectories
// shorter than the horizon are left out of the stream.
class SampleStream {
 public:
  SampleStream(const TrajectoryDataset& dataset, int horizon);

  std::int64_t size() const { return total_; }
  SampleSource At(std::int64_t position) const;
  SampleSource Draw(Rng& rng) const;

 private:
  const TrajectoryDataset* dataset_;
  std::vector<int> eligible_;
  std::vector<std::int64_t> offsets_;  // stream position of each eligible start
  std::int64_t total_ = 0;
};

SubTrajectorySample SampleSubtrajectory(const TrajectoryDataset& dataset, int horizon,
                                        int frames, Rng& rng);

struct TemporalPair {
  SubTrajectorySample first;
  SubTrajectorySample second;
  int offset = 0;  // second.start - first.start after clamping
};

// Draws the first window from the stream and an offset uniform on
// [-max_offset, max_offset]; the second start is clamped into [0, T-1] of
// the same trajectory and the offset recomputed from the actual starts.
TemporalPair SampleTemporalPair(const SampleStream& stream, const TrajectoryDataset& dataset,
                                int horizon, int max_offset, Rng& rng);

}  // namespace skillret

#endif  // SKILLRET_DATA_SAMPLING_H_
