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

#include "skillret/data/sampling.h"

#include <algorithm>
#include <string>

#include "skillret/errors.h"

namespace skillret {

SubTrajectorySample ExtractSample(const TrajectoryDataset& dataset, const SampleSource& source,
                                  int horizon, int frames) {
  if (horizon < 1 || frames < 0) throw UsageError("need H >= 1 and F >= 0");
  if (source.trajectory < 0 ||
      source.trajectory >= static_cast<int>(dataset.trajectories.size())) {
    throw IntegrityError("sample source refers to missing trajectory " +
                         std::to_string(source.trajectory));
  }
  const Trajectory& traj = dataset.trajectories[source.trajectory];
  if (traj.id != source.trajectory_id) {
    throw IntegrityError("sample source expects trajectory id " +
                         std::to_string(source.trajectory_id) + ", dataset has " +
                         std::to_string(traj.id));
  }
  const int length = traj.length();
  if (source.start < 0 || source.start >= length) {
    throw IntegrityError("sample start " + std::to_string(source.start) +
                         " outside trajectory of length " + std::to_string(length));
  }

  SubTrajectorySample s;
  s.source = source;
  s.window_obs.resize(horizon + 1, dataset.obs_dim);
  s.window_actions = Matrix::Zero(horizon, dataset.act_dim);
  for (int k = 0; k <= horizon; ++k) {
    s.window_obs.row(k) = traj.observations.row(std::min(source.start + k, length));
  }
  const int real_actions = std::min(horizon, length - source.start);
  s.window_actions.topRows(real_actions) = traj.actions.middleRows(source.start, real_actions);
  s.frame_stack.resize(frames, dataset.obs_dim);
  for (int k = 0; k < frames; ++k) {
    s.frame_stack.row(k) = traj.observations.row(std::max(source.start - frames + 1 + k, 0));
  }
  return s;
}

SampleStream::SampleStream(const TrajectoryDataset& dataset, int horizon) : dataset_(&dataset) {
  if (dataset.trajectories.empty()) throw UsageError("cannot sample from an empty dataset");
  if (horizon < 1) throw UsageError("need H >= 1");
  for (int i = 0; i < static_cast<int>(dataset.trajectories.size()); ++i) {
    const int length = dataset.trajectories[i].length();
    if (length < horizon) continue;
    eligible_.push_back(i);
    offsets_.push_back(total_);
    total_ += length;
  }
  if (total_ == 0) throw UsageError("no trajectory is at least H steps long");
}

SampleSource SampleStream::At(std::int64_t position) const {
  if (position < 0 || position >= total_) throw UsageError("stream position out of range");
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), position);
  const auto k = static_cast<std::size_t>(it - offsets_.begin()) - 1;
  const int traj = eligible_[k];
  return {traj, dataset_->trajectories[traj].id, static_cast<int>(position - offsets_[k])};
}

SampleSource SampleStream::Draw(Rng& rng) const { return At(rng.UniformInt(0, total_ - 1)); }

SubTrajectorySample SampleSubtrajectory(const TrajectoryDataset& dataset, int horizon,
                                        int frames, Rng& rng) {
  if (frames < 0) throw UsageError("need F >= 0");
  const SampleStream stream(dataset, horizon);
  return ExtractSample(dataset, stream.Draw(rng), horizon, frames);
}

TemporalPair SampleTemporalPair(const SampleStream& stream, const TrajectoryDataset& dataset,
                                int horizon, int max_offset, Rng& rng) {
  if (max_offset < 1) throw UsageError("max_offset must be >= 1");
  const SampleSource first = stream.Draw(rng);
  const int drawn = static_cast<int>(rng.UniformInt(-max_offset, max_offset));
  const int length = dataset.trajectories[first.trajectory].length();
  SampleSource second = first;
  second.start = std::clamp(first.start + drawn, 0, length - 1);
  TemporalPair pair;
  pair.first = ExtractSample(dataset, first, horizon, 0);
  pair.second = ExtractSample(dataset, second, horizon, 0);
  pair.offset = second.start - first.start;
  return pair;
}

}  // namespace skillret
