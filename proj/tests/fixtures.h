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


// Tiny models and random data shared by the unit tests and the acceptance
// suite.

#ifndef SKILLRET_TESTS_FIXTURES_H_
#define SKILLRET_TESTS_FIXTURES_H_

#include <vector>

#include "skillret/data/sampling.h"
#include "skillret/data/trajectory.h"
#include "skillret/numcore/rng.h"
#include "skillret/skill/skill_model.h"

namespace skillret::testing {

inline TrajectoryDataset RandomNormalDataset(Rng& rng, const std::vector<int>& lengths, int obs_dim,
                                             int act_dim, DatasetRole role = DatasetRole::kPrior) {
  TrajectoryDataset d;
  d.role = role;
  d.obs_dim = obs_dim;
  d.act_dim = act_dim;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    Trajectory t;
    t.id = static_cast<std::int64_t>(i);
    t.observations = rng.NormalMatrix(lengths[i] + 1, obs_dim);
    t.actions = rng.NormalMatrix(lengths[i], act_dim);
    d.trajectories.push_back(std::move(t));
  }
  return d;
}

// Under 2,000 parameters, two recurrent layers.
inline SkillModelConfig TinySkillConfig() {
  SkillModelConfig c;
  c.obs_dim = 3;
  c.act_dim = 2;
  c.horizon = 3;
  c.latent_dim = 2;
  c.rnn_hidden = 4;
  c.rnn_layers = 2;
  c.mlp_hidden = {5};
  c.prior_hidden = {5};
  c.tp_hidden = {5};
  return c;
}

inline SkillBatch RandomSkillBatch(const SkillModelConfig& config, const TrajectoryDataset& data,
                                   int size, int max_offset, Rng& rng) {
  const SampleStream stream(data, config.horizon);
  std::vector<TemporalPair> pairs;
  for (int i = 0; i < size; ++i) {
    pairs.push_back(SampleTemporalPair(stream, data, config.horizon, max_offset, rng));
  }
  return SkillBatch::FromPairs(pairs, rng.NormalMatrix(size, config.latent_dim));
}

}  // namespace skillret::testing

#endif  // SKILLRET_TESTS_FIXTURES_H_
