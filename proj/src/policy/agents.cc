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


#include "skillret/policy/agents.h"

#include <vector>

namespace skillret {
namespace {

// Normalized F-frame stack from the raw observation history.
Matrix NormalizedStack(std::span<const Vector> history, const Normalizer& normalizer,
                       int frames) {
  std::vector<Vector> h(history.begin(), history.end());
  return normalizer.ApplyObs(StackFrames(h, frames));
}

}  // namespace

SkillAgent::SkillAgent(const SkillPolicy& policy, const SkillModel& skill, Normalizer normalizer)
    : policy_(policy), skill_(skill), normalizer_(std::move(normalizer)) {}

void SkillAgent::SelectSkill(std::span<const Vector> history) {
  z_ = policy_.Forward(NormalizedStack(history, normalizer_, policy_.config().frames), 0);
  tape_ = std::make_unique<Tape>();
  state_ = skill_.DecoderInitialState(*tape_, 1);
  z_var_ = tape_->Constant(z_.transpose());
}

Vector SkillAgent::Act(const Vector& observation) {
  const Var obs = tape_->Constant(normalizer_.ApplyObs(observation.transpose()));
  const Var a = skill_.DecodeStep(*tape_, z_var_, obs, state_);
  return normalizer_.InvertAct(a.value()).row(0).transpose();
}

BcAgent::BcAgent(const BcPolicy& policy, Normalizer normalizer)
    : policy_(policy), normalizer_(std::move(normalizer)) {}

void BcAgent::SelectSkill(std::span<const Vector> history) {
  const Vector a = policy_.Forward(NormalizedStack(history, normalizer_, policy_.config().frames));
  action_ = normalizer_.InvertAct(a.transpose()).row(0).transpose();
}

Vector BcAgent::Act(const Vector&) { return action_; }

}  // namespace skillret
