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


#ifndef SKILLRET_POLICY_AGENTS_H_
#define SKILLRET_POLICY_AGENTS_H_

#include <memory>
#include <span>

#include "skillret/env/rollout.h"
#include "skillret/policy/policy.h"
#include "skillret/skill/skill_model.h"

namespace skillret {

// Closed-loop skill execution: each query feeds the last F observations to
// the policy with dataset id 0, then the decoder runs H steps from a fresh
// recurrent state using its mean action.
class SkillAgent : public env::Controller {
 public:
  SkillAgent(const SkillPolicy& policy, const SkillModel& skill, Normalizer normalizer);

  int horizon() const override { return skill_.config().horizon; }
  void SelectSkill(std::span<const Vector> history) override;
  Vector Act(const Vector& observation) override;

  const Vector& current_skill() const { return z_; }

 private:
  const SkillPolicy& policy_;
  const SkillModel& skill_;
  Normalizer normalizer_;
  Vector z_;
  std::unique_ptr<Tape> tape_;  // holds the decoder state of the running skill
  LstmState state_;
  Var z_var_;
};

// BC-RNN: one action per query, re-queried every step.
class BcAgent : public env::Controller {
 public:
  BcAgent(const BcPolicy& policy, Normalizer normalizer);

  int horizon() const override { return 1; }
  void SelectSkill(std::span<const Vector> history) override;
  Vector Act(const Vector& observation) override;

 private:
  const BcPolicy& policy_;
  Normalizer normalizer_;
  Vector action_;
};

}  // namespace skillret

#endif  // SKILLRET_POLICY_AGENTS_H_
