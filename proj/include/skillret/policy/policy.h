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


#ifndef SKILLRET_POLICY_POLICY_H_
#define SKILLRET_POLICY_POLICY_H_

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "skillret/data/trajectory.h"
#include "skillret/numcore/checkpoint.h"
#include "skillret/numcore/layers.h"
#include "skillret/numcore/rng.h"

namespace skillret {

inline constexpr int kNumDatasetIds = 2;

// Time-major frame stacks: frames[k] is batch x obs_dim, oldest first.
struct FrameBatch {
  std::vector<Matrix> frames;

  int size() const { return frames.empty() ? 0 : static_cast<int>(frames[0].rows()); }
  // Each stack is F x obs_dim; all must agree.
  static FrameBatch FromStacks(const std::vector<const Matrix*>& stacks);
};

struct SkillPolicyConfig {
  int obs_dim = 13;
  int latent_dim = 16;
  int frames = 10;
  int rnn_hidden = 64;
  int rnn_layers = 2;

  nlohmann::json ToJson() const;
  static SkillPolicyConfig FromJson(const nlohmann::json& j);
  std::string Fingerprint() const;
};

// Recurrent policy over the frame stack, each frame extended with a one-hot
// dataset id, followed by a linear map to a latent skill. The recurrent
// state starts from zero for every stack.
class SkillPolicy {
 public:
  explicit SkillPolicy(const SkillPolicyConfig& config);

  const SkillPolicyConfig& config() const { return config_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }
  void Initialize(Rng& rng) { InitUniformFanIn(params_, rng); }

  // Throws UsageError on a wrong frame count, width or dataset id.
  Var Forward(Tape& tape, const FrameBatch& batch, const std::vector<int>& dataset_ids) const;
  Vector Forward(const Matrix& frame_stack, int dataset_id) const;

 private:
  SkillPolicyConfig config_;
  ParamSet params_;
  Lstm rnn_;
  Linear head_;
};

// mean((z_hat - z)^2) + gamma * mean((z_hat_r - z_r)^2). The retrieval term
// is left out when z_hat_r is not valid.
Var PolicyLoss(Var z_hat, Var z, Var z_hat_r, Var z_r, double gamma);
struct PolicyLossValues {
  double target = 0.0;
  double retrieval = 0.0;
  double total = 0.0;
};
PolicyLossValues PolicyLoss(const Matrix& z_hat, const Matrix& z, const Matrix& z_hat_r,
                            const Matrix& z_r, double gamma);

struct BcPolicyConfig {
  int obs_dim = 13;
  int act_dim = 4;
  int frames = 10;
  int rnn_hidden = 64;
  int rnn_layers = 2;

  nlohmann::json ToJson() const;
  static BcPolicyConfig FromJson(const nlohmann::json& j);
  std::string Fingerprint() const;
};

// Recurrent action regressor over the frame stack (the BC-RNN baseline).
class BcPolicy {
 public:
  explicit BcPolicy(const BcPolicyConfig& config);

  const BcPolicyConfig& config() const { return config_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }
  void Initialize(Rng& rng) { InitUniformFanIn(params_, rng); }

  Var Forward(Tape& tape, const FrameBatch& batch) const;
  Vector Forward(const Matrix& frame_stack) const;

 private:
  BcPolicyConfig config_;
  ParamSet params_;
  Lstm rnn_;
  Linear head_;
};

Checkpoint MakePolicyCheckpoint(const SkillPolicy& policy, const Normalizer& normalizer,
                                nlohmann::json meta = nlohmann::json::object());
Checkpoint MakeBcCheckpoint(const BcPolicy& policy, const Normalizer& normalizer,
                            nlohmann::json meta = nlohmann::json::object());

struct LoadedPolicy {
  std::unique_ptr<SkillPolicy> policy;
  Normalizer normalizer;
  nlohmann::json meta;
};
struct LoadedBc {
  std::unique_ptr<BcPolicy> policy;
  Normalizer normalizer;
  nlohmann::json meta;
};
// Throw FormatError on a checkpoint of another kind or a stale fingerprint.
LoadedPolicy LoadPolicyCheckpoint(const Checkpoint& ckpt);
LoadedBc LoadBcCheckpoint(const Checkpoint& ckpt);

// F x obs_dim stack of the last `frames` entries of `history` (oldest
// first), padding before the start with the first entry.
Matrix StackFrames(const std::vector<Vector>& history, int frames);

}  // namespace skillret

#endif  // SKILLRET_POLICY_POLICY_H_
