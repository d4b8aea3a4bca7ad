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

#ifndef SKILLRET_SKILL_SKILL_MODEL_H_
#define SKILLRET_SKILL_SKILL_MODEL_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "skillret/data/sampling.h"
#include "skillret/numcore/checkpoint.h"
#include "skillret/numcore/gaussian.h"
#include "skillret/numcore/layers.h"
#include "skillret/numcore/rng.h"

namespace skillret {

struct SkillModelConfig {
  int obs_dim = 13;
  int act_dim = 4;
  int horizon = 10;
  int latent_dim = 16;
  int rnn_hidden = 64;
  int rnn_layers = 2;
  std::vector<int> mlp_hidden{64, 64};    // encoder and decoder heads
  std::vector<int> prior_hidden{64, 64};
  std::vector<int> tp_hidden{64, 64};

  nlohmann::json ToJson() const;
  static SkillModelConfig FromJson(const nlohmann::json& j);
  // Content hash of the architecture; checkpoints carry it.
  std::string Fingerprint() const;
};

enum class KlReduction { kSum, kMean };

struct SkillLossWeights {
  double beta = 1e-5;
  double alpha = 1e-6;
  KlReduction kl_reduction = KlReduction::kSum;
};

// Time-major batch of windows, all normalized. obs[t] and actions[t] are
// batch x dim; obs has H+1 entries and actions H.
struct WindowBatch {
  std::vector<Matrix> obs;
  std::vector<Matrix> actions;

  int size() const { return obs.empty() ? 0 : static_cast<int>(obs[0].rows()); }
  static WindowBatch FromSamples(const std::vector<const SubTrajectorySample*>& samples);
};

// Pairs of windows with their signed start offsets plus the reparameterization
// noise for the first window of each pair.
struct SkillBatch {
  WindowBatch first;
  WindowBatch second;
  Matrix offsets;  // batch x 1
  Matrix noise;    // batch x latent_dim

  int size() const { return first.size(); }
  static SkillBatch FromPairs(const std::vector<TemporalPair>& pairs, Matrix noise);
};

struct SkillLossBreakdown {
  double recon = 0.0;
  double kl = 0.0;
  double tp = 0.0;
  double total = 0.0;
  double beta = 0.0;
  double alpha = 0.0;
};

// Encoder q (recurrent, window -> Gaussian), decoder p (recurrent, (z, o_t)
// -> a_t), learned prior (MLP, (o_0, o_H) -> Gaussian) and temporal
// prediction head (MLP, (mu1, mu2) -> offset).
class SkillModel {
 public:
  explicit SkillModel(const SkillModelConfig& config);

  const SkillModelConfig& config() const { return config_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }

  void Initialize(Rng& rng) { InitUniformFanIn(params_, rng); }

  // Tensors trained at the VAE rate and at the temporal-prediction rate.
  std::vector<ParamTensor*> VaeTensors();
  std::vector<ParamTensor*> TpTensors();

  // Throws UsageError unless the batch has exactly H steps.
  GaussianVar Encode(Tape& tape, const WindowBatch& batch) const;
  DiagGaussian Encode(const SubTrajectorySample& window) const;
  // Encodes many windows in chunks; row i is the mean of window i.
  std::vector<DiagGaussian> EncodeAll(const std::vector<const SubTrajectorySample*>& windows,
                                      int chunk = 256) const;

  LstmState DecoderInitialState(Tape& tape, int batch) const;
  // One closed-loop decoder step; returns the action and threads the state.
  Var DecodeStep(Tape& tape, Var z, Var obs, LstmState& state) const;
  // Teacher-forced decode of the whole window, one action per step.
  std::vector<Var> DecodeWindow(Tape& tape, Var z, const WindowBatch& batch) const;

  GaussianVar Prior(Tape& tape, Var first_obs, Var last_obs) const;
  Var PredictOffset(Tape& tape, Var mean_a, Var mean_b) const;
  double PredictOffset(const Vector& mean_a, const Vector& mean_b) const;

  struct LossVars {
    Var total;
    SkillLossBreakdown values;
  };
  LossVars Loss(Tape& tape, const SkillBatch& batch, const SkillLossWeights& weights) const;
  SkillLossBreakdown Loss(const SkillBatch& batch, const SkillLossWeights& weights) const;

 private:
  SkillModelConfig config_;
  ParamSet params_;
  Lstm encoder_rnn_;
  Mlp encoder_head_;
  Lstm decoder_rnn_;
  Mlp decoder_head_;
  Mlp prior_;
  Mlp tp_head_;
};

}  // namespace skillret

#endif  // SKILLRET_SKILL_SKILL_MODEL_H_
