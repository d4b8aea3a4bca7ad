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

#include "skillret/skill/skill_model.h"

#include <algorithm>
#include <cstdio>

#include "skillret/errors.h"
#include "skillret/numcore/adam.h"

namespace skillret {

nlohmann::json SkillModelConfig::ToJson() const {
  return {{"obs_dim", obs_dim},         {"act_dim", act_dim},
          {"horizon", horizon},         {"latent_dim", latent_dim},
          {"rnn_hidden", rnn_hidden},   {"rnn_layers", rnn_layers},
          {"mlp_hidden", mlp_hidden},   {"prior_hidden", prior_hidden},
          {"tp_hidden", tp_hidden}};
}

SkillModelConfig SkillModelConfig::FromJson(const nlohmann::json& j) {
  SkillModelConfig c;
  try {
    c.obs_dim = j.at("obs_dim").get<int>();
    c.act_dim = j.at("act_dim").get<int>();
    c.horizon = j.at("horizon").get<int>();
    c.latent_dim = j.at("latent_dim").get<int>();
    c.rnn_hidden = j.at("rnn_hidden").get<int>();
    c.rnn_layers = j.at("rnn_layers").get<int>();
    c.mlp_hidden = j.at("mlp_hidden").get<std::vector<int>>();
    c.prior_hidden = j.at("prior_hidden").get<std::vector<int>>();
    c.tp_hidden = j.at("tp_hidden").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed skill model config: ") + e.what());
  }
  return c;
}

std::string SkillModelConfig::Fingerprint() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(Fnv1a64("skill:" + ToJson().dump())));
  return buf;
}

WindowBatch WindowBatch::FromSamples(const std::vector<const SubTrajectorySample*>& samples) {
  if (samples.empty()) throw UsageError("empty window batch");
  const int b = static_cast<int>(samples.size());
  const auto steps = samples[0]->window_actions.rows();
  const auto obs_dim = samples[0]->window_obs.cols();
  const auto act_dim = samples[0]->window_actions.cols();
  WindowBatch batch;
  batch.obs.assign(steps + 1, Matrix(b, obs_dim));
  batch.actions.assign(steps, Matrix(b, act_dim));
  for (int i = 0; i < b; ++i) {
    const SubTrajectorySample& s = *samples[i];
    if (s.window_actions.rows() != steps) throw UsageError("mixed window lengths in batch");
    for (Eigen::Index t = 0; t <= steps; ++t) batch.obs[t].row(i) = s.window_obs.row(t);
    for (Eigen::Index t = 0; t < steps; ++t) batch.actions[t].row(i) = s.window_actions.row(t);
  }
  return batch;
}

SkillBatch SkillBatch::FromPairs(const std::vector<TemporalPair>& pairs, Matrix noise) {
  if (pairs.empty()) throw UsageError("skill batch must be nonempty");
  if (noise.rows() != static_cast<Eigen::Index>(pairs.size())) {
    throw UsageError("noise rows must match batch size");
  }
  std::vector<const SubTrajectorySample*> first;
  std::vector<const SubTrajectorySample*> second;
  SkillBatch batch;
  batch.offsets.resize(static_cast<Eigen::Index>(pairs.size()), 1);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    first.push_back(&pairs[i].first);
    second.push_back(&pairs[i].second);
    batch.offsets(static_cast<Eigen::Index>(i), 0) = pairs[i].offset;
  }
  batch.first = WindowBatch::FromSamples(first);
  batch.second = WindowBatch::FromSamples(second);
  batch.noise = std::move(noise);
  return batch;
}

SkillModel::SkillModel(const SkillModelConfig& config) : config_(config) {
  const auto& c = config_;
  if (c.obs_dim <= 0 || c.act_dim <= 0 || c.horizon <= 0 || c.latent_dim <= 0) {
    throw ConfigError("skill model dimensions must be positive");
  }
  encoder_rnn_ = Lstm(params_, "encoder.rnn", c.obs_dim + c.act_dim, c.rnn_hidden, c.rnn_layers);
  encoder_head_ = Mlp(params_, "encoder.head", c.rnn_hidden, c.mlp_hidden, 2 * c.latent_dim);
  decoder_rnn_ = Lstm(params_, "decoder.rnn", c.latent_dim + c.obs_dim, c.rnn_hidden, c.rnn_layers);
  decoder_head_ = Mlp(params_, "decoder.head", c.rnn_hidden, c.mlp_hidden, c.act_dim);
  prior_ = Mlp(params_, "prior", 2 * c.obs_dim, c.prior_hidden, 2 * c.latent_dim);
  tp_head_ = Mlp(params_, "tp", 2 * c.latent_dim, c.tp_hidden, 1);
}

std::vector<ParamTensor*> SkillModel::VaeTensors() {
  std::vector<ParamTensor*> out;
  for (ParamTensor* t : AllTensors(params_)) {
    if (!t->name.starts_with("tp.")) out.push_back(t);
  }
  return out;
}

std::vector<ParamTensor*> SkillModel::TpTensors() {
  std::vector<ParamTensor*> out;
  for (ParamTensor* t : AllTensors(params_)) {
    if (t->name.starts_with("tp.")) out.push_back(t);
  }
  return out;
}

GaussianVar SkillModel::Encode(Tape& tape, const WindowBatch& batch) const {
  if (static_cast<int>(batch.actions.size()) != config_.horizon ||
      static_cast<int>(batch.obs.size()) != config_.horizon + 1) {
    throw UsageError("encode expects windows of exactly " + std::to_string(config_.horizon) +
                     " steps");
  }
  std::vector<Var> inputs;
  inputs.reserve(batch.actions.size());
  for (std::size_t t = 0; t < batch.actions.size(); ++t) {
    const Var parts[] = {tape.Constant(batch.obs[t]), tape.Constant(batch.actions[t])};
    inputs.push_back(ConcatCols(parts));
  }
  const auto seq =
      encoder_rnn_.Forward(tape, inputs, encoder_rnn_.ZeroState(tape, batch.size()));
  return GaussianFromHead(encoder_head_.Forward(tape, seq.final_state.h.back()),
                          config_.latent_dim);
}

DiagGaussian SkillModel::Encode(const SubTrajectorySample& window) const {
  Tape tape;
  return Encode(tape, WindowBatch::FromSamples({&window})).Row(0);
}

std::vector<DiagGaussian> SkillModel::EncodeAll(
    const std::vector<const SubTrajectorySample*>& windows, int chunk) const {
  std::vector<DiagGaussian> out;
  out.reserve(windows.size());
  for (std::size_t begin = 0; begin < windows.size(); begin += chunk) {
    const std::size_t end = std::min(windows.size(), begin + static_cast<std::size_t>(chunk));
    std::vector<const SubTrajectorySample*> part(windows.begin() + begin, windows.begin() + end);
    Tape tape;
    const GaussianVar q = Encode(tape, WindowBatch::FromSamples(part));
    for (std::size_t i = 0; i < part.size(); ++i) out.push_back(q.Row(static_cast<int>(i)));
  }
  return out;
}

LstmState SkillModel::DecoderInitialState(Tape& tape, int batch) const {
  return decoder_rnn_.ZeroState(tape, batch);
}

Var SkillModel::DecodeStep(Tape& tape, Var z, Var obs, LstmState& state) const {
  if (z.cols() != config_.latent_dim) throw ConfigError("decode_step: z has wrong dimension");
  const Var parts[] = {z, obs};
  state = decoder_rnn_.Step(tape, ConcatCols(parts), state);
  return decoder_head_.Forward(tape, state.h.back());
}

std::vector<Var> SkillModel::DecodeWindow(Tape& tape, Var z, const WindowBatch& batch) const {
  LstmState state = DecoderInitialState(tape, batch.size());
  std::vector<Var> actions;
  for (std::size_t t = 0; t < batch.actions.size(); ++t) {
    actions.push_back(DecodeStep(tape, z, tape.Constant(batch.obs[t]), state));
  }
  return actions;
}

GaussianVar SkillModel::Prior(Tape& tape, Var first_obs, Var last_obs) const {
  const Var parts[] = {first_obs, last_obs};
  return GaussianFromHead(prior_.Forward(tape, ConcatCols(parts)), config_.latent_dim);
}

Var SkillModel::PredictOffset(Tape& tape, Var mean_a, Var mean_b) const {
  const Var parts[] = {mean_a, mean_b};
  return tp_head_.Forward(tape, ConcatCols(parts));
}

double SkillModel::PredictOffset(const Vector& mean_a, const Vector& mean_b) const {
  Tape tape;
  return PredictOffset(tape, tape.Constant(mean_a.transpose()), tape.Constant(mean_b.transpose()))
      .value()(0, 0);
}

SkillModel::LossVars SkillModel::Loss(Tape& tape, const SkillBatch& batch,
                                      const SkillLossWeights& weights) const {
  if (batch.size() == 0) throw UsageError("skill loss needs a nonempty batch");
  if (weights.beta < 0.0 || weights.alpha < 0.0) throw UsageError("beta and alpha must be >= 0");
  if (batch.noise.cols() != config_.latent_dim) throw ConfigError("noise has wrong dimension");

  const GaussianVar q = Encode(tape, batch.first);
  const GaussianVar q_shifted = Encode(tape, batch.second);
  const Var z = ReparamSample(q, batch.noise);

  const std::vector<Var> predicted = DecodeWindow(tape, z, batch.first);
  std::vector<Var> sq_errors;
  for (std::size_t t = 0; t < predicted.size(); ++t) {
    sq_errors.push_back(Square(predicted[t] - tape.Constant(batch.first.actions[t])));
  }
  const Var recon = Mean(ConcatCols(sq_errors));

  const GaussianVar prior =
      Prior(tape, tape.Constant(batch.first.obs.front()), tape.Constant(batch.first.obs.back()));
  Var kl = Mean(GaussianKl(q, prior));
  if (weights.kl_reduction == KlReduction::kMean) kl = Scale(kl, 1.0 / config_.latent_dim);

  const Var predicted_offset = PredictOffset(tape, q.mean, q_shifted.mean);
  const Var tp = Mean(Square(predicted_offset - tape.Constant(batch.offsets)));

  Var total = recon + Scale(kl, weights.beta);
  // With alpha = 0 the objective is exactly the TP-free one.
  if (weights.alpha != 0.0) total = total + Scale(tp, weights.alpha);

  LossVars out;
  out.total = total;
  out.values = {recon.value()(0, 0), kl.value()(0, 0),      tp.value()(0, 0),
                total.value()(0, 0), weights.beta,          weights.alpha};
  return out;
}

SkillLossBreakdown SkillModel::Loss(const SkillBatch& batch,
                                    const SkillLossWeights& weights) const {
  Tape tape;
  return Loss(tape, batch, weights).values;
}

}  // namespace skillret
