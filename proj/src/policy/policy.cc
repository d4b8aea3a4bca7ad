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


#include "skillret/policy/policy.h"

#include <cstdio>

#include "skillret/errors.h"

namespace skillret {
namespace {

std::string HashTag(const std::string& prefix, const nlohmann::json& j) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(Fnv1a64(prefix + j.dump())));
  return buf;
}

template <typename Config>
Config ConfigFromJson(const nlohmann::json& j, const char* what) {
  Config c;
  try {
    c.obs_dim = j.at("obs_dim").get<int>();
    if constexpr (requires { c.latent_dim; }) c.latent_dim = j.at("latent_dim").get<int>();
    if constexpr (requires { c.act_dim; }) c.act_dim = j.at("act_dim").get<int>();
    c.frames = j.at("frames").get<int>();
    c.rnn_hidden = j.at("rnn_hidden").get<int>();
    c.rnn_layers = j.at("rnn_layers").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed ") + what + " config: " + e.what());
  }
  return c;
}

void CheckFrames(const FrameBatch& batch, int frames, int obs_dim) {
  if (static_cast<int>(batch.frames.size()) != frames) {
    throw UsageError("policy expects " + std::to_string(frames) + " frames, got " +
                     std::to_string(batch.frames.size()));
  }
  if (batch.frames[0].cols() != obs_dim) throw UsageError("policy frame width mismatch");
}

FrameBatch SingleStack(const Matrix& frame_stack) {
  return FrameBatch::FromStacks({&frame_stack});
}

}  // namespace

FrameBatch FrameBatch::FromStacks(const std::vector<const Matrix*>& stacks) {
  if (stacks.empty()) throw UsageError("empty frame batch");
  const auto frames = stacks[0]->rows();
  const auto dim = stacks[0]->cols();
  FrameBatch batch;
  batch.frames.assign(frames, Matrix(static_cast<Eigen::Index>(stacks.size()), dim));
  for (std::size_t i = 0; i < stacks.size(); ++i) {
    if (stacks[i]->rows() != frames || stacks[i]->cols() != dim) {
      throw UsageError("mixed frame-stack shapes in batch");
    }
    for (Eigen::Index k = 0; k < frames; ++k) {
      batch.frames[k].row(static_cast<Eigen::Index>(i)) = stacks[i]->row(k);
    }
  }
  return batch;
}

nlohmann::json SkillPolicyConfig::ToJson() const {
  return {{"obs_dim", obs_dim},       {"latent_dim", latent_dim}, {"frames", frames},
          {"rnn_hidden", rnn_hidden}, {"rnn_layers", rnn_layers}};
}

SkillPolicyConfig SkillPolicyConfig::FromJson(const nlohmann::json& j) {
  return ConfigFromJson<SkillPolicyConfig>(j, "skill policy");
}

std::string SkillPolicyConfig::Fingerprint() const { return HashTag("policy:", ToJson()); }

nlohmann::json BcPolicyConfig::ToJson() const {
  return {{"obs_dim", obs_dim},       {"act_dim", act_dim},       {"frames", frames},
          {"rnn_hidden", rnn_hidden}, {"rnn_layers", rnn_layers}};
}

BcPolicyConfig BcPolicyConfig::FromJson(const nlohmann::json& j) {
  return ConfigFromJson<BcPolicyConfig>(j, "bc policy");
}

std::string BcPolicyConfig::Fingerprint() const { return HashTag("bc:", ToJson()); }

SkillPolicy::SkillPolicy(const SkillPolicyConfig& config) : config_(config) {
  if (config.frames < 1) throw ConfigError("policy needs at least one frame");
  rnn_ = Lstm(params_, "policy.rnn", config.obs_dim + kNumDatasetIds, config.rnn_hidden,
              config.rnn_layers);
  head_ = Linear(params_, "policy.head", config.rnn_hidden, config.latent_dim);
}

Var SkillPolicy::Forward(Tape& tape, const FrameBatch& batch,
                         const std::vector<int>& dataset_ids) const {
  CheckFrames(batch, config_.frames, config_.obs_dim);
  const int b = batch.size();
  if (static_cast<int>(dataset_ids.size()) != b) throw UsageError("one dataset id per stack");
  Matrix one_hot = Matrix::Zero(b, kNumDatasetIds);
  for (int i = 0; i < b; ++i) {
    if (dataset_ids[i] < 0 || dataset_ids[i] >= kNumDatasetIds) {
      throw UsageError("dataset id must be 0 or 1");
    }
    one_hot(i, dataset_ids[i]) = 1.0;
  }
  const Var id = tape.Constant(std::move(one_hot));
  std::vector<Var> inputs;
  inputs.reserve(batch.frames.size());
  for (const Matrix& f : batch.frames) {
    const Var parts[] = {tape.Constant(f), id};
    inputs.push_back(ConcatCols(parts));
  }
  const auto seq = rnn_.Forward(tape, inputs, rnn_.ZeroState(tape, b));
  return head_.Forward(tape, seq.final_state.h.back());
}

Vector SkillPolicy::Forward(const Matrix& frame_stack, int dataset_id) const {
  Tape tape;
  return Forward(tape, SingleStack(frame_stack), {dataset_id}).value().row(0).transpose();
}

Var PolicyLoss(Var z_hat, Var z, Var z_hat_r, Var z_r, double gamma) {
  if (gamma < 0.0) throw UsageError("gamma must be >= 0");
  Var loss = Mean(Square(z_hat - z));
  if (z_hat_r.valid()) loss = loss + Scale(Mean(Square(z_hat_r - z_r)), gamma);
  return loss;
}

PolicyLossValues PolicyLoss(const Matrix& z_hat, const Matrix& z, const Matrix& z_hat_r,
                            const Matrix& z_r, double gamma) {
  if (gamma < 0.0) throw UsageError("gamma must be >= 0");
  PolicyLossValues v;
  v.target = (z_hat - z).array().square().mean();
  if (z_hat_r.size() > 0) v.retrieval = (z_hat_r - z_r).array().square().mean();
  v.total = v.target + gamma * v.retrieval;
  return v;
}

BcPolicy::BcPolicy(const BcPolicyConfig& config) : config_(config) {
  if (config.frames < 1) throw ConfigError("policy needs at least one frame");
  rnn_ = Lstm(params_, "bc.rnn", config.obs_dim, config.rnn_hidden, config.rnn_layers);
  head_ = Linear(params_, "bc.head", config.rnn_hidden, config.act_dim);
}

Var BcPolicy::Forward(Tape& tape, const FrameBatch& batch) const {
  CheckFrames(batch, config_.frames, config_.obs_dim);
  std::vector<Var> inputs;
  inputs.reserve(batch.frames.size());
  for (const Matrix& f : batch.frames) inputs.push_back(tape.Constant(f));
  const auto seq = rnn_.Forward(tape, inputs, rnn_.ZeroState(tape, batch.size()));
  return head_.Forward(tape, seq.final_state.h.back());
}

Vector BcPolicy::Forward(const Matrix& frame_stack) const {
  Tape tape;
  return Forward(tape, SingleStack(frame_stack)).value().row(0).transpose();
}

Checkpoint MakePolicyCheckpoint(const SkillPolicy& policy, const Normalizer& normalizer,
                                nlohmann::json meta) {
  Checkpoint ckpt = CaptureCheckpoint(policy.params());
  ckpt.fingerprint = policy.config().Fingerprint();
  ckpt.normalizer = normalizer.ToJson();
  meta["kind"] = "policy";
  meta["model"] = policy.config().ToJson();
  ckpt.meta = std::move(meta);
  return ckpt;
}

Checkpoint MakeBcCheckpoint(const BcPolicy& policy, const Normalizer& normalizer,
                            nlohmann::json meta) {
  Checkpoint ckpt = CaptureCheckpoint(policy.params());
  ckpt.fingerprint = policy.config().Fingerprint();
  ckpt.normalizer = normalizer.ToJson();
  meta["kind"] = "bc";
  meta["model"] = policy.config().ToJson();
  ckpt.meta = std::move(meta);
  return ckpt;
}

LoadedPolicy LoadPolicyCheckpoint(const Checkpoint& ckpt) {
  if (!ckpt.meta.is_object() || ckpt.meta.value("kind", "") != "policy") {
    throw FormatError("not a skill-policy checkpoint");
  }
  const auto config = SkillPolicyConfig::FromJson(ckpt.meta.at("model"));
  if (config.Fingerprint() != ckpt.fingerprint) {
    throw FormatError("policy checkpoint fingerprint does not match its stored architecture");
  }
  LoadedPolicy out;
  out.policy = std::make_unique<SkillPolicy>(config);
  RestoreCheckpoint(ckpt, out.policy->params());
  out.normalizer = Normalizer::FromJson(ckpt.normalizer);
  out.meta = ckpt.meta;
  return out;
}

LoadedBc LoadBcCheckpoint(const Checkpoint& ckpt) {
  if (!ckpt.meta.is_object() || ckpt.meta.value("kind", "") != "bc") {
    throw FormatError("not a BC checkpoint");
  }
  const auto config = BcPolicyConfig::FromJson(ckpt.meta.at("model"));
  if (config.Fingerprint() != ckpt.fingerprint) {
    throw FormatError("BC checkpoint fingerprint does not match its stored architecture");
  }
  LoadedBc out;
  out.policy = std::make_unique<BcPolicy>(config);
  RestoreCheckpoint(ckpt, out.policy->params());
  out.normalizer = Normalizer::FromJson(ckpt.normalizer);
  out.meta = ckpt.meta;
  return out;
}

Matrix StackFrames(const std::vector<Vector>& history, int frames) {
  if (history.empty()) throw UsageError("cannot stack frames of an empty history");
  const auto n = static_cast<int>(history.size());
  Matrix out(frames, history[0].size());
  for (int k = 0; k < frames; ++k) {
    const int src = n - frames + k;
    out.row(k) = history[src < 0 ? 0 : src].transpose();
  }
  return out;
}

}  // namespace skillret
