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

#include "skillret/numcore/layers.h"

#include <cmath>
#include <string>

#include "skillret/errors.h"

namespace skillret {

Linear::Linear(ParamSet& params, const std::string& name, int in, int out)
    : in_(in), out_(out) {
  if (in <= 0 || out <= 0) throw ConfigError("Linear " + name + ": widths must be positive");
  weight_ = &params.Add(name + ".weight", {in, out});
  bias_ = &params.Add(name + ".bias", {out});
  bias_->fan_in = in;
}

Var Linear::Forward(Tape& tape, Var x) const {
  if (x.cols() != in_) {
    throw ConfigError(weight_->name + ": expected input width " + std::to_string(in_) +
                      ", got " + std::to_string(x.cols()));
  }
  return AddRow(MatMul(x, tape.Param(*weight_)), tape.Param(*bias_));
}

Mlp::Mlp(ParamSet& params, const std::string& name, int in,
         const std::vector<int>& hidden, int out) {
  int width = in;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    layers_.emplace_back(params, name + ".l" + std::to_string(i), width, hidden[i]);
    width = hidden[i];
  }
  layers_.emplace_back(params, name + ".out", width, out);
}

Var Mlp::Forward(Tape& tape, Var x) const {
  Var h = x;
  for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
    h = Tanh(layers_[i].Forward(tape, h));
  }
  return layers_.back().Forward(tape, h);
}

Lstm::Lstm(ParamSet& params, const std::string& name, int in, int hidden, int num_layers)
    : in_(in), hidden_(hidden) {
  if (num_layers <= 0) throw ConfigError("Lstm " + name + ": needs at least one layer");
  int width = in;
  for (int l = 0; l < num_layers; ++l) {
    cells_.emplace_back(params, name + ".cell" + std::to_string(l), width + hidden, 4 * hidden);
    width = hidden;
  }
}

LstmState Lstm::ZeroState(Tape& tape, int batch) const {
  LstmState s;
  for (std::size_t l = 0; l < cells_.size(); ++l) {
    s.h.push_back(tape.Constant(Matrix::Zero(batch, hidden_)));
    s.c.push_back(tape.Constant(Matrix::Zero(batch, hidden_)));
  }
  return s;
}

LstmState Lstm::Step(Tape& tape, Var x, const LstmState& state) const {
  if (x.cols() != in_) {
    throw ConfigError("Lstm: expected input width " + std::to_string(in_) + ", got " +
                      std::to_string(x.cols()));
  }
  if (state.h.size() != cells_.size() || state.c.size() != cells_.size()) {
    throw ConfigError("Lstm: state has wrong layer count");
  }
  LstmState next;
  Var input = x;
  for (std::size_t l = 0; l < cells_.size(); ++l) {
    const Var parts[] = {input, state.h[l]};
    Var gates = cells_[l].Forward(tape, ConcatCols(parts));
    Var i = Sigmoid(SliceCols(gates, 0, hidden_));
    Var f = Sigmoid(SliceCols(gates, hidden_, hidden_));
    Var g = Tanh(SliceCols(gates, 2 * hidden_, hidden_));
    Var o = Sigmoid(SliceCols(gates, 3 * hidden_, hidden_));
    Var c = f * state.c[l] + i * g;
    Var h = o * Tanh(c);
    next.h.push_back(h);
    next.c.push_back(c);
    input = h;
  }
  return next;
}

Lstm::SequenceResult Lstm::Forward(Tape& tape, const std::vector<Var>& inputs,
                                   const LstmState& init) const {
  if (inputs.empty()) throw UsageError("Lstm: empty input sequence");
  SequenceResult result;
  LstmState state = init;
  for (const Var& x : inputs) {
    state = Step(tape, x, state);
    result.outputs.push_back(state.h.back());
  }
  result.final_state = std::move(state);
  return result;
}

void InitUniformFanIn(ParamSet& params, Rng& rng) {
  for (std::size_t k = 0; k < params.num_tensors(); ++k) {
    ParamTensor& t = params.tensor(k);
    const double bound = std::sqrt(1.0 / static_cast<double>(t.fan_in));
    for (Eigen::Index i = 0; i < t.value.size(); ++i) {
      t.value.data()[i] = rng.Uniform(-bound, bound);
    }
  }
}

}  // namespace skillret
