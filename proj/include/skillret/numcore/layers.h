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

#ifndef SKILLRET_NUMCORE_LAYERS_H_
#define SKILLRET_NUMCORE_LAYERS_H_

#include <string>
#include <vector>

#include "skillret/numcore/rng.h"
#include "skillret/numcore/tape.h"
#include "skillret/numcore/tensor.h"

namespace skillret {

// Affine map y = x W + b with W stored as [in x out].
class Linear {
 public:
  Linear() = default;
  Linear(ParamSet& params, const std::string& name, int in, int out);

  Var Forward(Tape& tape, Var x) const;
  int in() const { return in_; }
  int out() const { return out_; }

  ParamTensor& weight() const { return *weight_; }
  ParamTensor& bias() const { return *bias_; }

 private:
  ParamTensor* weight_ = nullptr;
  ParamTensor* bias_ = nullptr;
  int in_ = 0;
  int out_ = 0;
};

// Stack of Linear layers with tanh between them and a linear output.
class Mlp {
 public:
  Mlp() = default;
  Mlp(ParamSet& params, const std::string& name, int in,
      const std::vector<int>& hidden, int out);

  // Throws ConfigError when x has the wrong width.
  Var Forward(Tape& tape, Var x) const;
  int in() const { return layers_.front().in(); }
  int out() const { return layers_.back().out(); }
  const std::vector<Linear>& layers() const { return layers_; }

 private:
  std::vector<Linear> layers_;
};

// Hidden and cell rows per layer, each batch x hidden.
struct LstmState {
  std::vector<Var> h;
  std::vector<Var> c;
};

// Stacked gated recurrent cell (input, forget, cell, output gates).
class Lstm {
 public:
  Lstm() = default;
  Lstm(ParamSet& params, const std::string& name, int in, int hidden,
       int num_layers);

  LstmState ZeroState(Tape& tape, int batch) const;
  // One time step through every layer; returns the new state. The top
  // layer's h is the step output.
  LstmState Step(Tape& tape, Var x, const LstmState& state) const;

  struct SequenceResult {
    std::vector<Var> outputs;
    LstmState final_state;
  };
  // Throws UsageError on an empty sequence, ConfigError on width mismatch.
  SequenceResult Forward(Tape& tape, const std::vector<Var>& inputs,
                         const LstmState& init) const;

  int in() const { return in_; }
  int hidden() const { return hidden_; }
  int num_layers() const { return static_cast<int>(cells_.size()); }

 private:
  // Gate pre-activations come from one matmul on [x, h].
  std::vector<Linear> cells_;
  int in_ = 0;
  int hidden_ = 0;
};

// Uniform(-sqrt(1/fan_in), +sqrt(1/fan_in)) for every tensor, where fan_in
// is the first dimension of weights and the width of biases' layer input.
void InitUniformFanIn(ParamSet& params, Rng& rng);

}  // namespace skillret

#endif  // SKILLRET_NUMCORE_LAYERS_H_
