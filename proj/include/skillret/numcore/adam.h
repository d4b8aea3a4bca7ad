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

#ifndef SKILLRET_NUMCORE_ADAM_H_
#define SKILLRET_NUMCORE_ADAM_H_

#include <cstdint>
#include <vector>

#include "skillret/numcore/tensor.h"

namespace skillret {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction over a fixed list of tensors, reading each
// tensor's grad. Entries whose gradient is exactly zero keep their value and
// moments, so a zero gradient is the identity for any optimizer state.
class Adam {
 public:
  Adam(std::vector<ParamTensor*> params, AdamOptions options);

  // Throws TrainingError on a non-finite gradient, before touching anything.
  void Step();

  std::int64_t step() const { return step_; }
  const AdamOptions& options() const { return options_; }
  const std::vector<Matrix>& first_moment() const { return m_; }
  const std::vector<Matrix>& second_moment() const { return v_; }

 private:
  std::vector<ParamTensor*> params_;
  AdamOptions options_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  std::int64_t step_ = 0;
};

// Every tensor of a set, in order.
std::vector<ParamTensor*> AllTensors(ParamSet& params);

}  // namespace skillret

#endif  // SKILLRET_NUMCORE_ADAM_H_
