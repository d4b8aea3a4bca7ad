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

#include "skillret/numcore/adam.h"

#include <cmath>
#include <string>

#include "skillret/errors.h"

namespace skillret {

Adam::Adam(std::vector<ParamTensor*> params, AdamOptions options)
    : params_(std::move(params)), options_(options) {
  if (!(options_.beta1 > 0.0 && options_.beta1 < 1.0 && options_.beta2 > 0.0 &&
        options_.beta2 < 1.0)) {
    throw ConfigError("Adam: betas must lie in (0, 1)");
  }
  if (!(options_.lr > 0.0) || !(options_.epsilon > 0.0)) {
    throw ConfigError("Adam: lr and epsilon must be positive");
  }
  for (ParamTensor* p : params_) {
    m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
  }
}

void Adam::Step() {
  for (ParamTensor* p : params_) {
    if (!p->grad.allFinite()) {
      throw TrainingError("Adam: non-finite gradient in " + p->name + " at step " +
                          std::to_string(step_ + 1));
    }
  }
  ++step_;
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    ParamTensor& p = *params_[k];
    double* value = p.value.data();
    const double* grad = p.grad.data();
    double* m = m_[k].data();
    double* v = v_[k].data();
    for (Eigen::Index i = 0; i < p.value.size(); ++i) {
      const double g = grad[i];
      if (g == 0.0) continue;
      m[i] = b1 * m[i] + (1.0 - b1) * g;
      v[i] = b2 * v[i] + (1.0 - b2) * g * g;
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      value[i] -= options_.lr * m_hat / (std::sqrt(v_hat) + options_.epsilon);
    }
  }
}

std::vector<ParamTensor*> AllTensors(ParamSet& params) {
  std::vector<ParamTensor*> out;
  for (std::size_t i = 0; i < params.num_tensors(); ++i) out.push_back(&params.tensor(i));
  return out;
}

}  // namespace skillret
