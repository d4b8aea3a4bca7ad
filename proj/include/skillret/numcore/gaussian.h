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

#ifndef SKILLRET_NUMCORE_GAUSSIAN_H_
#define SKILLRET_NUMCORE_GAUSSIAN_H_

#include "skillret/numcore/tape.h"
#include "skillret/numcore/tensor.h"

namespace skillret {

inline constexpr double kMinLogStd = -10.0;
inline constexpr double kMaxLogStd = 5.0;

// Diagonal Gaussian over a d-dimensional latent space.
struct DiagGaussian {
  Vector mean;
  Vector log_std;

  int dim() const { return static_cast<int>(mean.size()); }
};

// Batch of diagonal Gaussians on a tape, one distribution per row.
struct GaussianVar {
  Var mean;     // batch x d
  Var log_std;  // batch x d, already clamped

  DiagGaussian Row(int i) const;
};

// Splits a batch x 2d head output into mean and clamped log-std.
GaussianVar GaussianFromHead(Var head, int latent_dim);

// KL(q || p) in closed form. Throws ConfigError on dimension mismatch.
double GaussianKl(const DiagGaussian& q, const DiagGaussian& p);
// Per-row KL(q || p), batch x 1.
Var GaussianKl(const GaussianVar& q, const GaussianVar& p);

// z = mean + exp(log_std) * noise.
Vector ReparamSample(const DiagGaussian& q, const Vector& noise);
Var ReparamSample(const GaussianVar& q, const Matrix& noise);

// Average of forward and reverse KL.
double SymmetricKlDistance(const DiagGaussian& a, const DiagGaussian& b);

}  // namespace skillret

#endif  // SKILLRET_NUMCORE_GAUSSIAN_H_
