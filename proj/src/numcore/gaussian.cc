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

#include "skillret/numcore/gaussian.h"

#include <cmath>

#include "skillret/errors.h"

namespace skillret {

DiagGaussian GaussianVar::Row(int i) const {
  return {mean.value().row(i).transpose(), log_std.value().row(i).transpose()};
}

GaussianVar GaussianFromHead(Var head, int latent_dim) {
  if (head.cols() != 2 * latent_dim) {
    throw ConfigError("Gaussian head must have width 2 * latent_dim");
  }
  return {SliceCols(head, 0, latent_dim),
          Clamp(SliceCols(head, latent_dim, latent_dim), kMinLogStd, kMaxLogStd)};
}

double GaussianKl(const DiagGaussian& q, const DiagGaussian& p) {
  if (q.dim() != p.dim() || q.log_std.size() != q.mean.size() ||
      p.log_std.size() != p.mean.size()) {
    throw ConfigError("gaussian_kl: dimension mismatch");
  }
  double kl = 0.0;
  for (int j = 0; j < q.dim(); ++j) {
    const double dm = q.mean[j] - p.mean[j];
    const double var_ratio = std::exp(2.0 * (q.log_std[j] - p.log_std[j]));
    kl += p.log_std[j] - q.log_std[j] +
          0.5 * (var_ratio + dm * dm * std::exp(-2.0 * p.log_std[j])) - 0.5;
  }
  // Rounding can leave tiny negatives when q ~= p.
  return kl < 0.0 ? 0.0 : kl;
}

Var GaussianKl(const GaussianVar& q, const GaussianVar& p) {
  if (q.mean.cols() != p.mean.cols() || q.mean.rows() != p.mean.rows()) {
    throw ConfigError("gaussian_kl: dimension mismatch");
  }
  Var log_ratio = p.log_std - q.log_std;
  Var var_ratio = Exp(Scale(q.log_std - p.log_std, 2.0));
  Var diff = q.mean - p.mean;
  Var mahal = Square(diff) * Exp(Scale(p.log_std, -2.0));
  Var per_dim = AddScalar(log_ratio + Scale(var_ratio + mahal, 0.5), -0.5);
  return RowSum(per_dim);
}

Vector ReparamSample(const DiagGaussian& q, const Vector& noise) {
  if (noise.size() != q.mean.size()) throw ConfigError("reparam_sample: noise dimension");
  return q.mean + (q.log_std.array().exp() * noise.array()).matrix();
}

Var ReparamSample(const GaussianVar& q, const Matrix& noise) {
  if (noise.rows() != q.mean.rows() || noise.cols() != q.mean.cols()) {
    throw ConfigError("reparam_sample: noise dimension");
  }
  Tape& t = *q.mean.tape();
  return q.mean + Exp(q.log_std) * t.Constant(noise);
}

double SymmetricKlDistance(const DiagGaussian& a, const DiagGaussian& b) {
  return 0.5 * (GaussianKl(a, b) + GaussianKl(b, a));
}

}  // namespace skillret
