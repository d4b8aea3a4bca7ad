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


// Shared helpers for the unit tests and the acceptance suite.

#ifndef SKILLRET_TESTS_TEST_UTIL_H_
#define SKILLRET_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "skillret/numcore/tensor.h"

namespace skillret::testing {

struct GradCheck {
  double max_error = 0.0;  // max |g - g_fd| / max(1, |g|)
  std::size_t checked = 0;
  std::string worst;
};

// Central differences of `loss` w.r.t. every value in `params`, compared to
// `analytic` (flattened in ParamSet order).
inline GradCheck CheckGradients(ParamSet& params, const std::function<double()>& loss,
                                const std::vector<double>& analytic, double step = 1e-5) {
  GradCheck out;
  std::size_t flat = 0;
  for (std::size_t t = 0; t < params.num_tensors(); ++t) {
    ParamTensor& p = params.tensor(t);
    for (Eigen::Index i = 0; i < p.value.size(); ++i, ++flat) {
      double& x = p.value.data()[i];
      const double saved = x;
      x = saved + step;
      const double up = loss();
      x = saved - step;
      const double down = loss();
      x = saved;
      const double fd = (up - down) / (2.0 * step);
      const double err = std::abs(analytic[flat] - fd) / std::max(1.0, std::abs(analytic[flat]));
      if (err > out.max_error) {
        out.max_error = err;
        out.worst = p.name + "[" + std::to_string(i) + "]";
      }
      ++out.checked;
    }
  }
  return out;
}

// Pearson chi-square statistic of observed counts against equal expected
// counts.
inline double ChiSquareUniform(const std::vector<long>& counts) {
  double total = 0.0;
  for (long c : counts) total += static_cast<double>(c);
  const double expected = total / static_cast<double>(counts.size());
  double chi2 = 0.0;
  for (long c : counts) chi2 += (c - expected) * (c - expected) / expected;
  return chi2;
}

// Upper critical value of chi-square with k degrees of freedom at tail
// probability 0.001, from the Wilson-Hilferty cube-root approximation.
inline double ChiSquareCritical001(int k) {
  const double z = 3.090232306167813;  // standard normal 0.999 quantile
  const double a = 2.0 / (9.0 * k);
  const double c = 1.0 - a + z * std::sqrt(a);
  return k * c * c * c;
}

}  // namespace skillret::testing

#endif  // SKILLRET_TESTS_TEST_UTIL_H_
