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

#ifndef SKILLRET_NUMCORE_TENSOR_H_
#define SKILLRET_NUMCORE_TENSOR_H_

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace skillret {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// A named trainable array. One-dimensional shapes {n} are stored as 1 x n.
struct ParamTensor {
  std::string name;
  std::vector<int> shape;
  Matrix value;
  Matrix grad;
  // Input width of the layer owning this tensor; drives initialization.
  int fan_in = 0;

  std::size_t size() const { return static_cast<std::size_t>(value.size()); }
};

// Ordered collection of parameters. Insertion order is the serialization
// order, and tensor addresses stay stable for the lifetime of the set.
class ParamSet {
 public:
  ParamSet() = default;
  ParamSet(const ParamSet&) = delete;
  ParamSet& operator=(const ParamSet&) = delete;
  ParamSet(ParamSet&&) = default;
  ParamSet& operator=(ParamSet&&) = default;

  // Adds a zero-valued tensor. Throws ConfigError on duplicate names or
  // non-positive extents.
  ParamTensor& Add(std::string name, std::vector<int> shape);

  ParamTensor* Find(std::string_view name);
  const ParamTensor* Find(std::string_view name) const;
  ParamTensor& at(std::string_view name);
  const ParamTensor& at(std::string_view name) const;

  std::size_t num_tensors() const { return tensors_.size(); }
  std::size_t num_values() const;

  ParamTensor& tensor(std::size_t i) { return *tensors_[i]; }
  const ParamTensor& tensor(std::size_t i) const { return *tensors_[i]; }

  void ZeroGrad();

  std::vector<double> FlatValues() const;
  std::vector<double> FlatGrads() const;
  void SetFlatValues(std::span<const double> values);

  // Copies values tensor-by-tensor from `other`, which must have the same
  // names and shapes in the same order.
  void CopyValuesFrom(const ParamSet& other);

 private:
  std::vector<std::unique_ptr<ParamTensor>> tensors_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// Converts a declared shape to (rows, cols) of the backing matrix.
std::pair<int, int> MatrixExtents(const std::vector<int>& shape);

bool AllFinite(const Matrix& m);

}  // namespace skillret

#endif  // SKILLRET_NUMCORE_TENSOR_H_
