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

#include "skillret/numcore/tensor.h"

#include <cmath>
#include <utility>

#include "skillret/errors.h"

namespace skillret {

std::pair<int, int> MatrixExtents(const std::vector<int>& shape) {
  if (shape.empty() || shape.size() > 2) {
    throw ConfigError("parameter shapes must be 1-D or 2-D");
  }
  for (int extent : shape) {
    if (extent <= 0) throw ConfigError("parameter extents must be positive");
  }
  if (shape.size() == 1) return {1, shape[0]};
  return {shape[0], shape[1]};
}

bool AllFinite(const Matrix& m) { return m.allFinite(); }

ParamTensor& ParamSet::Add(std::string name, std::vector<int> shape) {
  if (index_.contains(name)) {
    throw ConfigError("duplicate parameter name: " + name);
  }
  auto [rows, cols] = MatrixExtents(shape);
  auto tensor = std::make_unique<ParamTensor>();
  tensor->name = name;
  tensor->shape = std::move(shape);
  tensor->value = Matrix::Zero(rows, cols);
  tensor->grad = Matrix::Zero(rows, cols);
  tensor->fan_in = rows == 1 ? cols : rows;
  index_.emplace(std::move(name), tensors_.size());
  tensors_.push_back(std::move(tensor));
  return *tensors_.back();
}

ParamTensor* ParamSet::Find(std::string_view name) {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : tensors_[it->second].get();
}

const ParamTensor* ParamSet::Find(std::string_view name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : tensors_[it->second].get();
}

ParamTensor& ParamSet::at(std::string_view name) {
  ParamTensor* t = Find(name);
  if (t == nullptr) throw ConfigError("unknown parameter: " + std::string(name));
  return *t;
}

const ParamTensor& ParamSet::at(std::string_view name) const {
  const ParamTensor* t = Find(name);
  if (t == nullptr) throw ConfigError("unknown parameter: " + std::string(name));
  return *t;
}

std::size_t ParamSet::num_values() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t->size();
  return n;
}

void ParamSet::ZeroGrad() {
  for (auto& t : tensors_) t->grad.setZero();
}

std::vector<double> ParamSet::FlatValues() const {
  std::vector<double> out;
  out.reserve(num_values());
  for (const auto& t : tensors_) {
    out.insert(out.end(), t->value.data(), t->value.data() + t->value.size());
  }
  return out;
}

std::vector<double> ParamSet::FlatGrads() const {
  std::vector<double> out;
  out.reserve(num_values());
  for (const auto& t : tensors_) {
    out.insert(out.end(), t->grad.data(), t->grad.data() + t->grad.size());
  }
  return out;
}

void ParamSet::SetFlatValues(std::span<const double> values) {
  if (values.size() != num_values()) {
    throw ConfigError("flat value count does not match parameter set");
  }
  std::size_t offset = 0;
  for (auto& t : tensors_) {
    std::copy_n(values.data() + offset, t->value.size(), t->value.data());
    offset += t->value.size();
  }
}

void ParamSet::CopyValuesFrom(const ParamSet& other) {
  if (other.tensors_.size() != tensors_.size()) {
    throw ConfigError("parameter sets differ in tensor count");
  }
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    if (tensors_[i]->name != other.tensors_[i]->name ||
        tensors_[i]->shape != other.tensors_[i]->shape) {
      throw ConfigError("parameter sets differ at " + tensors_[i]->name);
    }
    tensors_[i]->value = other.tensors_[i]->value;
  }
}

}  // namespace skillret
