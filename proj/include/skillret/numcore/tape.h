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

#ifndef SKILLRET_NUMCORE_TAPE_H_
#define SKILLRET_NUMCORE_TAPE_H_

#include <functional>
#include <unordered_map>
#include <span>
#include <vector>

#include "skillret/numcore/tensor.h"

namespace skillret {

class Tape;

// Handle to a matrix-valued node recorded on a Tape. Cheap to copy; only
// valid while its tape is alive.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  Tape* tape() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

// Append-only record of a computation for reverse-mode differentiation.
// Nodes are stored in creation order, which is a valid topological order.
class Tape {
 public:
  // Receives the gradient of the loss w.r.t. this node's output.
  using BackwardFn = std::function<void(Tape&, const Matrix&)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var Constant(Matrix value);
  // Leaf bound to a parameter; Backward accumulates into param.grad. The
  // leaf aliases the parameter's storage, and repeated calls for the same
  // parameter return the same node.
  Var Param(ParamTensor& param);
  // Leaf that is not a parameter but whose gradient can be queried.
  Var Input(Matrix value);

  Var Record(Matrix value, std::vector<int> parents, BackwardFn backward);

  // Reverse sweep from a 1x1 loss. Parameter gradients are accumulated
  // (not overwritten). Throws TrainingError if the loss is not finite.
  void Backward(Var loss);

  const Matrix& value(int id) const {
    const Node& n = nodes_[id];
    return n.param != nullptr ? n.param->value : n.value;
  }
  bool requires_grad(int id) const { return nodes_[id].requires_grad; }
  // Gradient of the last Backward w.r.t. a node; zeros if unreached.
  Matrix grad(Var v) const;

  void Accumulate(int id, const Matrix& g);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    std::vector<int> parents;
    BackwardFn backward;
    ParamTensor* param = nullptr;
    bool requires_grad = false;
  };
  std::vector<Node> nodes_;
  std::unordered_map<const ParamTensor*, int> param_nodes_;
};

// Differentiable operations. Binary elementwise ops require equal shapes.
Var MatMul(Var a, Var b);
Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);  // elementwise
Var operator-(Var a);
Var Scale(Var a, double s);
Var AddScalar(Var a, double s);
// Adds a 1 x m row to every row of an n x m matrix.
Var AddRow(Var a, Var row);
Var Tanh(Var a);
Var Sigmoid(Var a);
Var Exp(Var a);
Var Square(Var a);
// Elementwise clamp; gradient passes only where the input is inside.
Var Clamp(Var a, double lo, double hi);
Var ConcatCols(std::span<const Var> parts);
Var SliceCols(Var a, int start, int count);
Var Sum(Var a);
Var Mean(Var a);
// n x m -> n x 1.
Var RowSum(Var a);

}  // namespace skillret

#endif  // SKILLRET_NUMCORE_TAPE_H_
