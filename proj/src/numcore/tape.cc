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

#include "skillret/numcore/tape.h"

#include <cmath>
#include <string>
#include <utility>

#include "skillret/errors.h"

namespace skillret {
namespace {

void RequireSameTape(Var a, Var b) {
  if (a.tape() == nullptr || a.tape() != b.tape()) {
    throw ConfigError("operands recorded on different tapes");
  }
}

void RequireSameShape(Var a, Var b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ConfigError(std::string(op) + ": shape mismatch " +
                      std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                      " vs " + std::to_string(b.rows()) + "x" +
                      std::to_string(b.cols()));
  }
}

}  // namespace

const Matrix& Var::value() const { return tape_->value(id_); }

Var Tape::Constant(Matrix value) {
  Node node;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Param(ParamTensor& param) {
  if (auto it = param_nodes_.find(&param); it != param_nodes_.end()) return Var(this, it->second);
  param_nodes_.emplace(&param, static_cast<int>(nodes_.size()));
  Node node;
  node.param = &param;
  node.requires_grad = true;
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Input(Matrix value) {
  Node node;
  node.value = std::move(value);
  node.requires_grad = true;
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Record(Matrix value, std::vector<int> parents, BackwardFn backward) {
  Node node;
  node.value = std::move(value);
  for (int p : parents) {
    if (nodes_[p].requires_grad) {
      node.requires_grad = true;
      break;
    }
  }
  if (node.requires_grad) {
    node.parents = std::move(parents);
    node.backward = std::move(backward);
  }
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

void Tape::Accumulate(int id, const Matrix& g) {
  Node& node = nodes_[id];
  if (!node.requires_grad) return;
  if (node.grad.size() == 0) {
    node.grad = g;
  } else {
    node.grad += g;
  }
}

void Tape::Backward(Var loss) {
  if (loss.tape() != this) throw ConfigError("loss recorded on another tape");
  const Matrix& lv = loss.value();
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw ConfigError("Backward expects a 1x1 loss");
  }
  if (!std::isfinite(lv(0, 0))) {
    throw TrainingError("non-finite loss (" + std::to_string(lv(0, 0)) +
                        ") at tape node " + std::to_string(loss.id()) + " of " +
                        std::to_string(nodes_.size()));
  }
  for (auto& node : nodes_) node.grad.resize(0, 0);
  Accumulate(loss.id(), Matrix::Ones(1, 1));
  for (int id = loss.id(); id >= 0; --id) {
    Node& node = nodes_[id];
    if (node.grad.size() == 0) continue;
    if (node.param != nullptr) {
      node.param->grad += node.grad;
    } else if (node.backward) {
      // Closures only touch parents, never the node itself.
      Matrix g = std::move(node.grad);
      node.backward(*this, g);
      node.grad = std::move(g);
    }
  }
}

Matrix Tape::grad(Var v) const {
  const Node& node = nodes_[v.id()];
  if (node.grad.size() == 0) return Matrix::Zero(v.rows(), v.cols());
  return node.grad;
}

Var MatMul(Var a, Var b) {
  RequireSameTape(a, b);
  if (a.cols() != b.rows()) {
    throw ConfigError("MatMul: inner dimensions " + std::to_string(a.cols()) +
                      " and " + std::to_string(b.rows()) + " differ");
  }
  const int ia = a.id();
  const int ib = b.id();
  Tape& t = *a.tape();
  return t.Record(a.value() * b.value(), {ia, ib},
                  [ia, ib](Tape& t, const Matrix& g) {
                    if (t.requires_grad(ia)) {
                      t.Accumulate(ia, g * t.value(ib).transpose());
                    }
                    if (t.requires_grad(ib)) {
                      t.Accumulate(ib, t.value(ia).transpose() * g);
                    }
                  });
}

Var operator+(Var a, Var b) {
  RequireSameTape(a, b);
  RequireSameShape(a, b, "add");
  const int ia = a.id();
  const int ib = b.id();
  return a.tape()->Record(a.value() + b.value(), {ia, ib},
                          [ia, ib](Tape& t, const Matrix& g) {
                            t.Accumulate(ia, g);
                            t.Accumulate(ib, g);
                          });
}

Var operator-(Var a, Var b) {
  RequireSameTape(a, b);
  RequireSameShape(a, b, "sub");
  const int ia = a.id();
  const int ib = b.id();
  return a.tape()->Record(a.value() - b.value(), {ia, ib},
                          [ia, ib](Tape& t, const Matrix& g) {
                            t.Accumulate(ia, g);
                            t.Accumulate(ib, -g);
                          });
}

Var operator*(Var a, Var b) {
  RequireSameTape(a, b);
  RequireSameShape(a, b, "mul");
  const int ia = a.id();
  const int ib = b.id();
  return a.tape()->Record(
      a.value().cwiseProduct(b.value()), {ia, ib},
      [ia, ib](Tape& t, const Matrix& g) {
        if (t.requires_grad(ia)) t.Accumulate(ia, g.cwiseProduct(t.value(ib)));
        if (t.requires_grad(ib)) t.Accumulate(ib, g.cwiseProduct(t.value(ia)));
      });
}

Var operator-(Var a) { return Scale(a, -1.0); }

Var Scale(Var a, double s) {
  const int ia = a.id();
  return a.tape()->Record(a.value() * s, {ia},
                          [ia, s](Tape& t, const Matrix& g) { t.Accumulate(ia, g * s); });
}

Var AddScalar(Var a, double s) {
  const int ia = a.id();
  return a.tape()->Record(a.value().array() + s, {ia},
                          [ia](Tape& t, const Matrix& g) { t.Accumulate(ia, g); });
}

Var AddRow(Var a, Var row) {
  RequireSameTape(a, row);
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw ConfigError("AddRow: row must be 1 x " + std::to_string(a.cols()));
  }
  const int ia = a.id();
  const int ir = row.id();
  Matrix out = a.value();
  out.rowwise() += row.value().row(0);
  return a.tape()->Record(std::move(out), {ia, ir},
                          [ia, ir](Tape& t, const Matrix& g) {
                            t.Accumulate(ia, g);
                            if (t.requires_grad(ir)) t.Accumulate(ir, g.colwise().sum());
                          });
}

Var Tanh(Var a) {
  const int ia = a.id();
  Tape& t = *a.tape();
  // The closure reads this node's own output, which lands at index size().
  const int io = static_cast<int>(t.size());
  return t.Record(a.value().array().tanh().matrix(), {ia}, [ia, io](Tape& t, const Matrix& g) {
    const auto y = t.value(io).array();
    t.Accumulate(ia, (g.array() * (1.0 - y * y)).matrix());
  });
}

Var Sigmoid(Var a) {
  const int ia = a.id();
  Tape& t = *a.tape();
  const int io = static_cast<int>(t.size());
  Matrix y = (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
  return t.Record(std::move(y), {ia}, [ia, io](Tape& t, const Matrix& g) {
    const auto s = t.value(io).array();
    t.Accumulate(ia, (g.array() * s * (1.0 - s)).matrix());
  });
}

Var Exp(Var a) {
  const int ia = a.id();
  Tape& t = *a.tape();
  const int io = static_cast<int>(t.size());
  return t.Record(a.value().array().exp().matrix(), {ia}, [ia, io](Tape& t, const Matrix& g) {
    t.Accumulate(ia, g.cwiseProduct(t.value(io)));
  });
}

Var Square(Var a) {
  const int ia = a.id();
  return a.tape()->Record(a.value().array().square().matrix(), {ia},
                          [ia](Tape& t, const Matrix& g) {
                            t.Accumulate(ia, (2.0 * g.array() * t.value(ia).array()).matrix());
                          });
}

Var Clamp(Var a, double lo, double hi) {
  const int ia = a.id();
  return a.tape()->Record(a.value().cwiseMax(lo).cwiseMin(hi), {ia},
                          [ia, lo, hi](Tape& t, const Matrix& g) {
                            const auto x = t.value(ia).array();
                            const auto inside = (x >= lo && x <= hi).cast<double>();
                            t.Accumulate(ia, (g.array() * inside).matrix());
                          });
}

Var ConcatCols(std::span<const Var> parts) {
  if (parts.empty()) throw ConfigError("ConcatCols: no parts");
  Tape& t = *parts[0].tape();
  const Eigen::Index rows = parts[0].rows();
  Eigen::Index cols = 0;
  std::vector<int> ids;
  std::vector<int> widths;
  for (const Var& p : parts) {
    if (p.tape() != &t) throw ConfigError("ConcatCols: mixed tapes");
    if (p.rows() != rows) throw ConfigError("ConcatCols: row count mismatch");
    ids.push_back(p.id());
    widths.push_back(static_cast<int>(p.cols()));
    cols += p.cols();
  }
  Matrix out(rows, cols);
  Eigen::Index offset = 0;
  for (const Var& p : parts) {
    out.middleCols(offset, p.cols()) = p.value();
    offset += p.cols();
  }
  return t.Record(std::move(out), ids, [ids, widths](Tape& t, const Matrix& g) {
    Eigen::Index off = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (t.requires_grad(ids[k])) t.Accumulate(ids[k], g.middleCols(off, widths[k]));
      off += widths[k];
    }
  });
}

Var SliceCols(Var a, int start, int count) {
  if (start < 0 || count < 0 || start + count > a.cols()) {
    throw ConfigError("SliceCols: range out of bounds");
  }
  const int ia = a.id();
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  return a.tape()->Record(a.value().middleCols(start, count), {ia},
                          [ia, rows, cols, start, count](Tape& t, const Matrix& g) {
                            Matrix full = Matrix::Zero(rows, cols);
                            full.middleCols(start, count) = g;
                            t.Accumulate(ia, full);
                          });
}

Var Sum(Var a) {
  const int ia = a.id();
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return a.tape()->Record(std::move(out), {ia},
                          [ia, rows, cols](Tape& t, const Matrix& g) {
                            t.Accumulate(ia, Matrix::Constant(rows, cols, g(0, 0)));
                          });
}

Var Mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  return Scale(Sum(a), 1.0 / n);
}

Var RowSum(Var a) {
  const int ia = a.id();
  const Eigen::Index cols = a.cols();
  return a.tape()->Record(a.value().rowwise().sum(), {ia},
                          [ia, cols](Tape& t, const Matrix& g) {
                            t.Accumulate(ia, g.replicate(1, cols));
                          });
}

}  // namespace skillret
