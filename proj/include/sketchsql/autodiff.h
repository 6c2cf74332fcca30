//
// Copyright 2026 The SketchSQL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Reverse-mode differentiation over dense double matrices.
//
// A Tape records one forward computation. Parameters enter as leaves that
// alias the parameter storage; Backward() accumulates into Parameter::grad.
// A tape is used by one thread; separate tapes may read the same parameters
// concurrently.

#ifndef SKETCHSQL_AUTODIFF_H_
#define SKETCHSQL_AUTODIFF_H_

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sketchsql {

class Rng;

namespace ad {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, Matrix v)
      : name(std::move(n)), value(std::move(v)), grad(Matrix::Zero(value.rows(), value.cols())) {}

  void ZeroGrad() { grad.setZero(); }
};

struct Var {
  int id = -1;
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var Constant(Matrix value);
  /// Leaf aliasing `p.value`; gradients accumulate into `p.grad`.
  Var Param(Parameter& p);
  /// Leaf aliasing `p.value` that takes no gradient.
  Var FrozenParam(const Parameter& p);

  const Matrix& value(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  /// `loss` must be 1x1. Seeds d(loss) = 1 and runs every recorded backward
  /// step in reverse order.
  void Backward(Var loss);

  // Linear algebra.
  Var MatMul(Var a, Var b);
  Var MatMulNT(Var a, Var b);  // a * b^T
  Var Add(Var a, Var b);
  Var AddRow(Var x, Var row);  // adds a 1 x n row to every row of x
  Var Mul(Var a, Var b);
  Var Scale(Var a, double s);
  Var Transpose(Var a);

  // Elementwise nonlinearities.
  Var Tanh(Var a);
  Var Gelu(Var a);  // tanh approximation

  Var SoftmaxRows(Var a);
  /// Per-row normalization to zero mean and unit variance, then gain and bias
  /// (both 1 x n).
  Var LayerNorm(Var x, Var gain, Var bias, double eps = 1e-5);
  /// Zeroes each entry with probability p and rescales the rest by 1/(1-p).
  Var Dropout(Var a, double p, Rng& rng);

  // Shape manipulation.
  Var Rows(Var a, const std::vector<int>& rows);
  Var RowRange(Var a, int begin, int count);
  Var ColRange(Var a, int begin, int count);
  Var MeanRows(Var a, const std::vector<int>& rows);  // 1 x n
  Var ConcatRows(const std::vector<Var>& parts);
  Var ConcatCols(const std::vector<Var>& parts);

  // Scalars.
  Var Sum(const std::vector<Var>& scalars);
  /// -log softmax(logits)[target]; logits is a single row or column.
  Var CrossEntropy(Var logits, int target);
  /// Sum over entries of the logistic loss; targets in {0, 1}.
  Var BinaryCrossEntropy(Var logits, const std::vector<double>& targets);

 private:
  struct Node {
    Matrix value;
    const Matrix* ref = nullptr;  // parameter leaves alias their storage
    Matrix grad;
    Matrix* sink = nullptr;  // parameter gradient
    bool requires_grad = false;
    std::function<void()> backward;
  };

  Var Push(Matrix value, bool requires_grad);
  bool NeedsGrad(Var v) const { return nodes_[v.id].requires_grad; }
  // Gradient accumulator for `v`, zero-initialized on first use.
  Matrix& Grad(Var v);
  const Matrix& GradOf(int id) const { return nodes_[id].grad; }

  std::vector<Node> nodes_;
};

}  // namespace ad
}  // namespace sketchsql

#endif  // SKETCHSQL_AUTODIFF_H_
