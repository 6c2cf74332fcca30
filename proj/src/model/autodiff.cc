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

#include "sketchsql/autodiff.h"

#include <cmath>
#include <stdexcept>

#include "sketchsql/random.h"

namespace sketchsql::ad {

namespace {

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)
constexpr double kGeluA = 0.044715;

void CheckSameShape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()));
  }
}

}  // namespace

Var Tape::Push(Matrix value, bool requires_grad) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::Constant(Matrix value) { return Push(std::move(value), false); }

Var Tape::Param(Parameter& p) {
  Node n;
  n.ref = &p.value;
  n.sink = &p.grad;
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::FrozenParam(const Parameter& p) {
  Node n;
  n.ref = &p.value;
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

const Matrix& Tape::value(Var v) const {
  const Node& n = nodes_[v.id];
  return n.ref != nullptr ? *n.ref : n.value;
}

Matrix& Tape::Grad(Var v) {
  Node& n = nodes_[v.id];
  if (n.sink != nullptr) return *n.sink;
  if (n.grad.size() == 0) {
    const Matrix& val = value(v);
    n.grad = Matrix::Zero(val.rows(), val.cols());
  }
  return n.grad;
}

void Tape::Backward(Var loss) {
  const Matrix& l = value(loss);
  if (l.rows() != 1 || l.cols() != 1) throw std::invalid_argument("Backward: loss must be 1x1");
  if (!NeedsGrad(loss)) return;
  Grad(loss)(0, 0) += 1.0;
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.requires_grad || !n.backward || n.grad.size() == 0) continue;
    n.backward();
  }
}

Var Tape::MatMul(Var a, Var b) {
  if (value(a).cols() != value(b).rows()) throw std::invalid_argument("MatMul: shape mismatch");
  const Var out = Push(value(a) * value(b), NeedsGrad(a) || NeedsGrad(b));
  if (NeedsGrad(out)) {
    nodes_[out.id].backward = [this, a, b, out] {
      const Matrix& g = GradOf(out.id);
      if (NeedsGrad(a)) Grad(a).noalias() += g * value(b).transpose();
      if (NeedsGrad(b)) Grad(b).noalias() += value(a).transpose() * g;
    };
  }
  return out;
}

Var Tape::MatMulNT(Var a, Var b) {
  if (value(a).cols() != value(b).cols()) throw std::invalid_argument("MatMulNT: shape mismatch");
  const Var out = Push(value(a) * value(b).transpose(), NeedsGrad(a) || NeedsGrad(b));
  if (NeedsGrad(out)) {
    nodes_[out.id].backward = [this, a, b, out] {
      const Matrix& g = GradOf(out.id);
      if (NeedsGrad(a)) Grad(a).noalias() += g * value(b);
      if (NeedsGrad(b)) Grad(b).noalias() += g.transpose() * value(a);
    };
  }
  return out;
}

Var Tape::Add(Var a, Var b) {
  CheckSameShape(value(a), value(b), "Add");
  const Var out = Push(value(a) + value(b), NeedsGrad(a) || NeedsGrad(b));
  if (NeedsGrad(out)) {
    nodes_[out.id].backward = [this, a, b, out] {
      const Matrix& g = GradOf(out.id);
      if (NeedsGrad(a)) Grad(a) += g;
      if (NeedsGrad(b)) Grad(b) += g;
    };
  }
  return out;
}

Var Tape::AddRow(Var x, Var row) {
  const Matrix& xv = value(x);
  const Matrix& rv = value(row);
  if (rv.rows() != 1 || rv.cols() != xv.cols()) throw std::invalid_argument("AddRow: shape mismatch");
  Matrix y = xv;
  y.rowwise() += rv.row(0);
  const Var out = Push(std::move(y), NeedsGrad(x) || NeedsGrad(row));
  if (NeedsGrad(out)) {
    nodes_[out.id].backward = [this, x, row, out] {
      const Matrix& g = GradOf(out.id);
      if (NeedsGrad(x)) Grad(x) += g;
      if (NeedsGrad(row)) Grad(row) += g.colwise().sum();
    };
  }
  return out;
}

Var Tape::Mul(Var a, Var b) {
  CheckSameShape(value(a), value(b), "Mul");
  const Var out = Push(value(a).cwiseProduct(value(b)), NeedsGrad(a) || NeedsGrad(b));
  if (NeedsGrad(out)) {
    nodes_[out.id].backward = [this, a, b, out] {
      const Matrix& g = GradOf(out.id);
      if (NeedsGrad(a)) Grad(a) += g.cwiseProduct(value(b));
      if (NeedsGrad(b)) Grad(b) += g.cwiseProduct(value(a));
    };
  }
  return out;
}

Var Tape::Scale(Var a, double s) {
  const Var out = Push(value(a) * s, NeedsGrad(a));
  if (NeedsGrad(out)) {
    nodes_[out.id].backward = [this, a, s, out] { Grad(a) += GradOf(out.id) * s; };
  }
  return out;
}

Var Tape::Transpose(Var a) {
  const Var out = Push(value(a).transpose(), NeedsGrad(a));
  if (NeedsGrad(out)) {
    nodes_[out.id].backward = [this, a, out] { Grad(a) += GradOf(out.id).transpose(); };
  }
  return out;
}

Var Tape::Tanh(Var a) {
  const Var out = Push(value(a).array().tanh().matrix(), NeedsGrad(a));
  if (NeedsGrad(out)) {
    nodes_[out.id].backward = [this, a, out] {
      const Matrix& y = value(out);
      Grad(a).array() += GradOf(out.id).array() * (1.0 - y.array().square());
    };
  }
  return out;
}

Var Tape::Gelu(Var a) {
  const Matrix& x = value(a);
  const Matrix t = (kGeluC * (x.array() + kGeluA * x.array().cube())).tanh().matrix();
  Matrix y = (0.5 * x.array() * (1.0 + t.array())).matrix();
  const Var out = Push(std::move(y), NeedsGrad(a));
  if (NeedsGrad(out)) {
    nodes_[out.id].backward = [this, a, out, t] {
      const auto x = value(a).array();
      const auto d = 0.5 * (1.0 + t.array()) +
                     0.5 * x * (1.0 - t.array().square()) * kGeluC *
                         (1.0 + 3.0 * kGeluA * x.square());
      Grad(a).array() += GradOf(out.id).array() * d;
    };
  }
  return out;
}

Var Tape::SoftmaxRows(Var a) {
  const Matrix& x = value(a);
  Matrix y(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    y.row(r) = (x.row(r).array() - m).exp().matrix();
    y.row(r) /= y.row(r).sum();
  }
  const Var out = Push(std::move(y), NeedsGrad(a));
  if (NeedsGrad(out)) {
    nodes_[out.id].backward = [this, a, out] {
      const Matrix& y = value(out);
      const Matrix& g = GradOf(out.id);
      const Eigen::VectorXd dot = g.cwiseProduct(y).rowwise().sum();
      Matrix d = g;
      d.colwise() -= dot;
      Grad(a) += d.cwiseProduct(y);
    };
  }
  return out;
}

Var Tape::LayerNorm(Var x, Var gain, Var bias, double eps) {
  const Matrix& xv = value(x);
  const Eigen::Index n = xv.cols();
  if (value(gain).rows() != 1 || value(gain).cols() != n || value(bias).rows() != 1 ||
      value(bias).cols() != n) {
    throw std::invalid_argument("LayerNorm: gain/bias shape mismatch");
  }
  Matrix xhat(xv.rows(), n);
  Eigen::VectorXd inv_sigma(xv.rows());
  for (Eigen::Index r = 0; r < xv.rows(); ++r) {
    const double mu = xv.row(r).mean();
    const auto centered = xv.row(r).array() - mu;
    const double var = centered.square().mean();
    inv_sigma(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (centered * inv_sigma(r)).matrix();
  }
  Matrix y = xhat;
  y.array().rowwise() *= value(gain).row(0).array();
  y.rowwise() += value(bias).row(0);
  const Var out = Push(std::move(y), NeedsGrad(x) || NeedsGrad(gain) || NeedsGrad(bias));
  if (NeedsGrad(out)) {
    nodes_[out.id].backward = [this, x, gain, bias, out, xhat = std::move(xhat),
                               inv_sigma = std::move(inv_sigma)] {
      const Matrix& g = GradOf(out.id);
      if (NeedsGrad(gain)) Grad(gain) += g.cwiseProduct(xhat).colwise().sum();
      if (NeedsGrad(bias)) Grad(bias) += g.colwise().sum();
      if (NeedsGrad(x)) {
        Matrix dxhat = g;
        dxhat.array().rowwise() *= value(gain).row(0).array();
        const Eigen::VectorXd mean_d = dxhat.rowwise().mean();
        const Eigen::VectorXd mean_dx = dxhat.cwiseProduct(xhat).rowwise().mean();
        Matrix dx = dxhat;
        dx.colwise() -= mean_d;
        dx -= (xhat.array().colwise() * mean_dx.array()).matrix();
        dx.array().colwise() *= inv_sigma.array();
        Grad(x) += dx;
      }
    };
  }
  return out;
}

Var Tape::Dropout(Var a, double p, Rng& rng) {
  if (p <= 0.0) return a;
  const Matrix& x = value(a);
  Matrix mask(x.rows(), x.cols());
  const double keep = 1.0 / (1.0 - p);
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = rng.Uniform() < p ? 0.0 : keep;
  }
  const Var out = Push(x.cwiseProduct(mask), NeedsGrad(a));
  if (NeedsGrad(out)) {
    nodes_[out.id].backward = [this, a, out, mask = std::move(mask)] {
      Grad(a) += GradOf(out.id).cwiseProduct(mask);
    };
  }
  return out;
}

Var Tape::Rows(Var a, const std::vector<int>& rows) {
  const Matrix& x = value(a);
  Matrix y(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= x.rows()) throw std::out_of_range("Rows: index out of range");
    y.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
  }
  const Var out = Push(std::move(y), NeedsGrad(a));
  if (NeedsGrad(out)) {
    nodes_[out.id].backward = [this, a, out, rows] {
      const Matrix& g = GradOf(out.id);
      Matrix& ga = Grad(a);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        ga.row(rows[i]) += g.row(static_cast<Eigen::Index>(i));
      }
    };
  }
  return out;
}

Var Tape::RowRange(Var a, int begin, int count) {
  const Matrix& x = value(a);
  if (begin < 0 || count < 0 || begin + count > x.rows()) {
    throw std::out_of_range("RowRange: range out of bounds");
  }
  const Var out = Push(x.middleRows(begin, count), NeedsGrad(a));
  if (NeedsGrad(out)) {
    nodes_[out.id].backward = [this, a, out, begin, count] {
      Grad(a).middleRows(begin, count) += GradOf(out.id);
    };
  }
  return out;
}

Var Tape::ColRange(Var a, int begin, int count) {
  const Matrix& x = value(a);
  if (begin < 0 || count < 0 || begin + count > x.cols()) {
    throw std::out_of_range("ColRange: range out of bounds");
  }
  const Var out = Push(x.middleCols(begin, count), NeedsGrad(a));
  if (NeedsGrad(out)) {
    nodes_[out.id].backward = [this, a, out, begin, count] {
      Grad(a).middleCols(begin, count) += GradOf(out.id);
    };
  }
  return out;
}

Var Tape::MeanRows(Var a, const std::vector<int>& rows) {
  if (rows.empty()) throw std::invalid_argument("MeanRows: empty row set");
  const Matrix& x = value(a);
  Matrix y = Matrix::Zero(1, x.cols());
  for (int r : rows) y += x.row(r);
  const double inv = 1.0 / static_cast<double>(rows.size());
  y *= inv;
  const Var out = Push(std::move(y), NeedsGrad(a));
  if (NeedsGrad(out)) {
    nodes_[out.id].backward = [this, a, out, rows, inv] {
      const Matrix& g = GradOf(out.id);
      Matrix& ga = Grad(a);
      for (int r : rows) ga.row(r) += g.row(0) * inv;
    };
  }
  return out;
}

Var Tape::ConcatRows(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("ConcatRows: no parts");
  Eigen::Index rows = 0;
  const Eigen::Index cols = value(parts[0]).cols();
  bool needs = false;
  for (Var p : parts) {
    if (value(p).cols() != cols) throw std::invalid_argument("ConcatRows: width mismatch");
    rows += value(p).rows();
    needs = needs || NeedsGrad(p);
  }
  Matrix y(rows, cols);
  Eigen::Index at = 0;
  for (Var p : parts) {
    y.middleRows(at, value(p).rows()) = value(p);
    at += value(p).rows();
  }
  const Var out = Push(std::move(y), needs);
  if (needs) {
    nodes_[out.id].backward = [this, parts, out] {
      const Matrix& g = GradOf(out.id);
      Eigen::Index at = 0;
      for (Var p : parts) {
        const Eigen::Index n = value(p).rows();
        if (NeedsGrad(p)) Grad(p) += g.middleRows(at, n);
        at += n;
      }
    };
  }
  return out;
}

Var Tape::ConcatCols(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("ConcatCols: no parts");
  Eigen::Index cols = 0;
  const Eigen::Index rows = value(parts[0]).rows();
  bool needs = false;
  for (Var p : parts) {
    if (value(p).rows() != rows) throw std::invalid_argument("ConcatCols: height mismatch");
    cols += value(p).cols();
    needs = needs || NeedsGrad(p);
  }
  Matrix y(rows, cols);
  Eigen::Index at = 0;
  for (Var p : parts) {
    y.middleCols(at, value(p).cols()) = value(p);
    at += value(p).cols();
  }
  const Var out = Push(std::move(y), needs);
  if (needs) {
    nodes_[out.id].backward = [this, parts, out] {
      const Matrix& g = GradOf(out.id);
      Eigen::Index at = 0;
      for (Var p : parts) {
        const Eigen::Index n = value(p).cols();
        if (NeedsGrad(p)) Grad(p) += g.middleCols(at, n);
        at += n;
      }
    };
  }
  return out;
}

Var Tape::Sum(const std::vector<Var>& scalars) {
  Matrix y = Matrix::Zero(1, 1);
  bool needs = false;
  for (Var s : scalars) {
    if (value(s).size() != 1) throw std::invalid_argument("Sum: operands must be 1x1");
    y(0, 0) += value(s)(0, 0);
    needs = needs || NeedsGrad(s);
  }
  const Var out = Push(std::move(y), needs);
  if (needs) {
    nodes_[out.id].backward = [this, scalars, out] {
      const double g = GradOf(out.id)(0, 0);
      for (Var s : scalars) {
        if (NeedsGrad(s)) Grad(s)(0, 0) += g;
      }
    };
  }
  return out;
}

Var Tape::CrossEntropy(Var logits, int target) {
  const Matrix& x = value(logits);
  if (x.rows() != 1 && x.cols() != 1) throw std::invalid_argument("CrossEntropy: not a vector");
  if (target < 0 || target >= x.size()) throw std::out_of_range("CrossEntropy: bad target");
  const double m = x.maxCoeff();
  Matrix p = (x.array() - m).exp().matrix();
  const double z = p.sum();
  p /= z;
  Matrix y(1, 1);
  y(0, 0) = m + std::log(z) - x.data()[target];
  const Var out = Push(std::move(y), NeedsGrad(logits));
  if (NeedsGrad(out)) {
    nodes_[out.id].backward = [this, logits, out, target, p = std::move(p)]() mutable {
      const double g = GradOf(out.id)(0, 0);
      Matrix d = p;
      d.data()[target] -= 1.0;
      Grad(logits) += d * g;
    };
  }
  return out;
}

Var Tape::BinaryCrossEntropy(Var logits, const std::vector<double>& targets) {
  const Matrix& x = value(logits);
  if (static_cast<std::size_t>(x.size()) != targets.size()) {
    throw std::invalid_argument("BinaryCrossEntropy: target count mismatch");
  }
  Matrix y = Matrix::Zero(1, 1);
  Matrix d(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = x.data()[i];
    const double t = targets[static_cast<std::size_t>(i)];
    y(0, 0) += std::max(v, 0.0) - v * t + std::log1p(std::exp(-std::abs(v)));
    d.data()[i] = 1.0 / (1.0 + std::exp(-v)) - t;
  }
  const Var out = Push(std::move(y), NeedsGrad(logits));
  if (NeedsGrad(out)) {
    nodes_[out.id].backward = [this, logits, out, d = std::move(d)] {
      Grad(logits) += d * GradOf(out.id)(0, 0);
    };
  }
  return out;
}

}  // namespace sketchsql::ad
