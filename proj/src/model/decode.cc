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

#include <algorithm>
#include <numeric>

#include "sketchsql/model.h"
#include "sketchsql/text.h"

namespace sketchsql {

using ad::Matrix;
using ad::Tape;
using ad::Var;

namespace {

// First index of the maximum.
template <typename V>
int Argmax(const V& v) {
  int best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = static_cast<int>(i);
  }
  return best;
}

Eigen::VectorXd Flat(const Matrix& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

}  // namespace

HeadOutputs ToHeadOutputs(const Tape& tape, const HeadGraph& g) {
  HeadOutputs h;
  h.sel_logits = Flat(tape.value(g.sel));
  h.agg_logits = Flat(tape.value(g.agg));
  h.agg_select = g.agg_select;
  h.wnum_logits = Flat(tape.value(g.wnum));
  const Eigen::VectorXd wcol = Flat(tape.value(g.wcol));
  h.wcol_scores = (1.0 + (-wcol.array()).exp()).inverse().matrix();
  h.wop_logits = tape.value(g.wop);
  h.wval_start_logits = tape.value(g.wval_start);
  h.wval_end_logits = tape.value(g.wval_end);
  return h;
}

std::optional<GoldAlignment> AlignGold(const SqlSketch& gold, std::string_view question,
                                       const SerializedInput& input, std::size_t max_span) {
  const std::size_t nq = input.question_length;
  std::vector<std::string> q(nq);
  for (std::size_t i = 0; i < nq; ++i) q[i] = ToLowerAscii(input.tokens[input.question_begin + i].text);

  GoldAlignment out;
  for (const auto& c : gold.conds) {
    const std::vector<std::string> v = TokenizeLower(c.value);
    const std::size_t len = v.size();
    if (len == 0 || len > max_span || len > nq) return std::nullopt;
    const std::string want = NormalizeValue(c.value);
    int first = -1;
    std::size_t hits = 0;
    for (std::size_t i = 0; i + len <= nq; ++i) {
      if (!std::equal(v.begin(), v.end(), q.begin() + static_cast<std::ptrdiff_t>(i))) continue;
      if (NormalizeValue(input.QuestionText(question, i, i + len - 1)) != want) continue;
      if (first < 0) first = static_cast<int>(i);
      ++hits;
    }
    if (first < 0) return std::nullopt;
    if (hits > 1) ++out.ambiguous;
    out.spans.emplace_back(first, first + static_cast<int>(len) - 1);
  }
  return out;
}

SqlSketch DecodeSketch(const HeadOutputs& heads, const TableSchema& schema,
                       std::string_view question, const SerializedInput& input,
                       std::size_t max_span) {
  const std::size_t cols = heads.column_count();
  const std::size_t nq = heads.question_length();
  if (cols != schema.column_count() || cols == 0 ||
      static_cast<std::size_t>(heads.wcol_scores.size()) != cols ||
      static_cast<std::size_t>(heads.wop_logits.rows()) != cols ||
      static_cast<std::size_t>(heads.wval_start_logits.rows()) != cols ||
      heads.wval_end_logits.rows() != heads.wval_start_logits.rows() ||
      heads.wval_end_logits.cols() != heads.wval_start_logits.cols() ||
      nq != input.question_length) {
    throw ValidationError("head outputs do not match the schema and input");
  }
  SqlSketch s;
  s.select_column = static_cast<std::size_t>(Argmax(heads.sel_logits));
  s.agg = AggOpFromIndex(Argmax(heads.agg_logits));
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(Argmax(heads.wnum_logits)), cols);
  if (n == 0 || nq == 0) return s;

  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return heads.wcol_scores(static_cast<Eigen::Index>(a)) >
           heads.wcol_scores(static_cast<Eigen::Index>(b));
  });
  order.resize(n);
  std::sort(order.begin(), order.end());

  for (std::size_t c : order) {
    const auto row = static_cast<Eigen::Index>(c);
    Condition cond;
    cond.column = c;
    cond.op = CondOpFromIndex(Argmax(heads.wop_logits.row(row)));
    double best = -std::numeric_limits<double>::infinity();
    std::size_t bs = 0, be = 0;
    for (std::size_t a = 0; a < nq; ++a) {
      const std::size_t last = std::min(nq, a + max_span) - 1;
      for (std::size_t b = a; b <= last; ++b) {
        const double score = heads.wval_start_logits(row, static_cast<Eigen::Index>(a)) +
                             heads.wval_end_logits(row, static_cast<Eigen::Index>(b));
        if (score > best) {
          best = score;
          bs = a;
          be = b;
        }
      }
    }
    cond.value = input.QuestionText(question, bs, be);
    s.conds.push_back(std::move(cond));
  }
  return s;
}

nlohmann::json LossBreakdown::ToJson() const {
  return {{"sel", sel}, {"agg", agg},   {"wnum", wnum}, {"wcol", wcol},
          {"wop", wop}, {"wval", wval}, {"total", total}};
}

Var SketchLoss(Tape& tape, const HeadGraph& heads, const SqlSketch& gold,
               const GoldAlignment& alignment, LossBreakdown* breakdown) {
  const auto cols = tape.value(heads.sel).rows();
  if (gold.select_column >= static_cast<std::size_t>(cols)) {
    throw ValidationError("gold select column out of range");
  }
  if (alignment.spans.size() != gold.conds.size()) {
    throw ValidationError("alignment does not cover every condition");
  }
  if (static_cast<std::size_t>(heads.agg_select) != gold.select_column) {
    throw ValidationError("agg head must be conditioned on the gold select column");
  }
  const auto max_n = tape.value(heads.wnum).size() - 1;
  if (static_cast<Eigen::Index>(gold.conds.size()) > max_n) {
    throw ValidationError("gold sketch has more conditions than the wnum head covers");
  }

  const Var sel = tape.CrossEntropy(heads.sel, static_cast<int>(gold.select_column));
  const Var agg = tape.CrossEntropy(heads.agg, ToIndex(gold.agg));
  const Var wnum = tape.CrossEntropy(heads.wnum, static_cast<int>(gold.conds.size()));
  std::vector<double> targets(static_cast<std::size_t>(cols), 0.0);
  for (const auto& c : gold.conds) {
    if (c.column >= targets.size()) throw ValidationError("gold condition column out of range");
    targets[c.column] = 1.0;
  }
  const Var wcol = tape.BinaryCrossEntropy(heads.wcol, targets);

  std::vector<Var> terms = {sel, agg, wnum, wcol};
  std::vector<Var> wop_terms, wval_terms;
  for (std::size_t i = 0; i < gold.conds.size(); ++i) {
    const int c = static_cast<int>(gold.conds[i].column);
    wop_terms.push_back(tape.CrossEntropy(tape.RowRange(heads.wop, c, 1), ToIndex(gold.conds[i].op)));
    wval_terms.push_back(
        tape.CrossEntropy(tape.RowRange(heads.wval_start, c, 1), alignment.spans[i].first));
    wval_terms.push_back(
        tape.CrossEntropy(tape.RowRange(heads.wval_end, c, 1), alignment.spans[i].second));
  }
  terms.insert(terms.end(), wop_terms.begin(), wop_terms.end());
  terms.insert(terms.end(), wval_terms.begin(), wval_terms.end());
  const Var total = tape.Sum(terms);

  if (breakdown != nullptr) {
    auto v = [&](Var x) { return tape.value(x)(0, 0); };
    auto sum = [&](const std::vector<Var>& xs) {
      double s = 0.0;
      for (Var x : xs) s += v(x);
      return s;
    };
    breakdown->sel = v(sel);
    breakdown->agg = v(agg);
    breakdown->wnum = v(wnum);
    breakdown->wcol = v(wcol);
    breakdown->wop = sum(wop_terms);
    breakdown->wval = sum(wval_terms);
    breakdown->total = v(total);
  }
  return total;
}

}  // namespace sketchsql
