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

#include "sketchsql/executor.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "sketchsql/text.h"

namespace sketchsql {

namespace {

// A condition with its operand pre-normalized / pre-parsed once per query.
struct PreparedCondition {
  std::size_t column;
  CondOp op;
  std::string normalized;
  std::optional<double> number;
};

bool RowSurvives(const std::vector<std::string>& row,
                 const std::vector<PreparedCondition>& conds,
                 std::size_t& unparseable) {
  for (const auto& c : conds) {
    const std::string& cell = row[c.column];
    if (c.op == CondOp::kEq) {
      if (NormalizeValue(cell) != c.normalized) return false;
      continue;
    }
    const auto lhs = ParseNumber(cell);
    if (!lhs || !c.number) {
      ++unparseable;
      return false;
    }
    if (c.op == CondOp::kGt ? !(*lhs > *c.number) : !(*lhs < *c.number)) {
      return false;
    }
  }
  return true;
}

bool NumbersClose(double a, double b) {
  if (a == b) return true;
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= 1e-9 * scale;
}

}  // namespace

std::optional<double> ParseNumber(std::string_view s) {
  const std::string t = Trim(s);
  if (t.empty()) return std::nullopt;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

QueryResult Execute(const SqlSketch& sketch, const Table& table) {
  if (auto violations = ValidateSketch(sketch, table.schema,
                                       std::numeric_limits<std::size_t>::max());
      !violations.empty()) {
    throw ValidationError("cannot execute sketch on '" +
                          table.schema.table_id +
                          "': " + violations.front().message);
  }

  std::vector<PreparedCondition> conds;
  conds.reserve(sketch.conds.size());
  for (const auto& c : sketch.conds) {
    conds.push_back({c.column, c.op, NormalizeValue(c.value),
                     c.op == CondOp::kEq ? std::nullopt : ParseNumber(c.value)});
  }

  QueryResult result;
  result.kind = sketch.agg == AggOp::kNone ? QueryResult::Kind::kRows
                                           : QueryResult::Kind::kAggregate;

  std::size_t survivors = 0;
  std::vector<double> numbers;
  for (const auto& row : table.rows) {
    if (!RowSurvives(row, conds, result.unparseable_comparisons)) continue;
    ++survivors;
    const std::string& cell = row[sketch.select_column];
    switch (sketch.agg) {
      case AggOp::kNone:
        result.cells.push_back(cell);
        break;
      case AggOp::kCount:
        break;
      default:
        if (auto v = ParseNumber(cell)) {
          numbers.push_back(*v);
        } else {
          ++result.unparseable_aggregates;
        }
    }
  }

  switch (sketch.agg) {
    case AggOp::kNone:
      break;
    case AggOp::kCount:
      result.number = static_cast<double>(survivors);
      break;
    case AggOp::kMax:
      if (!numbers.empty()) {
        result.number = *std::max_element(numbers.begin(), numbers.end());
      }
      break;
    case AggOp::kMin:
      if (!numbers.empty()) {
        result.number = *std::min_element(numbers.begin(), numbers.end());
      }
      break;
    case AggOp::kSum:
    case AggOp::kAvg:
      if (!numbers.empty()) {
        double sum = 0.0;
        for (double v : numbers) sum += v;
        result.number = sketch.agg == AggOp::kSum
                            ? sum
                            : sum / static_cast<double>(numbers.size());
      }
      break;
  }
  return result;
}

bool ResultsEqual(const QueryResult& a, const QueryResult& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == QueryResult::Kind::kAggregate) {
    if (a.number.has_value() != b.number.has_value()) return false;
    return !a.number || NumbersClose(*a.number, *b.number);
  }
  if (a.cells.size() != b.cells.size()) return false;
  std::vector<std::string> x;
  std::vector<std::string> y;
  x.reserve(a.cells.size());
  y.reserve(b.cells.size());
  for (const auto& c : a.cells) x.push_back(NormalizeValue(c));
  for (const auto& c : b.cells) y.push_back(NormalizeValue(c));
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  return x == y;
}

bool ExEqual(const SqlSketch& pred, const SqlSketch& gold, const Table& table) {
  return ResultsEqual(Execute(pred, table), Execute(gold, table));
}

}  // namespace sketchsql
