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

#include "sketchsql/core.h"

#include <algorithm>
#include <array>
#include <tuple>

#include "sketchsql/text.h"

namespace sketchsql {

namespace {

constexpr std::array<std::string_view, kNumAggOps> kAggNames = {
    "", "MAX", "MIN", "COUNT", "SUM", "AVG"};
constexpr std::array<std::string_view, kNumCondOps> kCondSymbols = {"=", ">",
                                                                    "<"};

using CondKey = std::tuple<std::size_t, int, std::string>;

std::vector<CondKey> SortedCondKeys(const std::vector<Condition>& conds) {
  std::vector<CondKey> keys;
  keys.reserve(conds.size());
  for (const auto& c : conds) {
    keys.emplace_back(c.column, ToIndex(c.op), NormalizeValue(c.value));
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

const std::string& HeaderAt(const TableSchema& schema, std::size_t column) {
  if (column >= schema.column_count()) {
    throw ValidationError("column ordinal " + std::to_string(column) +
                          " out of range for table '" + schema.table_id +
                          "' with " + std::to_string(schema.column_count()) +
                          " columns");
  }
  return schema.headers[column];
}

std::string RenderSelect(const SqlSketch& sketch, const TableSchema& schema) {
  std::string out = "SELECT ";
  out += AggName(sketch.agg);
  out += '(';
  out += HeaderAt(schema, sketch.select_column);
  out += ") FROM ";
  out += schema.table_id;
  return out;
}

}  // namespace

AggOp AggOpFromIndex(int index) {
  if (index < 0 || index >= kNumAggOps) {
    throw ValidationError("aggregation index out of range: " +
                          std::to_string(index));
  }
  return static_cast<AggOp>(index);
}

std::string_view AggName(AggOp op) { return kAggNames[ToIndex(op)]; }

CondOp CondOpFromIndex(int index) {
  if (index < 0 || index >= kNumCondOps) {
    throw ValidationError("op index out of range: " + std::to_string(index));
  }
  return static_cast<CondOp>(index);
}

std::string_view CondSymbol(CondOp op) { return kCondSymbols[ToIndex(op)]; }

CondOp CondOpFromSymbol(std::string_view symbol) {
  for (int i = 0; i < kNumCondOps; ++i) {
    if (kCondSymbols[i] == symbol) return static_cast<CondOp>(i);
  }
  // Accept the wire names used in replacement-map files too.
  const std::string lower = ToLowerAscii(symbol);
  if (lower == "eq") return CondOp::kEq;
  if (lower == "gt") return CondOp::kGt;
  if (lower == "lt") return CondOp::kLt;
  throw ValidationError("unknown condition operator '" + std::string(symbol) +
                        "'");
}

std::string_view ColumnTypeName(ColumnType t) {
  return t == ColumnType::kReal ? "real" : "text";
}

void ValidateTable(const Table& table) {
  const auto& s = table.schema;
  if (s.headers.empty()) {
    throw ValidationError("table '" + s.table_id + "' has no columns");
  }
  if (s.headers.size() != s.types.size()) {
    throw ValidationError("table '" + s.table_id + "': " +
                          std::to_string(s.headers.size()) + " headers but " +
                          std::to_string(s.types.size()) + " types");
  }
  for (std::size_t c = 0; c < s.headers.size(); ++c) {
    if (Trim(s.headers[c]).empty()) {
      throw ValidationError("table '" + s.table_id + "': header " +
                            std::to_string(c) + " is empty");
    }
  }
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != s.headers.size()) {
      throw ValidationError("table '" + s.table_id + "': row " +
                            std::to_string(r) + " has " +
                            std::to_string(table.rows[r].size()) +
                            " cells, expected " +
                            std::to_string(s.headers.size()));
    }
  }
}

std::string_view ProvenanceName(Provenance p) {
  switch (p) {
    case Provenance::kOriginal:
      return "original";
    case Provenance::kSynthesized:
      return "synthesized";
    case Provenance::kSymbolSubstituted:
      return "symbol-substituted";
  }
  return "original";
}

Provenance ProvenanceFromName(std::string_view name) {
  if (name == "original") return Provenance::kOriginal;
  if (name == "synthesized") return Provenance::kSynthesized;
  if (name == "symbol-substituted") return Provenance::kSymbolSubstituted;
  throw ValidationError("unknown provenance '" + std::string(name) + "'");
}

std::string_view QuestionStyleName(QuestionStyle s) {
  switch (s) {
    case QuestionStyle::kUnspecified:
      return "unspecified";
    case QuestionStyle::kVerbose:
      return "verbose";
    case QuestionStyle::kKeyword:
      return "keyword";
    case QuestionStyle::kProbe:
      return "probe";
  }
  return "unspecified";
}

QuestionStyle QuestionStyleFromName(std::string_view name) {
  if (name == "verbose") return QuestionStyle::kVerbose;
  if (name == "keyword") return QuestionStyle::kKeyword;
  if (name == "probe") return QuestionStyle::kProbe;
  return QuestionStyle::kUnspecified;
}

std::string_view ViolationName(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kColumnOutOfRange:
      return "column-out-of-range";
    case ViolationKind::kConditionColumnOutOfRange:
      return "condition-column-out-of-range";
    case ViolationKind::kTooManyConditions:
      return "too-many-conditions";
    case ViolationKind::kEmptyValue:
      return "empty-value";
  }
  return "unknown";
}

std::vector<Violation> ValidateSketch(const SqlSketch& sketch,
                                      const TableSchema& schema,
                                      std::size_t max_conds) {
  std::vector<Violation> out;
  const std::size_t n = schema.column_count();
  if (sketch.select_column >= n) {
    out.push_back({ViolationKind::kColumnOutOfRange,
                   "select column " + std::to_string(sketch.select_column) +
                       " >= " + std::to_string(n)});
  }
  if (sketch.conds.size() > max_conds) {
    out.push_back({ViolationKind::kTooManyConditions,
                   std::to_string(sketch.conds.size()) + " conditions > " +
                       std::to_string(max_conds)});
  }
  for (std::size_t i = 0; i < sketch.conds.size(); ++i) {
    const auto& c = sketch.conds[i];
    if (c.column >= n) {
      out.push_back({ViolationKind::kConditionColumnOutOfRange,
                     "condition " + std::to_string(i) + " column " +
                         std::to_string(c.column) + " >= " +
                         std::to_string(n)});
    }
    if (Trim(c.value).empty()) {
      out.push_back({ViolationKind::kEmptyValue,
                     "condition " + std::to_string(i) + " has an empty value"});
    }
  }
  return out;
}

std::string RenderSql(const SqlSketch& sketch, const TableSchema& schema) {
  std::string out = RenderSelect(sketch, schema);
  for (std::size_t i = 0; i < sketch.conds.size(); ++i) {
    const auto& c = sketch.conds[i];
    out += i == 0 ? " WHERE " : " AND ";
    out += HeaderAt(schema, c.column);
    out += ' ';
    out += CondSymbol(c.op);
    out += ' ';
    out += c.value;
  }
  return out;
}

std::string CanonicalForm(const SqlSketch& sketch, const TableSchema& schema) {
  std::string out =
      '#' + std::to_string(sketch.select_column) + ' ' +
      RenderSelect(sketch, schema);
  const auto keys = SortedCondKeys(sketch.conds);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto& [column, op, value] = keys[i];
    out += i == 0 ? " WHERE " : " AND ";
    // Ordinals rather than headers so duplicate header names stay distinct.
    out += '#' + std::to_string(column) + ':';
    out += HeaderAt(schema, column);
    out += ' ';
    out += kCondSymbols[op];
    out += ' ';
    out += value;
  }
  return out;
}

bool LfEqual(const SqlSketch& a, const SqlSketch& b) {
  if (a.select_column != b.select_column || a.agg != b.agg) return false;
  if (a.conds.size() != b.conds.size()) return false;
  return SortedCondKeys(a.conds) == SortedCondKeys(b.conds);
}

}  // namespace sketchsql
