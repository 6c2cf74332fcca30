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

// Domain types for single-table query sketches:
//
//   SELECT $AGG($COLUMN) FROM table WHERE $COLUMN $OP $VALUE (AND ...)*
//
// Wire indices follow the WikiSQL corpus convention.

#ifndef SKETCHSQL_CORE_H_
#define SKETCHSQL_CORE_H_

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sketchsql {

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultMaxConds = 4;

enum class AggOp { kNone = 0, kMax = 1, kMin = 2, kCount = 3, kSum = 4, kAvg = 5 };
inline constexpr int kNumAggOps = 6;

enum class CondOp { kEq = 0, kGt = 1, kLt = 2 };
inline constexpr int kNumCondOps = 3;

/// Throws ValidationError for indices outside [0, kNumAggOps).
AggOp AggOpFromIndex(int index);
inline int ToIndex(AggOp op) { return static_cast<int>(op); }
/// "" for kNone, otherwise the SQL function name.
std::string_view AggName(AggOp op);

CondOp CondOpFromIndex(int index);
inline int ToIndex(CondOp op) { return static_cast<int>(op); }
std::string_view CondSymbol(CondOp op);
CondOp CondOpFromSymbol(std::string_view symbol);

struct Condition {
  std::size_t column = 0;
  CondOp op = CondOp::kEq;
  std::string value;

  bool operator==(const Condition&) const = default;
};

struct SqlSketch {
  std::size_t select_column = 0;
  AggOp agg = AggOp::kNone;
  std::vector<Condition> conds;

  bool operator==(const SqlSketch&) const = default;
};

enum class ColumnType { kText, kReal };

std::string_view ColumnTypeName(ColumnType t);

struct TableSchema {
  std::string table_id;
  std::vector<std::string> headers;
  std::vector<ColumnType> types;

  std::size_t column_count() const { return headers.size(); }
};

struct Table {
  TableSchema schema;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_count() const { return schema.column_count(); }
  std::size_t cell_count() const { return rows.size() * column_count(); }
};

/// Throws ValidationError if headers/types/rows disagree.
void ValidateTable(const Table& table);

using TableMap = std::map<std::string, Table, std::less<>>;

enum class Provenance { kOriginal, kSynthesized, kSymbolSubstituted };
std::string_view ProvenanceName(Provenance p);
Provenance ProvenanceFromName(std::string_view name);

/// Surface style of a question. Only synthetic corpora set this; loaded corpora
/// default to kUnspecified.
enum class QuestionStyle { kUnspecified, kVerbose, kKeyword, kProbe };
std::string_view QuestionStyleName(QuestionStyle s);
QuestionStyle QuestionStyleFromName(std::string_view name);

struct Example {
  std::string id;
  std::string question;
  std::string table_id;
  SqlSketch gold;
  Provenance provenance = Provenance::kOriginal;
  QuestionStyle style = QuestionStyle::kUnspecified;
};

enum class ViolationKind {
  kColumnOutOfRange,
  kConditionColumnOutOfRange,
  kTooManyConditions,
  kEmptyValue,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

std::string_view ViolationName(ViolationKind kind);

std::vector<Violation> ValidateSketch(const SqlSketch& sketch,
                                      const TableSchema& schema,
                                      std::size_t max_conds = kDefaultMaxConds);

/// Canonical SQL text, e.g.
///   SELECT COUNT(Winning driver) FROM _ WHERE Rnd = 5
///   SELECT (Grid) FROM 2-14125739-3 WHERE Manufacturer = bmw AND Laps > 200
/// Conditions keep their order. Throws ValidationError on bad column ordinals.
std::string RenderSql(const SqlSketch& sketch, const TableSchema& schema);

/// Rendering with conditions sorted and values normalized; two sketches of one
/// schema are LfEqual exactly when their canonical forms are identical.
std::string CanonicalForm(const SqlSketch& sketch, const TableSchema& schema);

/// Logical-form match: select column and aggregation equal, conditions equal
/// as multisets under NormalizeValue.
bool LfEqual(const SqlSketch& a, const SqlSketch& b);

}  // namespace sketchsql

#endif  // SKETCHSQL_CORE_H_
