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

#ifndef SKETCHSQL_EXECUTOR_H_
#define SKETCHSQL_EXECUTOR_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sketchsql/core.h"

namespace sketchsql {

/// Result of running a sketch over one table.
///
/// Row results hold the selected cells of every surviving row (a multiset;
/// order follows the table). Aggregate results hold at most one number: COUNT
/// always has one, MAX/MIN/SUM/AVG are empty when no surviving cell parsed as
/// a number.
struct QueryResult {
  enum class Kind { kRows, kAggregate };

  Kind kind = Kind::kRows;
  std::vector<std::string> cells;
  std::optional<double> number;

  // GT/LT comparisons where either side failed to parse.
  std::size_t unparseable_comparisons = 0;
  // Cells skipped by MAX/MIN/SUM/AVG because they failed to parse.
  std::size_t unparseable_aggregates = 0;

  std::size_t row_count() const { return cells.size(); }
};

/// Full-string numeric parse after trimming; nullopt for anything else.
std::optional<double> ParseNumber(std::string_view s);

/// Throws ValidationError when the sketch does not fit the table's schema.
QueryResult Execute(const SqlSketch& sketch, const Table& table);

/// Multiset comparison under NormalizeValue for row results; numbers within
/// 1e-9 relative tolerance for aggregates. Kinds must agree.
bool ResultsEqual(const QueryResult& a, const QueryResult& b);

/// Execution-accuracy match of a prediction against gold on one table.
bool ExEqual(const SqlSketch& pred, const SqlSketch& gold, const Table& table);

}  // namespace sketchsql

#endif  // SKETCHSQL_EXECUTOR_H_
