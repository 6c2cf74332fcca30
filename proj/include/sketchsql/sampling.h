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

#ifndef SKETCHSQL_SAMPLING_H_
#define SKETCHSQL_SAMPLING_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sketchsql/content_index.h"
#include "sketchsql/core.h"

namespace sketchsql {

enum class Strategy { kNone, kRandom, kRelevance, kEm1 };

std::string_view StrategyName(Strategy s);

/// A strategy with its per-column sample count, written "none", "rand:3",
/// "rel:5" or "em1".
struct StrategySpec {
  Strategy strategy = Strategy::kNone;
  std::size_t k = 0;

  static StrategySpec Parse(std::string_view text);
  std::string ToString() const;
  bool operator==(const StrategySpec&) const = default;
};

struct SampleSet {
  std::string table_id;
  Strategy strategy = Strategy::kNone;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::string>> columns;

  std::size_t total() const;
  bool operator==(const SampleSet&) const = default;

  nlohmann::json ToJson() const;
  static SampleSet FromJson(const nlohmann::json& j);
};

/// Empty lists for every column.
SampleSet EmptySamples(const TableSchema& schema);

/// min(k, distinct) distinct non-empty cells per column, drawn without
/// replacement. Column c uses its own stream seeded by MixSeed(seed, c).
SampleSet SampleRandom(const Table& table, std::size_t k, std::uint64_t seed);
/// Same draw, reusing the distinct lists held by an index of the table.
SampleSet SampleRandom(const ContentIndex& index, const TableSchema& schema,
                       std::size_t k, std::uint64_t seed);

/// Matched cells first (question order, deduplicated, at most k), then random
/// fill from the remaining distinct values.
SampleSet SampleRelevance(const TableSchema& schema, const ContentIndex& index,
                          std::string_view question, std::size_t k,
                          std::uint64_t seed);

/// At most the earliest match per column; no fill.
SampleSet SampleExactMatchOne(const TableSchema& schema, const ContentIndex& index,
                              std::string_view question);

/// Dispatches on spec. For kRandom, `offline` is returned when it is non-null
/// (the precomputed question-agnostic set).
SampleSet SampleFor(const StrategySpec& spec, const TableSchema& schema,
                    const ContentIndex& index, std::string_view question,
                    std::uint64_t seed, const SampleSet* offline = nullptr);

/// Line-delimited sidecar records.
void WriteSampleSets(std::ostream& out, const std::vector<SampleSet>& sets);
std::vector<SampleSet> ReadSampleSets(std::istream& in);

}  // namespace sketchsql

#endif  // SKETCHSQL_SAMPLING_H_
