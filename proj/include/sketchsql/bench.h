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

// Sampling cost over a ladder of table sizes: index setup time, index memory,
// and per-question latency of sampling plus serialization.

#ifndef SKETCHSQL_BENCH_H_
#define SKETCHSQL_BENCH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "sketchsql/core.h"
#include "sketchsql/sampling.h"
#include "sketchsql/serialize.h"

namespace sketchsql {

struct BenchConfig {
  std::vector<std::size_t> rows = {1000, 100000, 1000000};
  StrategySpec spec{Strategy::kRelevance, 3};
  std::size_t n_queries = 200;
  std::size_t budget = kDefaultBudget;
  std::uint64_t seed = 5;
};

struct BenchPoint {
  std::size_t rows = 0;
  std::size_t cells = 0;
  // Zero for strategies without an index (negligible, reported as such).
  double setup_seconds = 0.0;
  std::size_t peak_memory_bytes = 0;
  std::size_t retained_bytes = 0;
  std::size_t patterns = 0;
  std::size_t trie_nodes = 0;
  // Random strategy: the one-off offline draw.
  double offline_sampling_seconds = 0.0;
  std::size_t queries = 0;
  double per_query_seconds = 0.0;  // median
  double per_query_p90_seconds = 0.0;
  double mean_matches = 0.0;
};

struct BenchReport {
  BenchConfig config;
  std::vector<BenchPoint> points;

  nlohmann::json ToJson() const;
};

/// Five columns: a unique title per row ("memo 0001234"; fixed width so cell
/// sizes do not drift along the ladder), a person, a brand, a year and a
/// genre. Deterministic in (rows, seed).
Table MakeBenchTable(std::size_t rows, std::uint64_t seed);

/// Keyword questions built from random rows of `table`.
std::vector<std::string> MakeBenchQuestions(const Table& table, std::size_t n,
                                            std::uint64_t seed);

/// Queries run on the calling thread, one at a time.
BenchReport BenchSampling(const BenchConfig& config);

}  // namespace sketchsql

#endif  // SKETCHSQL_BENCH_H_
