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

#include "sketchsql/bench.h"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "sketchsql/content_index.h"
#include "sketchsql/random.h"
#include "sketchsql/synth.h"

namespace sketchsql {

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

double Quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto i = static_cast<std::size_t>(q * static_cast<double>(v.size() - 1) + 0.5);
  return v[std::min(i, v.size() - 1)];
}

const std::vector<std::string>& TitleWords() {
  static const std::vector<std::string> words = {
      "report", "ledger", "memo", "notice", "bulletin", "digest", "record",
      "dossier", "brief", "survey", "review", "journal"};
  return words;
}

}  // namespace

Table MakeBenchTable(std::size_t rows, std::uint64_t seed) {
  const ValuePools pools = DefaultValuePools();
  const CategoryFamily* genre = &pools.categories.front();
  for (const auto& f : pools.categories) {
    if (f.name == "genre") genre = &f;
  }
  Table t;
  t.schema.table_id = "bench-" + std::to_string(rows);
  t.schema.headers = {"Title", "Author", "Publisher", "Year", "Genre"};
  t.schema.types = {ColumnType::kText, ColumnType::kText, ColumnType::kText,
                    ColumnType::kReal, ColumnType::kText};
  t.rows.reserve(rows);
  Rng rng(MixSeed(seed, rows));
  const auto& words = TitleWords();
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<std::string> row;
    row.reserve(5);
    char serial[16];
    std::snprintf(serial, sizeof(serial), "%07zu", r);
    row.push_back(words[r % words.size()] + " " + serial);
    row.push_back(rng.Pick(pools.first_names) + " " + rng.Pick(pools.last_names));
    row.push_back(rng.Pick(pools.brands));
    row.push_back(std::to_string(rng.Between(pools.year_min, pools.year_max)));
    row.push_back(rng.Pick(genre->values));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<std::string> MakeBenchQuestions(const Table& table, std::size_t n,
                                            std::uint64_t seed) {
  std::vector<std::string> out;
  if (table.rows.empty()) return out;
  Rng rng(MixSeed(seed, 0x9e57));
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = table.rows[rng.Index(table.rows.size())];
    switch (i % 4) {
      case 0:
        out.push_back("publisher " + row[0]);
        break;
      case 1:
        out.push_back(row[1] + " " + row[4] + " titles");
        break;
      case 2:
        out.push_back("year " + row[2] + " " + row[1]);
        break;
      default:
        out.push_back("number of " + row[4] + " books in " + row[3]);
        break;
    }
  }
  return out;
}

nlohmann::json BenchReport::ToJson() const {
  nlohmann::json j;
  j["strategy"] = config.spec.ToString();
  j["k"] = config.spec.k;
  j["n_queries"] = config.n_queries;
  j["budget"] = config.budget;
  j["seed"] = config.seed;
  const bool indexed = config.spec.strategy == Strategy::kRelevance ||
                       config.spec.strategy == Strategy::kEm1;
  j["setup"] = indexed ? "measured" : "negligible";
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) {
    nlohmann::json row = {{"rows", p.rows},
                          {"cells", p.cells},
                          {"queries", p.queries},
                          {"per_query_seconds", p.per_query_seconds},
                          {"per_query_p90_seconds", p.per_query_p90_seconds},
                          {"mean_matches", p.mean_matches}};
    if (indexed) {
      row["setup_seconds"] = p.setup_seconds;
      row["peak_memory_bytes"] = p.peak_memory_bytes;
      row["retained_bytes"] = p.retained_bytes;
      row["patterns"] = p.patterns;
      row["trie_nodes"] = p.trie_nodes;
    } else {
      row["setup_seconds"] = "negligible";
      row["peak_memory_bytes"] = "negligible";
      if (config.spec.strategy == Strategy::kRandom) {
        row["offline_sampling_seconds"] = p.offline_sampling_seconds;
      }
    }
    pts.push_back(std::move(row));
  }
  j["points"] = std::move(pts);
  return j;
}

BenchReport BenchSampling(const BenchConfig& config) {
  BenchReport report;
  report.config = config;
  const Strategy strategy = config.spec.strategy;
  const bool indexed = strategy == Strategy::kRelevance || strategy == Strategy::kEm1;
  for (std::size_t rows : config.rows) {
    const Table table = MakeBenchTable(rows, config.seed);
    const auto questions = MakeBenchQuestions(table, config.n_queries, config.seed);
    BenchPoint point;
    point.rows = rows;
    point.cells = table.cell_count();

    ContentIndex index;
    SampleSet offline;
    if (indexed) {
      index = ContentIndex::Build(table);
      point.setup_seconds = index.build_stats().seconds;
      point.peak_memory_bytes = index.build_stats().peak_heap_bytes;
      point.retained_bytes = index.build_stats().retained_bytes;
      point.patterns = index.pattern_count();
      point.trie_nodes = index.node_count();
    } else if (strategy == Strategy::kRandom) {
      const auto start = Clock::now();
      offline = SampleRandom(table, config.spec.k, config.seed);
      point.offline_sampling_seconds = Seconds(start);
    }

    auto run = [&](const std::string& q) {
      SampleSet samples = strategy == Strategy::kRandom
                              ? offline
                              : SampleFor(config.spec, table.schema, index, q, config.seed);
      return SerializeInput(q, table.schema, samples, config.budget).size();
    };
    const std::size_t warmup = std::min<std::size_t>(questions.size(), 5);
    for (std::size_t i = 0; i < warmup; ++i) run(questions[i]);

    std::vector<double> times;
    times.reserve(questions.size());
    std::size_t matches = 0;
    for (const auto& q : questions) {
      const auto start = Clock::now();
      run(q);
      times.push_back(Seconds(start));
      if (indexed) matches += index.ExtractMatches(q).size();
    }
    point.queries = questions.size();
    point.per_query_seconds = Quantile(times, 0.5);
    point.per_query_p90_seconds = Quantile(times, 0.9);
    point.mean_matches = questions.empty()
                             ? 0.0
                             : static_cast<double>(matches) / static_cast<double>(questions.size());
    report.points.push_back(point);
  }
  return report;
}

}  // namespace sketchsql
