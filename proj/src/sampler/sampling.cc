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

#include "sketchsql/sampling.h"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "sketchsql/random.h"
#include "sketchsql/text.h"

namespace sketchsql {

std::string_view StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kNone:
      return "none";
    case Strategy::kRandom:
      return "rand";
    case Strategy::kRelevance:
      return "rel";
    case Strategy::kEm1:
      return "em1";
  }
  return "?";
}

namespace {

Strategy StrategyFromName(std::string_view name) {
  if (name == "none") return Strategy::kNone;
  if (name == "rand" || name == "random") return Strategy::kRandom;
  if (name == "rel" || name == "relevance") return Strategy::kRelevance;
  if (name == "em1" || name == "em") return Strategy::kEm1;
  throw ValidationError("unknown strategy '" + std::string(name) + "'");
}

// Appends up to k - out.size() further distinct values, excluding those
// already in `out`. Small domains use a partial Fisher-Yates; large ones use
// rejection so the cost does not grow with the column.
void FillRandom(const std::vector<std::string>& distinct, std::size_t column,
                std::size_t k, std::uint64_t seed, std::vector<std::string>& out) {
  const std::size_t n = distinct.size();
  const std::size_t preset = out.size();
  if (preset >= k || preset >= n) return;
  const std::size_t want = std::min(k, n) - preset;
  auto chosen = [&](std::size_t i) {
    return std::find(out.begin(), out.end(), distinct[i]) != out.end();
  };
  Rng rng(MixSeed(seed, column));
  if (n <= 4 * k + 16) {
    std::vector<std::size_t> pool;
    pool.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!chosen(i)) pool.push_back(i);
    }
    for (std::size_t i = 0; i < want && i < pool.size(); ++i) {
      std::swap(pool[i], pool[i + rng.Index(pool.size() - i)]);
      out.push_back(distinct[pool[i]]);
    }
    return;
  }
  while (out.size() < preset + want) {
    const std::size_t i = rng.Index(n);
    if (!chosen(i)) out.push_back(distinct[i]);
  }
}

SampleSet NewSet(const TableSchema& schema, Strategy strategy, std::size_t k,
                 std::uint64_t seed) {
  SampleSet set;
  set.table_id = schema.table_id;
  set.strategy = strategy;
  set.k = k;
  set.seed = seed;
  set.columns.resize(schema.column_count());
  return set;
}

}  // namespace

StrategySpec StrategySpec::Parse(std::string_view text) {
  StrategySpec spec;
  const auto colon = text.find(':');
  spec.strategy = StrategyFromName(text.substr(0, colon));
  if (colon != std::string_view::npos) {
    const auto digits = text.substr(colon + 1);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), spec.k);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
      throw ValidationError("bad sample count in '" + std::string(text) + "'");
    }
  }
  switch (spec.strategy) {
    case Strategy::kNone:
      spec.k = 0;
      break;
    case Strategy::kEm1:
      spec.k = 1;
      break;
    default:
      if (colon == std::string_view::npos) {
        throw ValidationError("strategy '" + std::string(text) + "' needs a count, e.g. rel:3");
      }
  }
  return spec;
}

std::string StrategySpec::ToString() const {
  if (strategy == Strategy::kNone || strategy == Strategy::kEm1) {
    return std::string(StrategyName(strategy));
  }
  return std::string(StrategyName(strategy)) + ":" + std::to_string(k);
}

std::size_t SampleSet::total() const {
  std::size_t n = 0;
  for (const auto& c : columns) n += c.size();
  return n;
}

nlohmann::json SampleSet::ToJson() const {
  return {{"table_id", table_id},
          {"strategy", StrategyName(strategy)},
          {"k", k},
          {"seed", seed},
          {"columns", columns}};
}

SampleSet SampleSet::FromJson(const nlohmann::json& j) {
  SampleSet set;
  set.table_id = j.at("table_id").get<std::string>();
  set.strategy = StrategyFromName(j.at("strategy").get<std::string>());
  set.k = j.at("k").get<std::size_t>();
  set.seed = j.value("seed", std::uint64_t{0});
  set.columns = j.at("columns").get<std::vector<std::vector<std::string>>>();
  for (const auto& col : set.columns) {
    if (col.size() > set.k && set.strategy != Strategy::kNone) {
      throw ValidationError("sample set for '" + set.table_id + "' exceeds k");
    }
  }
  return set;
}

SampleSet EmptySamples(const TableSchema& schema) {
  return NewSet(schema, Strategy::kNone, 0, 0);
}

SampleSet SampleRandom(const Table& table, std::size_t k, std::uint64_t seed) {
  SampleSet set = NewSet(table.schema, Strategy::kRandom, k, seed);
  for (std::size_t c = 0; c < table.column_count(); ++c) {
    std::vector<std::string> distinct;
    std::unordered_set<std::string_view> seen;
    for (const auto& row : table.rows) {
      if (Trim(row[c]).empty()) continue;
      if (seen.insert(row[c]).second) distinct.push_back(row[c]);
    }
    FillRandom(distinct, c, k, seed, set.columns[c]);
  }
  return set;
}

SampleSet SampleRandom(const ContentIndex& index, const TableSchema& schema,
                       std::size_t k, std::uint64_t seed) {
  SampleSet set = NewSet(schema, Strategy::kRandom, k, seed);
  for (std::size_t c = 0; c < schema.column_count(); ++c) {
    FillRandom(index.distinct_values(c), c, k, seed, set.columns[c]);
  }
  return set;
}

SampleSet SampleRelevance(const TableSchema& schema, const ContentIndex& index,
                          std::string_view question, std::size_t k,
                          std::uint64_t seed) {
  SampleSet set = NewSet(schema, Strategy::kRelevance, k, seed);
  if (k == 0) return set;
  for (const auto& m : index.ExtractMatches(question)) {
    auto& col = set.columns[m.column];
    if (col.size() < k && std::find(col.begin(), col.end(), m.cell) == col.end()) {
      col.push_back(m.cell);
    }
  }
  for (std::size_t c = 0; c < schema.column_count(); ++c) {
    FillRandom(index.distinct_values(c), c, k, seed, set.columns[c]);
  }
  return set;
}

SampleSet SampleExactMatchOne(const TableSchema& schema, const ContentIndex& index,
                              std::string_view question) {
  SampleSet set = NewSet(schema, Strategy::kEm1, 1, 0);
  for (const auto& m : index.ExtractMatches(question)) {
    auto& col = set.columns[m.column];
    if (col.empty()) col.push_back(m.cell);
  }
  return set;
}

SampleSet SampleFor(const StrategySpec& spec, const TableSchema& schema,
                    const ContentIndex& index, std::string_view question,
                    std::uint64_t seed, const SampleSet* offline) {
  switch (spec.strategy) {
    case Strategy::kNone:
      return EmptySamples(schema);
    case Strategy::kRandom:
      if (offline != nullptr) return *offline;
      return SampleRandom(index, schema, spec.k, seed);
    case Strategy::kRelevance:
      return SampleRelevance(schema, index, question, spec.k, seed);
    case Strategy::kEm1:
      return SampleExactMatchOne(schema, index, question);
  }
  return EmptySamples(schema);
}

void WriteSampleSets(std::ostream& out, const std::vector<SampleSet>& sets) {
  for (const auto& s : sets) out << s.ToJson().dump() << '\n';
}

std::vector<SampleSet> ReadSampleSets(std::istream& in) {
  std::vector<SampleSet> sets;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    try {
      sets.push_back(SampleSet::FromJson(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return sets;
}

}  // namespace sketchsql
