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
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.h"
#include "sketchsql/bench.h"
#include "sketchsql/content_index.h"
#include "sketchsql/sampling.h"
#include "sketchsql/text.h"

namespace sketchsql {
namespace {

Table Tennis() {
  Table t;
  t.schema = {"tennis", {"Result", "Court", "Player"},
              {ColumnType::kText, ColumnType::kText, ColumnType::kText}};
  t.rows = {{"winner", "clay", "Rafael Nadal"},
            {"runner-up", "grass", "Novak Djokovic"},
            {"winner", "hard", "Jarkko Nieminen"}};
  return t;
}

Table Leagues() {
  Table t;
  t.schema = {"leagues", {"Country", "League"}, {ColumnType::kText, ColumnType::kText}};
  t.rows = {{"USA", "NHL"}, {"USA", "MLB"}, {"Canada", "NBA"}, {"USA", "NBA"}};
  return t;
}

Table Animals() {
  Table t;
  t.schema = {"animals", {"Animal Name", "Species", "Books", "Gender"},
              {ColumnType::kText, ColumnType::kText, ColumnType::kText, ColumnType::kText}};
  t.rows = {{"Jack", "Badger", "No", "male"},
            {"The Big Owl", "Owl", "Yes", "male"},
            {"Fantastic", "Fox", "Yes", "female"},
            {"The Wild Boar", "Boar", "No", "male"},
            {"Mole", "Mole", "No", "female"},
            {"Toad", "Toad", "Yes", "male"}};
  return t;
}

TEST(ContentIndexTest, IndexesDistinctNormalizedCells) {
  const auto index = ContentIndex::Build(Tennis());
  EXPECT_EQ(index.cell_count(), 9u);
  EXPECT_EQ(index.pattern_count(), 8u);  // "winner" appears twice in one column
  EXPECT_EQ(index.distinct_values(0), (std::vector<std::string>{"winner", "runner-up"}));
  using Entries = std::vector<std::pair<std::size_t, std::string>>;
  EXPECT_EQ(index.Lookup("rafael nadal"), (Entries{{2, "Rafael Nadal"}}));
  EXPECT_EQ(index.Lookup("winner"), (Entries{{0, "winner"}}));
  EXPECT_TRUE(index.Lookup("nadal").empty());
}

TEST(ContentIndexTest, EmptyTable) {
  Table t;
  t.schema = {"e", {"A"}, {ColumnType::kText}};
  const auto index = ContentIndex::Build(t);
  EXPECT_EQ(index.pattern_count(), 0u);
  EXPECT_TRUE(index.ExtractMatches("anything at all").empty());
}

TEST(ContentIndexTest, TennisQuestion) {
  const auto index = ContentIndex::Build(Tennis());
  const std::string q = "courts with Rafael Nadal as winner";
  const auto m = index.ExtractMatches(q);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].column, 2u);
  EXPECT_EQ(m[0].cell, "Rafael Nadal");
  EXPECT_EQ(q.substr(m[0].begin, m[0].end - m[0].begin), "Rafael Nadal");
  EXPECT_EQ(m[1].column, 0u);
  EXPECT_EQ(m[1].cell, "winner");
}

TEST(ContentIndexTest, MisspelledValueHasNoMatch) {
  const auto index = ContentIndex::Build(Leagues());
  EXPECT_TRUE(index.ExtractMatches("Which countries hosted the MHL league?").empty());
}

TEST(ContentIndexTest, LongestMatchWins) {
  Table t;
  t.schema = {"c", {"City", "Part"}, {ColumnType::kText, ColumnType::kText}};
  t.rows = {{"New York", "york"}};
  const auto m = ContentIndex::Build(t).ExtractMatches("flights to new york today");
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].cell, "New York");
}

TEST(ContentIndexTest, MatchesAreWordAnchored) {
  Table t;
  t.schema = {"c", {"A"}, {ColumnType::kText}};
  t.rows = {{"owl"}, {"42"}};
  const auto index = ContentIndex::Build(t);
  EXPECT_TRUE(index.ExtractMatches("bowling 420").empty());
  EXPECT_EQ(index.ExtractMatches("owl, 42?").size(), 2u);
}

TEST(ContentIndexTest, SameValueInTwoColumns) {
  Table t;
  t.schema = {"c", {"Home", "Away"}, {ColumnType::kText, ColumnType::kText}};
  t.rows = {{"Lions", "Bears"}, {"Bears", "Lions"}};
  const auto m = ContentIndex::Build(t).ExtractMatches("bears games");
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].column, 0u);
  EXPECT_EQ(m[1].column, 1u);
  EXPECT_EQ(m[0].begin, m[1].begin);
}

TEST(ContentIndexPropertyTest, AgreesWithBruteForce) {
  std::mt19937_64 gen(7);
  for (int i = 0; i < 300; ++i) {
    const Table t = testing::RandomTable(gen, 1 + gen() % 60, 1 + gen() % 5);
    const auto index = ContentIndex::Build(t);
    for (int j = 0; j < 10; ++j) {
      const std::string q = testing::RandomQuestion(gen, t);
      ASSERT_EQ(index.ExtractMatches(q), testing::OracleMatches(t, q)) << "question: " << q;
    }
  }
}

TEST(ContentIndexPropertyTest, QueriesDoNotMutate) {
  std::mt19937_64 gen(8);
  const Table t = testing::RandomTable(gen, 40, 4);
  const auto index = ContentIndex::Build(t);
  const std::string q = testing::RandomQuestion(gen, t);
  const auto first = index.ExtractMatches(q);
  for (int i = 0; i < 50; ++i) index.ExtractMatches(testing::RandomQuestion(gen, t));
  EXPECT_EQ(index.ExtractMatches(q), first);
}

TEST(StrategySpecTest, ParseAndPrint) {
  EXPECT_EQ(StrategySpec::Parse("rel:3"), (StrategySpec{Strategy::kRelevance, 3}));
  EXPECT_EQ(StrategySpec::Parse("rand:5").ToString(), "rand:5");
  EXPECT_EQ(StrategySpec::Parse("em1"), (StrategySpec{Strategy::kEm1, 1}));
  EXPECT_EQ(StrategySpec::Parse("none").k, 0u);
  EXPECT_THROW(StrategySpec::Parse("rel"), ValidationError);
  EXPECT_THROW(StrategySpec::Parse("rel:x"), ValidationError);
  EXPECT_THROW(StrategySpec::Parse("top:3"), ValidationError);
}

TEST(SamplingTest, RandomZeroAndExhaustion) {
  const Table t = Leagues();
  const auto zero = SampleRandom(t, 0, 1);
  for (const auto& col : zero.columns) EXPECT_TRUE(col.empty());
  const auto all = SampleRandom(t, 5, 1);
  std::set<std::string> leagues(all.columns[1].begin(), all.columns[1].end());
  EXPECT_EQ(leagues, (std::set<std::string>{"NHL", "MLB", "NBA"}));
  EXPECT_EQ(all.columns[1].size(), 3u);
  EXPECT_EQ(all.columns[0].size(), 2u);
}

TEST(SamplingTest, RandomIsDeterministicAndIndexAgnostic) {
  std::mt19937_64 gen(9);
  const Table t = testing::RandomTable(gen, 200, 4);
  const auto a = SampleRandom(t, 3, 42);
  EXPECT_EQ(a, SampleRandom(t, 3, 42));
  EXPECT_EQ(a, SampleRandom(ContentIndex::Build(t), t.schema, 3, 42));
  EXPECT_NE(a, SampleRandom(t, 3, 43));
}

TEST(SamplingTest, RelevanceFallsBackToRandom) {
  const Table t = Leagues();
  const auto index = ContentIndex::Build(t);
  const auto s = SampleRelevance(t.schema, index, "Which countries hosted the MHL league?", 3, 1);
  std::set<std::string> got(s.columns[1].begin(), s.columns[1].end());
  EXPECT_EQ(got, (std::set<std::string>{"NHL", "MLB", "NBA"}));
}

TEST(SamplingTest, RelevanceMatchesComeFirst) {
  const Table t = Animals();
  const auto index = ContentIndex::Build(t);
  const auto s = SampleRelevance(t.schema, index, "fox tv series female", 3, 1);
  ASSERT_FALSE(s.columns[1].empty());
  EXPECT_EQ(s.columns[1][0], "Fox");
  EXPECT_EQ(s.columns[3][0], "female");
  EXPECT_EQ(s.columns[1].size(), 3u);
}

TEST(SamplingTest, RelevanceTruncatesAtK) {
  Table t;
  t.schema = {"c", {"A"}, {ColumnType::kText}};
  t.rows = {{"red"}, {"green"}, {"blue"}, {"pink"}, {"teal"}};
  const auto index = ContentIndex::Build(t);
  const auto s = SampleRelevance(t.schema, index, "teal blue red green", 3, 1);
  EXPECT_EQ(s.columns[0], (std::vector<std::string>{"teal", "blue", "red"}));
}

TEST(SamplingTest, ExactMatchOne) {
  const Table tennis = Tennis();
  const auto s = SampleExactMatchOne(tennis.schema, ContentIndex::Build(tennis),
                                     "courts with Rafael Nadal as winner");
  EXPECT_EQ(s.columns[0], std::vector<std::string>{"winner"});
  EXPECT_TRUE(s.columns[1].empty());
  EXPECT_EQ(s.columns[2], std::vector<std::string>{"Rafael Nadal"});

  const Table leagues = Leagues();
  const auto none = SampleExactMatchOne(leagues.schema, ContentIndex::Build(leagues),
                                        "Which countries hosted the MHL league?");
  EXPECT_EQ(none.total(), 0u);

  const auto first = SampleExactMatchOne(leagues.schema, ContentIndex::Build(leagues),
                                         "mlb or nhl");
  EXPECT_EQ(first.columns[1], std::vector<std::string>{"MLB"});
}

TEST(SamplingTest, SidecarRoundTrip) {
  std::mt19937_64 gen(10);
  const Table t = testing::RandomTable(gen, 30, 3);
  std::vector<SampleSet> sets = {SampleRandom(t, 3, 1), SampleRandom(t, 5, 2)};
  std::stringstream buf;
  WriteSampleSets(buf, sets);
  EXPECT_EQ(ReadSampleSets(buf), sets);
}

TEST(SamplingPropertyTest, SampleSetInvariants) {
  std::mt19937_64 gen(12);
  for (int i = 0; i < 200; ++i) {
    const Table t = testing::RandomTable(gen, 1 + gen() % 50, 1 + gen() % 5);
    const auto index = ContentIndex::Build(t);
    const std::size_t k = gen() % 6;
    const std::string q = testing::RandomQuestion(gen, t);
    for (const auto& s : {SampleRandom(index, t.schema, k, i),
                          SampleRelevance(t.schema, index, q, k, i),
                          SampleExactMatchOne(t.schema, index, q)}) {
      ASSERT_EQ(s.columns.size(), t.column_count());
      for (std::size_t c = 0; c < t.column_count(); ++c) {
        const auto& col = s.columns[c];
        const auto& distinct = index.distinct_values(c);
        EXPECT_LE(col.size(), std::min(s.k, distinct.size()));
        EXPECT_EQ(std::set<std::string>(col.begin(), col.end()).size(), col.size());
        for (const auto& v : col) {
          EXPECT_FALSE(Trim(v).empty());
          EXPECT_TRUE(std::any_of(t.rows.begin(), t.rows.end(),
                                  [&](const auto& row) { return row[c] == v; }));
        }
        if (s.strategy != Strategy::kEm1) {
          EXPECT_EQ(col.size(), std::min(s.k, distinct.size()));
        }
      }
    }
  }
}

TEST(SamplingPropertyTest, RelevanceContainsMatchesWhenTheyFit) {
  std::mt19937_64 gen(13);
  for (int i = 0; i < 300; ++i) {
    const Table t = testing::RandomTable(gen, 1 + gen() % 40, 1 + gen() % 4);
    const auto index = ContentIndex::Build(t);
    const std::string q = testing::RandomQuestion(gen, t);
    const std::size_t k = 1 + gen() % 5;
    const auto s = SampleRelevance(t.schema, index, q, k, 3);
    std::vector<std::set<std::string>> matched(t.column_count());
    for (const auto& m : index.ExtractMatches(q)) matched[m.column].insert(m.cell);
    for (std::size_t c = 0; c < t.column_count(); ++c) {
      if (matched[c].size() > k) continue;
      for (const auto& cell : matched[c]) {
        EXPECT_NE(std::find(s.columns[c].begin(), s.columns[c].end(), cell),
                  s.columns[c].end());
      }
    }
  }
}

TEST(BenchTest, SmallLadderReport) {
  BenchConfig config;
  config.rows = {100, 1000};
  config.n_queries = 20;
  const auto report = BenchSampling(config);
  ASSERT_EQ(report.points.size(), 2u);
  EXPECT_EQ(report.points[1].cells, 5000u);
  EXPECT_GT(report.points[1].patterns, report.points[0].patterns);
  EXPECT_GT(report.points[0].mean_matches, 0.0);
  const auto j = report.ToJson();
  EXPECT_EQ(j["points"][0]["queries"], 20);
  EXPECT_TRUE(j["points"][0].contains("setup_seconds"));

  config.spec = {Strategy::kRandom, 3};
  config.n_queries = 0;
  const auto rand = BenchSampling(config).ToJson();
  EXPECT_EQ(rand["points"][1]["setup_seconds"], "negligible");
  EXPECT_EQ(rand["points"][1]["queries"], 0);
}

}  // namespace
}  // namespace sketchsql
