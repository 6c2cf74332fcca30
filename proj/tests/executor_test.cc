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

#include <random>

#include <gtest/gtest.h>

#include "oracles.h"

namespace sketchsql {
namespace {

Table Players() {
  Table t;
  t.schema = {"players",
              {"Player", "Nationality", "Jersey", "Id"},
              {ColumnType::kText, ColumnType::kText, ColumnType::kReal, ColumnType::kText}};
  t.rows = {{"Ann Lee", "Australia", "42", "a42"},
            {"Bo Kim", "Korea", "7", "b07"},
            {"Cy Roe", "australia", "12", "c12"},
            {"Di Fox", "Fiji", "n/a", "d99"}};
  return t;
}

TEST(ExecutorTest, EqualityIsCaseAndSpaceInsensitive) {
  const auto r = Execute({0, AggOp::kNone, {{1, CondOp::kEq, " AUSTRALIA "}}}, Players());
  EXPECT_EQ(r.kind, QueryResult::Kind::kRows);
  EXPECT_EQ(r.cells, (std::vector<std::string>{"Ann Lee", "Cy Roe"}));
}

TEST(ExecutorTest, ComparisonsSkipUnparseableCells) {
  const auto r = Execute({0, AggOp::kNone, {{2, CondOp::kGt, "10"}}}, Players());
  EXPECT_EQ(r.cells, (std::vector<std::string>{"Ann Lee", "Cy Roe"}));
  EXPECT_EQ(r.unparseable_comparisons, 1u);
}

TEST(ExecutorTest, Aggregates) {
  const Table t = Players();
  EXPECT_EQ(*Execute({2, AggOp::kCount, {}}, t).number, 4.0);
  EXPECT_EQ(*Execute({2, AggOp::kMax, {}}, t).number, 42.0);
  EXPECT_EQ(*Execute({2, AggOp::kMin, {}}, t).number, 7.0);
  EXPECT_EQ(*Execute({2, AggOp::kSum, {}}, t).number, 61.0);
  const auto avg = Execute({2, AggOp::kAvg, {}}, t);
  EXPECT_NEAR(*avg.number, 61.0 / 3.0, 1e-12);
  EXPECT_EQ(avg.unparseable_aggregates, 1u);
  EXPECT_FALSE(Execute({0, AggOp::kMax, {}}, t).number.has_value());
  EXPECT_EQ(*Execute({0, AggOp::kCount, {{1, CondOp::kEq, "mars"}}}, t).number, 0.0);
}

TEST(ExecutorTest, ParseNumber) {
  EXPECT_EQ(*ParseNumber(" +8 "), 8.0);
  EXPECT_EQ(*ParseNumber("1e3"), 1000.0);
  EXPECT_EQ(*ParseNumber("-0.5"), -0.5);
  EXPECT_FALSE(ParseNumber("12abc"));
  EXPECT_FALSE(ParseNumber("1,000"));
  EXPECT_FALSE(ParseNumber(""));
  EXPECT_FALSE(ParseNumber("inf"));
  EXPECT_FALSE(ParseNumber("1e400"));
}

TEST(ExecutorTest, InvalidSketchThrows) {
  EXPECT_THROW(Execute({9, AggOp::kNone, {}}, Players()), ValidationError);
  EXPECT_THROW(Execute({0, AggOp::kNone, {{0, CondOp::kEq, ""}}}, Players()),
               ValidationError);
}

TEST(ExecutorTest, ResultsCompareAsNormalizedMultisets) {
  QueryResult a;
  a.cells = {"X", "y", "y"};
  QueryResult b;
  b.cells = {"y", "x ", "Y"};
  EXPECT_TRUE(ResultsEqual(a, b));
  b.cells.pop_back();
  EXPECT_FALSE(ResultsEqual(a, b));
  QueryResult n1;
  n1.kind = QueryResult::Kind::kAggregate;
  n1.number = 0.1 + 0.2;
  QueryResult n2 = n1;
  n2.number = 0.3;
  EXPECT_TRUE(ResultsEqual(n1, n2));
  n2.number.reset();
  EXPECT_FALSE(ResultsEqual(n1, n2));
  EXPECT_FALSE(ResultsEqual(a, n1));
}

TEST(ExecutorTest, JerseyQueryReturnsPlayer) {
  const SqlSketch s{0, AggOp::kNone, {{2, CondOp::kEq, "42"}}};
  EXPECT_EQ(Execute(s, Players()).cells, std::vector<std::string>{"Ann Lee"});
  EXPECT_TRUE(ExEqual(s, {0, AggOp::kNone, {{3, CondOp::kEq, "A42"}}}, Players()));
}

TEST(ExecutorPropertyTest, MatchesNaiveInterpreter) {
  std::mt19937_64 gen(101);
  for (int i = 0; i < 2000; ++i) {
    const Table t = testing::RandomTable(gen, gen() % 30, 1 + gen() % 5);
    const SqlSketch s = testing::RandomSketch(gen, t, 4);
    ASSERT_TRUE(testing::SameAnswer(testing::OracleExecute(s, t), Execute(s, t)))
        << RenderSql(s, t.schema);
  }
}

TEST(ExecutorPropertyTest, LogicalFormMatchImpliesExecutionMatch) {
  std::mt19937_64 gen(202);
  for (int i = 0; i < 300; ++i) {
    const Table t = testing::RandomTable(gen, 20, 4);
    for (int j = 0; j < 10; ++j) {
      const SqlSketch a = testing::RandomSketch(gen, t);
      SqlSketch b = a;
      std::shuffle(b.conds.begin(), b.conds.end(), gen);
      for (auto& c : b.conds) c.value = " " + c.value;
      ASSERT_TRUE(LfEqual(a, b));
      EXPECT_TRUE(ExEqual(a, b, t));
    }
  }
}

}  // namespace
}  // namespace sketchsql
