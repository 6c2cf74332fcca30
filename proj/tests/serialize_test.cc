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

#include "sketchsql/serialize.h"

#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "sketchsql/text.h"

namespace sketchsql {
namespace {

TableSchema Riders() {
  return {"2-14125739-3",
          {"Rider", "Manufacturer", "Laps", "Grid"},
          {ColumnType::kText, ColumnType::kText, ColumnType::kReal, ColumnType::kReal}};
}

SampleSet RiderSamples() {
  SampleSet s;
  s.table_id = "2-14125739-3";
  s.strategy = Strategy::kRandom;
  s.k = 3;
  s.columns = {{"Nicolas Terol", "Mike Di Meglio", "Stevie Bonsey"},
               {"Derbi", "Honda", "KTM"},
               {"1", "24", "0"},
               {"20", "29", "25"}};
  return s;
}

TEST(SerializeTest, DelimitedLayout) {
  const auto in = SerializeInput("grid of bmw rider with > 200 laps", Riders(), RiderSamples());
  EXPECT_EQ(RenderInput(in),
            "[CLS] grid of bmw rider with > 200 laps [SEP] "
            "Rider || Nicolas Terol | Mike Di Meglio | Stevie Bonsey [SEP] "
            "Manufacturer || Derbi | Honda | KTM [SEP] Laps || 1 | 24 | 0 [SEP] "
            "Grid || 20 | 29 | 25 [SEP]");
  EXPECT_EQ(in.question_length, 8u);
  EXPECT_EQ(in.dropped_samples, 0u);
}

TEST(SerializeTest, NoSamplesOmitsDelimiters) {
  const auto in = SerializeInput("grid of bmw", Riders(), EmptySamples(Riders()));
  EXPECT_EQ(RenderInput(in),
            "[CLS] grid of bmw [SEP] Rider [SEP] Manufacturer [SEP] Laps [SEP] Grid [SEP]");
}

TEST(SerializeTest, LabelsAndSpans) {
  const std::string q = "Grid of  BMW rider";
  const auto in = SerializeInput(q, Riders(), RiderSamples());
  EXPECT_EQ(in.tokens[0].segment, Segment::kSeparator);
  for (std::size_t i = 0; i < in.question_length; ++i) {
    EXPECT_EQ(in.tokens[in.question_begin + i].segment, Segment::kQuestion);
  }
  EXPECT_EQ(in.QuestionText(q, 1, 2), "of  BMW");
  const auto& first_header = in.tokens[in.question_begin + in.question_length + 1];
  EXPECT_EQ(first_header.segment, Segment::kHeader);
  EXPECT_EQ(first_header.column, 0);
  const auto& first_sample = in.tokens[in.question_begin + in.question_length + 3];
  EXPECT_EQ(first_sample.segment, Segment::kSample);
  EXPECT_EQ(first_sample.sample, 0);
  EXPECT_EQ(first_sample.text, "Nicolas");
}

TEST(SerializeTest, TruncationDropsWidestColumnFirst) {
  // Untruncated: [CLS] + 8 question tokens + [SEP] + 36 block tokens = 46.
  const std::string q = "grid of bmw rider with > 200 laps";
  const auto full = SerializeInput(q, Riders(), RiderSamples());
  ASSERT_EQ(full.size(), 46u);
  // Rider's block is the widest (11 tokens). Dropping "Stevie Bonsey" saves 3
  // and leaves Rider at 8, still wider than the others (7), so
  // "Mike Di Meglio" goes next.
  const auto cut = SerializeInput(q, Riders(), RiderSamples(), 42);
  EXPECT_EQ(cut.dropped_samples, 2u);
  const auto blocks = RecoverBlocks(cut);
  EXPECT_EQ(blocks[0].samples, std::vector<std::string>{"Nicolas Terol"});
  EXPECT_EQ(blocks[1].samples.size(), 3u);
  EXPECT_EQ(cut.size(), 39u);
}

TEST(SerializeTest, BudgetBelowHeadersThrows) {
  EXPECT_THROW(SerializeInput("grid of bmw", Riders(), RiderSamples(), 12), ValidationError);
  EXPECT_NO_THROW(SerializeInput("grid of bmw", Riders(), RiderSamples(), 13));
}

TEST(SerializeTest, ColumnCountMismatchThrows) {
  SampleSet s = RiderSamples();
  s.columns.pop_back();
  EXPECT_THROW(SerializeInput("q", Riders(), s), ValidationError);
}

TEST(SerializePropertyTest, RoundTripAndBudget) {
  std::mt19937_64 gen(21);
  for (int i = 0; i < 500; ++i) {
    const Table t = testing::RandomTable(gen, 1 + gen() % 30, 1 + gen() % 6);
    const std::string q = testing::RandomQuestion(gen, t);
    const auto samples = SampleRandom(t, gen() % 6, i);
    std::size_t need = 2 + Tokenize(q).size();
    for (const auto& h : t.schema.headers) need += Tokenize(h).size() + 1;
    const std::size_t budget = need + gen() % 40;
    const auto in = SerializeInput(q, t.schema, samples, budget);
    ASSERT_LE(in.size(), budget);
    const auto blocks = RecoverBlocks(in);
    ASSERT_EQ(blocks.size(), t.column_count());
    std::size_t question_tokens = 0;
    for (const auto& tok : in.tokens) question_tokens += tok.segment == Segment::kQuestion;
    EXPECT_EQ(question_tokens, Tokenize(q).size());
    std::size_t kept = 0;
    for (std::size_t c = 0; c < t.column_count(); ++c) {
      EXPECT_EQ(blocks[c].header, t.schema.headers[c]);
      const auto& all = samples.columns[c];
      ASSERT_LE(blocks[c].samples.size(), all.size());
      EXPECT_TRUE(std::equal(blocks[c].samples.begin(), blocks[c].samples.end(), all.begin()));
      kept += blocks[c].samples.size();
    }
    EXPECT_EQ(kept + in.dropped_samples, samples.total());
  }
}

}  // namespace
}  // namespace sketchsql
