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

#include "sketchsql/augment.h"

#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.h"
#include "sketchsql/executor.h"
#include "sketchsql/synth.h"

namespace sketchsql {
namespace {

TableSchema Players() {
  return {"players", {"Player", "Jersey", "Nationality"},
          {ColumnType::kText, ColumnType::kReal, ColumnType::kText}};
}

Example JerseyExample() {
  Example e;
  e.id = "j";
  e.question = "which player wears jersey 42 and is australian";
  e.table_id = "players";
  e.gold = {0, AggOp::kNone, {{1, CondOp::kEq, "42"}, {2, CondOp::kEq, "australian"}}};
  return e;
}

bool Contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

TEST(EnumerateTest, TemplateClosure) {
  const auto all = EnumerateShortQuestions(JerseyExample(), Players(), AugmentConfig{},
                                           ReplacementMap::Defaults());
  EXPECT_TRUE(Contains(all, "player jersey 42 australian nationality"));
  EXPECT_TRUE(Contains(all, "42 jersey australian nationality player"));
  // 2 orders x 3^2 forms x 2 placements, all distinct here.
  EXPECT_EQ(all.size(), 36u);
}

TEST(EnumerateTest, NoConditions) {
  const TableSchema s{"acc", {"accounts"}, {ColumnType::kText}};
  Example e;
  e.question = "show accounts";
  e.gold = {0, AggOp::kNone, {}};
  EXPECT_EQ(EnumerateShortQuestions(e, s, AugmentConfig{}, ReplacementMap::Defaults()),
            std::vector<std::string>{"accounts"});
  e.gold.agg = AggOp::kCount;
  EXPECT_EQ(EnumerateShortQuestions(e, s, AugmentConfig{}, ReplacementMap::Defaults()),
            std::vector<std::string>{"number of accounts"});
}

TEST(EnumerateTest, FlagsNarrowTheSet) {
  AugmentConfig cfg;
  cfg.shuffle_conditions = false;
  cfg.swap_column_value = false;
  cfg.include_select_suffix = false;
  const auto all = EnumerateShortQuestions(JerseyExample(), Players(), cfg,
                                           ReplacementMap::Defaults());
  EXPECT_EQ(all.size(), 4u);
  for (const auto& q : all) EXPECT_EQ(q.rfind("player", 0), 0u) << q;
}

TEST(SynthesizeTest, CapAndProvenance) {
  for (std::size_t k : {0u, 1u, 3u, 10u, 100u}) {
    AugmentConfig cfg;
    cfg.variants_per_example = k;
    Rng rng(k);
    const auto out = SynthesizeShortQuestions(JerseyExample(), Players(), cfg,
                                              ReplacementMap::Defaults(), rng);
    EXPECT_LE(out.size(), k);
    const auto all = EnumerateShortQuestions(JerseyExample(), Players(), cfg,
                                             ReplacementMap::Defaults());
    std::vector<std::string> seen;
    for (const auto& v : out) {
      EXPECT_EQ(v.provenance, Provenance::kSynthesized);
      EXPECT_EQ(v.gold, JerseyExample().gold);
      EXPECT_TRUE(Contains(all, v.question)) << v.question;
      EXPECT_FALSE(Contains(seen, v.question));
      seen.push_back(v.question);
    }
  }
}

TEST(SynthesizeTest, Deterministic) {
  AugmentConfig cfg;
  Rng a(9), b(9);
  const auto x = SynthesizeShortQuestions(JerseyExample(), Players(), cfg,
                                          ReplacementMap::Defaults(), a);
  const auto y = SynthesizeShortQuestions(JerseyExample(), Players(), cfg,
                                          ReplacementMap::Defaults(), b);
  ASSERT_EQ(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(x[i].question, y[i].question);
}

Example Riders(CondOp op) {
  Example e;
  e.id = "r";
  e.question = "grid of bmw rider with more than 200 laps";
  e.table_id = "riders";
  e.gold = {3, AggOp::kNone, {{1, CondOp::kEq, "bmw"}, {2, op, "200"}}};
  return e;
}

TEST(SubstituteTest, GatedByOperator) {
  Rng rng(1);
  const Example gt = SubstituteRelationalSymbols(Riders(CondOp::kGt),
                                                 ReplacementMap::Defaults(), 1.0, rng);
  EXPECT_EQ(gt.question, "grid of bmw rider with > 200 laps");
  EXPECT_EQ(gt.provenance, Provenance::kSymbolSubstituted);
  EXPECT_EQ(gt.gold, Riders(CondOp::kGt).gold);

  const Example eq = SubstituteRelationalSymbols(Riders(CondOp::kEq),
                                                 ReplacementMap::Defaults(), 1.0, rng);
  EXPECT_EQ(eq.question, Riders(CondOp::kEq).question);
  EXPECT_EQ(eq.provenance, Provenance::kOriginal);

  const Example lt = SubstituteRelationalSymbols(Riders(CondOp::kLt),
                                                 ReplacementMap::Defaults(), 1.0, rng);
  EXPECT_EQ(lt.question, Riders(CondOp::kLt).question);
}

TEST(SubstituteTest, WordAnchoredAndLongestFirst) {
  Rng rng(2);
  Example e = Riders(CondOp::kLt);
  e.question = "riders under 30 and thunder with fewer than 5 wins";
  const Example out = SubstituteRelationalSymbols(e, ReplacementMap::Defaults(), 1.0, rng);
  EXPECT_EQ(out.question, "riders < 30 and thunder with < 5 wins");
}

TEST(SubstituteTest, ProbabilityZeroIsIdentity) {
  std::mt19937_64 gen(4);
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    Example e = Riders(static_cast<CondOp>(gen() % 3));
    e.question = (gen() % 2 ? "over " : "less than ") + e.question + " larger than 4";
    const Example out = SubstituteRelationalSymbols(e, ReplacementMap::Defaults(), 0.0, rng);
    EXPECT_EQ(out.question, e.question);
    EXPECT_EQ(out.provenance, e.provenance);
  }
}

TEST(ReplacementMapTest, ParseAndOrder) {
  std::istringstream in(
      "# comment\n"
      "more than\t>\t>\n"
      "\n"
      "way more than\tgt\t>\n"
      "below\tlt\t<\n");
  const ReplacementMap m = ReplacementMap::Parse(in);
  ASSERT_EQ(m.entries().size(), 3u);
  EXPECT_EQ(m.entries()[0].pattern, "way more than");
  EXPECT_EQ(m.PhraseFor(CondOp::kGt), "more than");
  EXPECT_EQ(m.PhraseFor(CondOp::kLt), "below");
  EXPECT_EQ(m.PhraseFor(CondOp::kEq), "");
  std::istringstream bad("more than\tbigger\t>\n");
  EXPECT_THROW(ReplacementMap::Parse(bad), ValidationError);
}

TEST(ReplacementMapTest, DefaultsIncludeQuotedNgrams) {
  const ReplacementMap m = ReplacementMap::Defaults();
  bool bigger = false, larger = false;
  for (const auto& r : m.entries()) {
    bigger |= r.pattern == "bigger than" && r.op == CondOp::kGt && r.symbol == ">";
    larger |= r.pattern == "larger than" && r.op == CondOp::kGt && r.symbol == ">";
  }
  EXPECT_TRUE(bigger);
  EXPECT_TRUE(larger);
  for (std::size_t i = 1; i < m.entries().size(); ++i) {
    EXPECT_GE(m.entries()[i - 1].pattern.size(), m.entries()[i].pattern.size());
  }
}

TEST(AugmentConfigTest, Validation) {
  AugmentConfig cfg;
  cfg.symbol_substitution_probability = 1.5;
  EXPECT_THROW(cfg.Validate(), ValidationError);
  cfg = AugmentConfig{};
  cfg.mix_ratio = -0.1;
  EXPECT_THROW(cfg.Validate(), ValidationError);
}

SyntheticCorpus SmallCorpus() {
  SynthConfig cfg;
  cfg.n_tables = 15;
  return GenerateSyntheticCorpus(cfg);
}

TEST(AugmentCorpusTest, MixRatioZeroKeepsOriginals) {
  const auto s = SmallCorpus();
  AugmentConfig cfg;
  cfg.mix_ratio = 0.0;
  const Corpus out = AugmentCorpus(s.corpus, s.tables, cfg);
  ASSERT_EQ(out.size(), s.corpus.size());
  auto ids = [](const Corpus& c) {
    std::vector<std::string> v;
    for (const auto& e : c.examples) v.push_back(e.id + "\n" + e.question);
    std::sort(v.begin(), v.end());
    return v;
  };
  EXPECT_EQ(ids(out), ids(s.corpus));
}

TEST(AugmentCorpusTest, HalfMixCount) {
  const auto s = SmallCorpus();
  Corpus hundred;
  hundred.examples.assign(s.corpus.examples.begin(), s.corpus.examples.begin() + 100);
  AugmentStats stats;
  const Corpus out = AugmentCorpus(hundred, s.tables, AugmentConfig{},
                                   ReplacementMap::Defaults(), &stats);
  EXPECT_EQ(stats.added, 50u);
  EXPECT_GE(stats.candidates, 50u);
  EXPECT_EQ(out.size(), 150u);
  std::size_t originals = 0;
  for (const auto& e : out.examples) originals += e.provenance == Provenance::kOriginal;
  EXPECT_EQ(originals, 100u);
}

// Variants keep their source's gold sketch, so they execute identically; the
// augmented corpus is a pure function of (corpus, config).
TEST(AugmentPropertyTest, GoldPreservedAndDeterministic) {
  const auto s = SmallCorpus();
  AugmentConfig cfg;
  cfg.mix_ratio = 2.0;
  cfg.symbol_substitution_probability = 0.7;
  const Corpus a = AugmentCorpus(s.corpus, s.tables, cfg);
  const Corpus b = AugmentCorpus(s.corpus, s.tables, cfg);
  ASSERT_EQ(a.size(), b.size());
  std::map<std::string, const Example*> by_id;
  for (const auto& e : s.corpus.examples) by_id[e.id] = &e;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.examples[i].question, b.examples[i].question);
    const Example& v = a.examples[i];
    std::string source = v.id;
    for (const char* suffix : {"-syn", "-sym"}) {
      const auto at = source.find(suffix);
      if (at != std::string::npos) source = source.substr(0, at);
    }
    ASSERT_EQ(by_id.count(source), 1u) << v.id;
    const Example& e = *by_id[source];
    EXPECT_TRUE(LfEqual(v.gold, e.gold));
    const Table& t = s.tables.at(e.table_id);
    EXPECT_TRUE(ResultsEqual(Execute(v.gold, t), Execute(e.gold, t)));
  }
}

}  // namespace
}  // namespace sketchsql
