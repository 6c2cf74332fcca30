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

// Release checks. Prints one PASS/FAIL line per check and exits non-zero when
// any check fails.
//
//   acceptance [check numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gradcheck.h"
#include "oracles.h"
#include "sketchsql/bench.h"
#include "sketchsql/content_index.h"
#include "sketchsql/executor.h"
#include "sketchsql/model.h"
#include "sketchsql/sampling.h"
#include "sketchsql/serialize.h"
#include "sketchsql/synth.h"
#include "sketchsql/text.h"
#include "sketchsql/traineval.h"

#ifndef SKETCHSQL_CLI_PATH
#define SKETCHSQL_CLI_PATH "sketchsql"
#endif
#ifndef SKETCHSQL_SMOKE_SCRIPT
#define SKETCHSQL_SMOKE_SCRIPT "scripts/smoke.sh"
#endif

namespace sketchsql {
namespace {

namespace fs = std::filesystem;

// Pinned tolerances.
constexpr std::size_t kExecutorPairs = 10000;
constexpr std::size_t kExecutorMaxRows = 100;
constexpr double kExecutorSeconds = 60.0;
constexpr std::size_t kImplicationTables = 10;
constexpr std::size_t kImplicationPairsPerTable = 10000;
constexpr std::size_t kAgnosticQuestions = 100;
constexpr std::size_t kSupersetPairs = 1000;
constexpr std::size_t kMatchCellLimit = 1000;
constexpr std::size_t kSerializerInputs = 1000;
constexpr double kGradientTolerance = 1e-4;
constexpr double kGradientSeconds = 300.0;
constexpr std::size_t kOverfitExamples = 64;
constexpr std::size_t kOverfitEpochs = 300;
constexpr double kOverfitTarget = 0.95;
constexpr double kOverfitSeconds = 1800.0;
constexpr double kAugmentGain = 0.15;
constexpr double kContentWcolGain = 0.10;
constexpr double kRandomQueryRatio = 2.0;
constexpr double kMaxGrowthExponent = 1.3;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string Sci(double v) {
  std::ostringstream s;
  s.precision(2);
  s << std::scientific << v;
  return s.str();
}

std::string Fixed(double v, int digits = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

fs::path OutDir() {
  const fs::path p = fs::temp_directory_path() / "sketchsql_acceptance";
  fs::create_directories(p);
  return p;
}

Outcome ExecutorMatchesOracle() {
  std::mt19937_64 gen(1001);
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < kExecutorPairs; ++i) {
    const Table t = testing::RandomTable(gen, gen() % (kExecutorMaxRows + 1), 1 + gen() % 6);
    const SqlSketch s = testing::RandomSketch(gen, t, 4);
    if (!testing::SameAnswer(testing::OracleExecute(s, t), Execute(s, t))) ++mismatches;
  }
  const double secs = Since(t0);
  return {mismatches == 0 && secs < kExecutorSeconds,
          std::to_string(mismatches) + " mismatches in " + std::to_string(kExecutorPairs) +
              " pairs, " + Fixed(secs, 1) + "s"};
}

// Rewrites a sketch without changing its logical form.
SqlSketch Restate(const SqlSketch& s, std::mt19937_64& gen) {
  SqlSketch b = s;
  std::shuffle(b.conds.begin(), b.conds.end(), gen);
  for (auto& c : b.conds) {
    if (gen() % 2) c.value = " " + c.value + " ";
    if (gen() % 2) {
      std::transform(c.value.begin(), c.value.end(), c.value.begin(),
                     [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
    }
  }
  return b;
}

Outcome LogicalFormImpliesExecution() {
  std::mt19937_64 gen(1002);
  std::size_t lf_pairs = 0, violations = 0;
  for (std::size_t t = 0; t < kImplicationTables; ++t) {
    const Table table = testing::RandomTable(gen, 1 + gen() % 60, 1 + gen() % 5);
    for (std::size_t i = 0; i < kImplicationPairsPerTable; ++i) {
      const SqlSketch a = testing::RandomSketch(gen, table);
      const SqlSketch b = gen() % 4 ? Restate(a, gen) : testing::RandomSketch(gen, table);
      if (!LfEqual(a, b)) continue;
      ++lf_pairs;
      if (!ExEqual(a, b, table)) ++violations;
    }
  }
  return {violations == 0 && lf_pairs > 0,
          std::to_string(violations) + " violations over " + std::to_string(lf_pairs) +
              " LF-equal pairs (" + std::to_string(kImplicationTables) + " tables x " +
              std::to_string(kImplicationPairsPerTable) + ")"};
}

Outcome SamplerProperties() {
  std::mt19937_64 gen(1003);
  std::size_t failures[4] = {};

  // (a) random samples do not depend on the question.
  for (int t = 0; t < 20; ++t) {
    const Table table = testing::RandomTable(gen, 1 + gen() % 60, 1 + gen() % 5);
    const auto index = ContentIndex::Build(table);
    const StrategySpec spec{Strategy::kRandom, 1 + gen() % 5};
    const std::uint64_t seed = gen();
    std::set<std::string> questions;
    while (questions.size() < kAgnosticQuestions) {
      questions.insert(testing::RandomQuestion(gen, table) + " " + std::to_string(questions.size()));
    }
    const SampleSet first = SampleFor(spec, table.schema, index, *questions.begin(), seed);
    for (const auto& q : questions) {
      if (!(SampleFor(spec, table.schema, index, q, seed) == first)) ++failures[0];
    }
  }

  // (b) relevance keeps every oracle match that fits, and everything em1 picks.
  // (c) em1 gives at most one sample per column.
  for (std::size_t i = 0; i < kSupersetPairs; ++i) {
    const Table table = testing::RandomTable(gen, 1 + gen() % 50, 1 + gen() % 5);
    const auto index = ContentIndex::Build(table);
    const std::string q = testing::RandomQuestion(gen, table);
    const std::size_t k = 1 + gen() % 5;
    const SampleSet rel = SampleRelevance(table.schema, index, q, k, gen());
    const SampleSet em1 = SampleExactMatchOne(table.schema, index, q);
    std::vector<std::set<std::string>> matched(table.column_count());
    for (const auto& m : testing::OracleMatches(table, q)) matched[m.column].insert(m.cell);
    for (std::size_t c = 0; c < table.column_count(); ++c) {
      const auto& col = rel.columns[c];
      auto has = [&](const std::string& v) {
        return std::find(col.begin(), col.end(), v) != col.end();
      };
      if (matched[c].size() <= k && !std::all_of(matched[c].begin(), matched[c].end(), has)) {
        ++failures[1];
      }
      if (!std::all_of(em1.columns[c].begin(), em1.columns[c].end(), has)) ++failures[1];
      if (em1.columns[c].size() > 1) ++failures[2];
    }
  }

  // (d) trie extraction equals brute-force containment.
  for (std::size_t i = 0; i < kSupersetPairs; ++i) {
    const std::size_t cols = 1 + gen() % 5;
    const Table table = testing::RandomTable(gen, 1 + gen() % (kMatchCellLimit / cols), cols);
    const auto index = ContentIndex::Build(table);
    const std::string q = testing::RandomQuestion(gen, table);
    if (index.ExtractMatches(q) != testing::OracleMatches(table, q)) ++failures[3];
  }

  const bool pass = std::all_of(std::begin(failures), std::end(failures),
                                [](std::size_t f) { return f == 0; });
  return {pass, "failures: agnostic " + std::to_string(failures[0]) + ", superset " +
                    std::to_string(failures[1]) + ", em1 " + std::to_string(failures[2]) +
                    ", extraction " + std::to_string(failures[3])};
}

Outcome SerializerProperties() {
  std::mt19937_64 gen(1004);
  std::size_t failures = 0, truncated = 0;
  for (std::size_t i = 0; i < kSerializerInputs; ++i) {
    const Table t = testing::RandomTable(gen, 1 + gen() % 40, 1 + gen() % 6);
    const std::string q = testing::RandomQuestion(gen, t);
    const SampleSet samples = SampleRandom(t, gen() % 6, gen());
    std::size_t need = 2 + Tokenize(q).size();
    for (const auto& h : t.schema.headers) need += Tokenize(h).size() + 1;
    const std::size_t budget = need + gen() % 40;
    const SerializedInput in = SerializeInput(q, t.schema, samples, budget);
    truncated += in.dropped_samples > 0;
    bool ok = in.size() <= budget;
    std::size_t question_tokens = 0;
    for (const auto& tok : in.tokens) question_tokens += tok.segment == Segment::kQuestion;
    ok = ok && question_tokens == Tokenize(q).size();
    const auto blocks = RecoverBlocks(in);
    ok = ok && blocks.size() == t.column_count();
    std::size_t kept = 0;
    for (std::size_t c = 0; ok && c < t.column_count(); ++c) {
      const auto& all = samples.columns[c];
      ok = blocks[c].header == t.schema.headers[c] && blocks[c].samples.size() <= all.size() &&
           std::equal(blocks[c].samples.begin(), blocks[c].samples.end(), all.begin());
      kept += blocks[c].samples.size();
    }
    ok = ok && kept + in.dropped_samples == samples.total();
    failures += !ok;
  }
  return {failures == 0, std::to_string(failures) + " failures in " +
                             std::to_string(kSerializerInputs) + " inputs (" +
                             std::to_string(truncated) + " truncated)"};
}

// One synthetic corpus shared by the training checks.
struct Workbench {
  SyntheticCorpus synth;
  Corpus train;
  Corpus held_out_keyword;
  Corpus probe;
  std::map<std::string, std::unique_ptr<Model>> models;
};

Workbench& Bench() {
  static Workbench* w = [] {
    auto* b = new Workbench;
    SynthConfig c;
    c.n_tables = 60;
    c.probe_tables = 10;
    b->synth = GenerateSyntheticCorpus(c);
    b->train = b->synth.Select(b->synth.train_tables, QuestionStyle::kVerbose);
    b->held_out_keyword =
        b->synth.Select(b->synth.held_out_tables, QuestionStyle::kKeyword, Split::kTest);
    b->probe = b->synth.Select(b->synth.probe_tables, QuestionStyle::kProbe, Split::kTest);
    return b;
  }();
  return *w;
}

TrainConfig ToyConfig(StrategySpec spec, bool augment) {
  TrainConfig c;
  c.model.d_model = 64;
  c.model.dropout = 0.1;
  c.epochs = 30;
  c.batch_size = 16;
  c.eval_every = c.epochs;
  c.spec = spec;
  c.augment = augment;
  c.augment_config.mix_ratio = 1.0;
  return c;
}

const Model& ToyModel(const std::string& name, StrategySpec spec, bool augment) {
  Workbench& w = Bench();
  auto& slot = w.models[name];
  if (!slot) {
    const auto t0 = std::chrono::steady_clock::now();
    TrainResult r = Train(w.train, w.synth.tables, ToyConfig(spec, augment));
    std::cout << "  trained " << name << " on " << r.history.trained << " examples in "
              << Fixed(Since(t0), 1) << "s\n";
    slot = std::make_unique<Model>(std::move(r.model));
  }
  return *slot;
}

Outcome GradientCheck() {
  const auto t0 = std::chrono::steady_clock::now();
  SynthConfig sc;
  sc.n_tables = 4;
  sc.seed = 21;
  const SyntheticCorpus s = GenerateSyntheticCorpus(sc);
  const Corpus train = s.Select(s.train_tables, QuestionStyle::kVerbose);
  ModelConfig mc;
  mc.d_model = 16;
  mc.heads = 2;
  mc.ff_dim = 32;
  mc.dropout = 0.0;
  mc.max_columns = 8;
  mc.seed = 3;
  const StrategySpec spec{Strategy::kRelevance, 3};
  // An example with at least one condition exercises every head.
  for (const auto& e : train.examples) {
    if (e.gold.conds.empty()) continue;
    Corpus one;
    one.examples = {e};
    Model model(mc, Vocabulary::Build(one, s.tables));
    const Predictor predictor(model, s.tables, spec, 1);
    const SerializedInput input = predictor.Serialize(e.table_id, e.question);
    const auto align = AlignGold(e.gold, e.question, input, mc.max_span);
    if (!align) continue;
    const Features feats = model.Featurize(input);
    auto loss = [&](ad::Tape& tape) {
      const HeadGraph g = model.Forward(tape, feats, static_cast<int>(e.gold.select_column),
                                        nullptr);
      return SketchLoss(tape, g, e.gold, *align);
    };
    const auto report = testing::MaxRelativeGradientError(model.parameters(), loss);
    const double secs = Since(t0);
    const bool all_blocks = report.per_block.size() == model.parameters().size();
    return {report.worst < kGradientTolerance && all_blocks && secs < kGradientSeconds,
            "max relative error " + Sci(report.worst) + " (" + report.worst_block +
                ") over " + std::to_string(report.per_block.size()) + " blocks, " +
                std::to_string(report.entries) + " entries, " + Fixed(secs, 1) + "s"};
  }
  return {false, "no alignable example"};
}

Outcome Overfit() {
  const Workbench& w = Bench();
  Corpus small;
  small.examples.assign(w.train.examples.begin(),
                        w.train.examples.begin() + static_cast<std::ptrdiff_t>(kOverfitExamples));
  TrainConfig c = ToyConfig({Strategy::kRelevance, 3}, false);
  c.model.dropout = 0.0;
  c.epochs = kOverfitEpochs;
  c.eval_every = 5;
  c.target_train_lf = kOverfitTarget;
  const auto t0 = std::chrono::steady_clock::now();
  const TrainResult r = Train(small, w.synth.tables, c);
  const double secs = Since(t0);
  double best = 0.0;
  for (const auto& e : r.history.epochs) best = std::max(best, e.train_lf.value_or(0.0));
  return {r.history.reached_target && secs < kOverfitSeconds,
          "train LF " + Fixed(best) + " after " + std::to_string(r.history.epochs.size()) +
              " epochs on " + std::to_string(r.history.trained) + " examples, " +
              Fixed(secs, 1) + "s"};
}

Outcome AugmentationGain() {
  const Workbench& w = Bench();
  const StrategySpec rel{Strategy::kRelevance, 3};
  const Model& plain = ToyModel(rel.ToString(), rel, false);
  const Model& augmented = ToyModel(rel.ToString() + "-aug", rel, true);
  const EvalReport a = Evaluate(plain, w.held_out_keyword, w.synth.tables, rel, 1);
  const EvalReport b = Evaluate(augmented, w.held_out_keyword, w.synth.tables, rel, 1);
  return {b.lf() - a.lf() >= kAugmentGain,
          "held-out keyword LF " + Fixed(a.lf()) + " -> " + Fixed(b.lf()) + " with augmentation (" +
              std::to_string(a.total) + " questions)"};
}

Outcome ContentGain() {
  const Workbench& w = Bench();
  const std::vector<StrategySpec> specs = {
      {Strategy::kNone, 0}, {Strategy::kRandom, 3}, {Strategy::kRelevance, 3}};
  std::vector<const Model*> models;
  for (const auto& s : specs) {
    models.push_back(&ToyModel(s.ToString() + "-aug", s, true));
  }
  const auto reports = CompareStrategies(models, w.probe, w.synth.tables, specs, 1);
  std::ofstream(OutDir() / "probe_compare.txt") << RenderComparison(reports);
  const double none_wcol = reports[0].accuracy(Subtask::kWcol);
  const double rel_wcol = reports[2].accuracy(Subtask::kWcol);
  const bool ordered = reports[2].lf() >= reports[1].lf() && reports[1].lf() >= reports[0].lf();
  return {rel_wcol - none_wcol >= kContentWcolGain && ordered,
          "probe wcol none " + Fixed(none_wcol) + " rel:3 " + Fixed(rel_wcol) + "; LF none " +
              Fixed(reports[0].lf()) + " rand:3 " + Fixed(reports[1].lf()) + " rel:3 " +
              Fixed(reports[2].lf()) + " (" + std::to_string(reports[0].total) + " questions)"};
}

// Least-squares slope of log(y) against log(x).
double LogLogSlope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    den += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return num / den;
}

Outcome SamplingBenchmark() {
  const fs::path out = OutDir();
  BenchConfig config;
  config.rows = {1000, 100000, 1000000};
  config.spec = {Strategy::kRandom, 3};
  const BenchReport rand = BenchSampling(config);
  config.spec = {Strategy::kRelevance, 3};
  const BenchReport rel = BenchSampling(config);
  std::ofstream(out / "bench_rand.json") << rand.ToJson().dump(2) << "\n";
  std::ofstream(out / "bench_rel.json") << rel.ToJson().dump(2) << "\n";

  double lo = 1e300, hi = 0;
  for (const auto& p : rand.points) {
    lo = std::min(lo, p.per_query_seconds);
    hi = std::max(hi, p.per_query_seconds);
  }
  std::vector<double> cells, setup, memory;
  for (const auto& p : rel.points) {
    cells.push_back(static_cast<double>(p.cells));
    setup.push_back(std::max(p.setup_seconds, 1e-9));
    memory.push_back(static_cast<double>(std::max<std::size_t>(p.peak_memory_bytes, 1)));
  }
  const double ratio = hi / lo;
  const double setup_slope = LogLogSlope(cells, setup);
  const double memory_slope = LogLogSlope(cells, memory);
  const bool files = fs::file_size(out / "bench_rand.json") > 0 &&
                     fs::file_size(out / "bench_rel.json") > 0;
  return {ratio <= kRandomQueryRatio && setup_slope <= kMaxGrowthExponent &&
              memory_slope <= kMaxGrowthExponent && files,
          "random per-query ratio " + Fixed(ratio, 2) + ", relevance setup exponent " +
              Fixed(setup_slope, 2) + ", memory exponent " + Fixed(memory_slope, 2) +
              ", reports in " + out.string()};
}

Outcome CliSmoke() {
  const fs::path out = OutDir() / "smoke";
  const std::string cmd = std::string("sh '") + SKETCHSQL_SMOKE_SCRIPT + "' '" +
                          SKETCHSQL_CLI_PATH + "' '" + out.string() + "' > '" +
                          (OutDir() / "smoke.log").string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  std::size_t manifests = 0;
  for (const char* sub : {"synth", "augment", "index", "train", "eval", "compare", "bench"}) {
    manifests += fs::exists(out / ("manifest-" + std::string(sub) + ".json"));
  }
  return {status == 0 && manifests == 7,
          "exit " + std::to_string(status) + ", " + std::to_string(manifests) + "/7 manifests"};
}

}  // namespace
}  // namespace sketchsql

int main(int argc, char** argv) {
  using namespace sketchsql;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> checks = {
      {"executor matches naive interpreter", ExecutorMatchesOracle},
      {"LF match implies EX match", LogicalFormImpliesExecution},
      {"sampler properties", SamplerProperties},
      {"serializer round trip and budget", SerializerProperties},
      {"gradient check at d=16", GradientCheck},
      {"overfit 64 examples", Overfit},
      {"augmentation gain on keyword questions", AugmentationGain},
      {"content gain on ambiguity probe", ContentGain},
      {"sampling benchmark scaling", SamplingBenchmark},
      {"CLI pipeline smoke", CliSmoke},
  };
  std::set<std::size_t> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::strtoul(argv[i], nullptr, 10));
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    if (!wanted.empty() && !wanted.count(i + 1)) continue;
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << checks[i].first
              << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
