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
#include <atomic>
#include <cstdio>
#include <exception>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>
#include <unordered_map>

#include "sketchsql/executor.h"
#include "sketchsql/text.h"
#include "sketchsql/traineval.h"

namespace sketchsql {

Predictor::Predictor(const Model& model, const TableMap& tables, StrategySpec spec,
                     std::uint64_t seed, std::size_t budget)
    : model_(model), tables_(tables), spec_(spec), seed_(seed), budget_(budget) {}

const Table& Predictor::table(const std::string& table_id) const {
  auto it = tables_.find(table_id);
  if (it == tables_.end()) throw ValidationError("unknown table '" + table_id + "'");
  return it->second;
}

const Predictor::TableCache& Predictor::Cache(const std::string& table_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = cache_.find(table_id);
  if (it != cache_.end()) return *it->second;
  const Table& t = table(table_id);
  auto c = std::make_unique<TableCache>();
  if (spec_.strategy != Strategy::kNone) c->index = ContentIndex::Build(t);
  if (spec_.strategy == Strategy::kRandom) {
    c->offline = SampleRandom(c->index, t.schema, spec_.k, seed_);
  }
  return *cache_.emplace(table_id, std::move(c)).first->second;
}

SampleSet Predictor::Samples(const std::string& table_id, std::string_view question) const {
  const Table& t = table(table_id);
  if (spec_.strategy == Strategy::kNone) return EmptySamples(t.schema);
  const TableCache& c = Cache(table_id);
  return SampleFor(spec_, t.schema, c.index, question, seed_, &c.offline);
}

SerializedInput Predictor::Serialize(const std::string& table_id,
                                     std::string_view question) const {
  return SerializeInput(question, table(table_id).schema, Samples(table_id, question), budget_);
}

SqlSketch Predictor::Predict(const std::string& table_id, std::string_view question) const {
  const SerializedInput input = Serialize(table_id, question);
  return DecodeSketch(model_.Predict(model_.Featurize(input)), table(table_id).schema,
                      question, input, model_.config().max_span);
}

std::string_view SubtaskName(Subtask s) {
  static constexpr std::string_view kNames[] = {"sel", "agg", "wnum", "wcol", "wop", "wval"};
  return kNames[static_cast<int>(s)];
}

bool SubtaskEqual(Subtask s, const SqlSketch& pred, const SqlSketch& gold) {
  using Key = std::tuple<std::size_t, int, std::string>;
  auto keys = [s](const SqlSketch& k) {
    std::vector<Key> out;
    for (const auto& c : k.conds) {
      out.emplace_back(c.column, s == Subtask::kWop ? ToIndex(c.op) : 0,
                       s == Subtask::kWval ? NormalizeValue(c.value) : std::string());
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  switch (s) {
    case Subtask::kSel:
      return pred.select_column == gold.select_column;
    case Subtask::kAgg:
      return pred.agg == gold.agg;
    case Subtask::kWnum:
      return pred.conds.size() == gold.conds.size();
    case Subtask::kWcol:
    case Subtask::kWop:
    case Subtask::kWval:
      return keys(pred) == keys(gold);
  }
  return false;
}

namespace {

double Ratio(std::size_t a, std::size_t b) {
  return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
}

nlohmann::json SketchJson(const SqlSketch& s) {
  nlohmann::json conds = nlohmann::json::array();
  for (const auto& c : s.conds) conds.push_back({c.column, ToIndex(c.op), c.value});
  return {{"sel", s.select_column}, {"agg", ToIndex(s.agg)}, {"conds", conds}};
}

SqlSketch SketchFromJson(const nlohmann::json& j) {
  SqlSketch s;
  s.select_column = j.at("sel").get<std::size_t>();
  s.agg = AggOpFromIndex(j.at("agg").get<int>());
  for (const auto& c : j.at("conds")) {
    if (!c.is_array() || c.size() != 3) throw ValidationError("condition must be [col, op, value]");
    s.conds.push_back({c[0].get<std::size_t>(), CondOpFromIndex(c[1].get<int>()),
                       c[2].is_string() ? c[2].get<std::string>() : c[2].dump()});
  }
  return s;
}

}  // namespace

double EvalReport::lf() const { return Ratio(lf_correct, total); }
double EvalReport::ex() const { return Ratio(ex_correct, total); }
double EvalReport::accuracy(Subtask s) const {
  return Ratio(subtask_correct[static_cast<int>(s)], total);
}

std::vector<const ExampleRecord*> EvalReport::errors() const {
  std::vector<const ExampleRecord*> out;
  for (const auto& r : records) {
    if (!r.lf || !r.ex) out.push_back(&r);
  }
  return out;
}

nlohmann::json EvalReport::ToJson() const {
  nlohmann::json sub;
  for (int i = 0; i < kNumSubtasks; ++i) {
    sub[std::string(SubtaskName(static_cast<Subtask>(i)))] = accuracy(static_cast<Subtask>(i));
  }
  nlohmann::json errs = nlohmann::json::array();
  for (const ExampleRecord* r : errors()) {
    errs.push_back({{"id", r->id},
                    {"table_id", r->table_id},
                    {"question", r->question},
                    {"predicted", r->predicted_sql},
                    {"gold", r->gold_sql},
                    {"lf", r->lf},
                    {"ex", r->ex}});
  }
  return {{"label", label},     {"total", total},        {"lf", lf()},
          {"ex", ex()},         {"lf_correct", lf_correct}, {"ex_correct", ex_correct},
          {"subtasks", sub},    {"errors", errs}};
}

EvalReport EvaluatePredictions(const Corpus& corpus, const TableMap& tables,
                               const std::vector<SqlSketch>& predictions, std::string label) {
  if (predictions.size() != corpus.size()) {
    throw ValidationError("expected one prediction per example");
  }
  EvalReport r;
  r.label = std::move(label);
  r.total = corpus.size();
  r.records.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Example& e = corpus.examples[i];
    auto it = tables.find(e.table_id);
    if (it == tables.end()) throw ValidationError("missing table '" + e.table_id + "'");
    const Table& t = it->second;
    ExampleRecord rec;
    rec.id = e.id;
    rec.table_id = e.table_id;
    rec.question = e.question;
    rec.predicted = predictions[i];
    rec.gold = e.gold;
    rec.gold_sql = RenderSql(e.gold, t.schema);
    const bool valid = ValidateSketch(rec.predicted, t.schema).empty();
    rec.predicted_sql = valid ? RenderSql(rec.predicted, t.schema) : "<invalid sketch>";
    rec.lf = LfEqual(rec.predicted, rec.gold);
    rec.ex = valid && ExEqual(rec.predicted, rec.gold, t);
    for (int s = 0; s < kNumSubtasks; ++s) {
      rec.subtask[s] = SubtaskEqual(static_cast<Subtask>(s), rec.predicted, rec.gold);
      r.subtask_correct[s] += rec.subtask[s];
    }
    r.lf_correct += rec.lf;
    r.ex_correct += rec.ex;
    r.records.push_back(std::move(rec));
  }
  return r;
}

EvalReport Evaluate(const Model& model, const Corpus& corpus, const TableMap& tables,
                    const StrategySpec& spec, std::uint64_t seed, std::size_t budget,
                    std::size_t threads) {
  if (corpus.empty()) throw ValidationError("evaluation corpus is empty");
  for (const auto& e : corpus.examples) {
    if (!tables.contains(e.table_id)) throw ValidationError("missing table '" + e.table_id + "'");
  }
  const Predictor predictor(model, tables, spec, seed, budget);
  std::vector<SqlSketch> preds(corpus.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, corpus.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (std::size_t i = next++; i < corpus.size(); i = next++) {
      try {
        const Example& e = corpus.examples[i];
        preds[i] = predictor.Predict(e.table_id, e.question);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return EvaluatePredictions(corpus, tables, preds, spec.ToString());
}

void WritePredictions(std::ostream& out, const EvalReport& report) {
  for (const auto& r : report.records) {
    const nlohmann::json j = {{"id", r.id},     {"table_id", r.table_id},
                              {"pred", SketchJson(r.predicted)},
                              {"sql", r.predicted_sql}, {"lf", r.lf}, {"ex", r.ex}};
    out << j.dump() << '\n';
  }
}

std::vector<SqlSketch> ReadPredictions(std::istream& in, const Corpus& corpus) {
  std::unordered_map<std::string, SqlSketch> by_id;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      by_id[j.at("id").get<std::string>()] = SketchFromJson(j.at("pred"));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("prediction line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  std::vector<SqlSketch> out;
  out.reserve(corpus.size());
  for (const auto& e : corpus.examples) {
    auto it = by_id.find(e.id);
    if (it == by_id.end()) throw ValidationError("no prediction for example '" + e.id + "'");
    out.push_back(it->second);
  }
  return out;
}

std::vector<EvalReport> CompareStrategies(const std::vector<const Model*>& models,
                                          const Corpus& corpus, const TableMap& tables,
                                          const std::vector<StrategySpec>& specs,
                                          std::uint64_t seed, std::size_t budget) {
  if (specs.empty()) throw ValidationError("no strategies to compare");
  if (models.size() != 1 && models.size() != specs.size()) {
    throw ValidationError("give one model, or one model per strategy");
  }
  std::vector<EvalReport> out;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const Model* m = models.size() == 1 ? models[0] : models[i];
    if (m == nullptr) throw ValidationError("null model");
    out.push_back(Evaluate(*m, corpus, tables, specs[i], seed, budget));
  }
  return out;
}

std::string RenderComparison(const std::vector<EvalReport>& reports) {
  std::size_t width = 8;
  for (const auto& r : reports) width = std::max(width, r.label.size());
  std::ostringstream out;
  auto cell = [&out](const std::string& s, std::size_t w) {
    out << s << std::string(w > s.size() ? w - s.size() : 0, ' ');
  };
  cell("strategy", width + 2);
  for (const char* h : {"LF", "EX", "sel", "agg", "wnum", "wcol", "wop", "wval"}) cell(h, 8);
  out << "n\n";
  char buf[16];
  for (const auto& r : reports) {
    cell(r.label, width + 2);
    std::vector<double> vals = {r.lf(), r.ex()};
    for (int s = 0; s < kNumSubtasks; ++s) vals.push_back(r.accuracy(static_cast<Subtask>(s)));
    for (double v : vals) {
      std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * v);
      cell(buf, 8);
    }
    out << r.total << '\n';
  }
  return out.str();
}

nlohmann::json ComparisonJson(const std::vector<EvalReport>& reports) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json row = {{"strategy", r.label}, {"total", r.total}, {"lf", r.lf()},
                          {"ex", r.ex()}};
    for (int s = 0; s < kNumSubtasks; ++s) {
      row[std::string(SubtaskName(static_cast<Subtask>(s)))] = r.accuracy(static_cast<Subtask>(s));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace sketchsql
