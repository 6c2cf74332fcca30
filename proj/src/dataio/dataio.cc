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

#include "sketchsql/dataio.h"

#include <fstream>
#include <istream>
#include <ostream>

#include "sketchsql/text.h"

namespace sketchsql {

using nlohmann::json;

namespace {

// Numbers show up both as JSON numbers and as strings in real corpora.
std::string CellToString(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

int RequireInt(const json& v, std::string_view what) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    throw ValidationError(std::string(what) + " must be an integer");
  }
  return v.get<int>();
}

const json& RequireField(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ValidationError(std::string("missing field '") + key + "'");
  }
  return *it;
}

bool IsBlank(const std::string& line) { return Trim(line).empty(); }

}  // namespace

std::string_view SplitName(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kDev:
      return "dev";
    case Split::kTest:
      return "test";
  }
  return "train";
}

Example ExampleFromJson(const json& j) {
  if (!j.is_object()) throw ValidationError("record is not an object");
  Example e;
  const json& q = RequireField(j, "question");
  if (!q.is_string() || Trim(q.get<std::string>()).empty()) {
    throw ValidationError("question must be a non-empty string");
  }
  e.question = q.get<std::string>();
  const json& t = RequireField(j, "table_id");
  if (!t.is_string()) throw ValidationError("table_id must be a string");
  e.table_id = t.get<std::string>();

  const json& sql = RequireField(j, "sql");
  if (!sql.is_object()) throw ValidationError("sql must be an object");
  const int sel = RequireInt(RequireField(sql, "sel"), "sql.sel");
  if (sel < 0) throw ValidationError("sql.sel must be non-negative");
  e.gold.select_column = static_cast<std::size_t>(sel);
  e.gold.agg = AggOpFromIndex(RequireInt(RequireField(sql, "agg"), "sql.agg"));
  const json& conds = RequireField(sql, "conds");
  if (!conds.is_array()) throw ValidationError("sql.conds must be an array");
  for (const auto& c : conds) {
    if (!c.is_array() || c.size() != 3) {
      throw ValidationError("each condition must be [column, op, value]");
    }
    const int col = RequireInt(c[0], "condition column");
    if (col < 0) throw ValidationError("condition column must be non-negative");
    Condition cond;
    cond.column = static_cast<std::size_t>(col);
    cond.op = CondOpFromIndex(RequireInt(c[1], "condition op"));
    cond.value = CellToString(c[2]);
    e.gold.conds.push_back(std::move(cond));
  }

  if (auto it = j.find("id"); it != j.end()) {
    e.id = it->is_string() ? it->get<std::string>() : it->dump();
  }
  if (auto it = j.find("provenance"); it != j.end() && it->is_string()) {
    e.provenance = ProvenanceFromName(it->get<std::string>());
  }
  if (auto it = j.find("style"); it != j.end() && it->is_string()) {
    e.style = QuestionStyleFromName(it->get<std::string>());
  }
  return e;
}

json ExampleToJson(const Example& e) {
  json conds = json::array();
  for (const auto& c : e.gold.conds) {
    conds.push_back({c.column, ToIndex(c.op), c.value});
  }
  json j;
  if (!e.id.empty()) j["id"] = e.id;
  j["question"] = e.question;
  j["table_id"] = e.table_id;
  j["sql"] = {{"sel", e.gold.select_column},
              {"agg", ToIndex(e.gold.agg)},
              {"conds", std::move(conds)}};
  if (e.provenance != Provenance::kOriginal) {
    j["provenance"] = std::string(ProvenanceName(e.provenance));
  }
  if (e.style != QuestionStyle::kUnspecified) {
    j["style"] = std::string(QuestionStyleName(e.style));
  }
  return j;
}

Table TableFromJson(const json& j, LoadDiagnostics* diag) {
  if (!j.is_object()) throw ValidationError("table record is not an object");
  Table t;
  const json& id = RequireField(j, "id");
  if (!id.is_string()) throw ValidationError("table id must be a string");
  t.schema.table_id = id.get<std::string>();

  const json& header = RequireField(j, "header");
  if (!header.is_array()) throw ValidationError("header must be an array");
  for (const auto& h : header) t.schema.headers.push_back(CellToString(h));

  if (auto it = j.find("types"); it != j.end()) {
    if (!it->is_array()) throw ValidationError("types must be an array");
    for (const auto& ty : *it) {
      const std::string name = ToLowerAscii(CellToString(ty));
      if (name == "real") {
        t.schema.types.push_back(ColumnType::kReal);
      } else {
        if (name != "text" && diag != nullptr) {
          diag->warnings.push_back("table '" + t.schema.table_id +
                                   "': unknown column type '" + name +
                                   "' mapped to text");
        }
        t.schema.types.push_back(ColumnType::kText);
      }
    }
  } else {
    t.schema.types.assign(t.schema.headers.size(), ColumnType::kText);
  }

  const json& rows = RequireField(j, "rows");
  if (!rows.is_array()) throw ValidationError("rows must be an array");
  t.rows.reserve(rows.size());
  for (const auto& r : rows) {
    if (!r.is_array()) throw ValidationError("each row must be an array");
    std::vector<std::string> row;
    row.reserve(r.size());
    for (const auto& cell : r) row.push_back(CellToString(cell));
    t.rows.push_back(std::move(row));
  }
  ValidateTable(t);
  return t;
}

json TableToJson(const Table& t) {
  json types = json::array();
  for (auto ty : t.schema.types) types.push_back(std::string(ColumnTypeName(ty)));
  return {{"id", t.schema.table_id},
          {"header", t.schema.headers},
          {"types", std::move(types)},
          {"rows", t.rows}};
}

Corpus ParseExamples(std::istream& in, LoadMode mode, LoadDiagnostics* diag,
                     Split split) {
  Corpus corpus;
  corpus.split = split;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (IsBlank(line)) continue;
    try {
      Example e = ExampleFromJson(json::parse(line));
      if (e.id.empty()) e.id = std::string(SplitName(split)) + "-" + std::to_string(lineno);
      corpus.examples.push_back(std::move(e));
    } catch (const std::exception& ex) {
      const std::string msg = "line " + std::to_string(lineno) + ": " + ex.what();
      if (mode == LoadMode::kStrict) throw ValidationError(msg);
      if (diag != nullptr) {
        diag->warnings.push_back(msg);
        ++diag->skipped_lines;
      }
    }
  }
  if (corpus.examples.empty() && diag != nullptr) {
    diag->warnings.push_back("corpus is empty");
  }
  return corpus;
}

Corpus LoadExamples(const std::filesystem::path& path, LoadMode mode,
                    LoadDiagnostics* diag, Split split) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  return ParseExamples(in, mode, diag, split);
}

TableMap ParseTables(std::istream& in, LoadDiagnostics* diag) {
  TableMap tables;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (IsBlank(line)) continue;
    Table t;
    try {
      t = TableFromJson(json::parse(line), diag);
    } catch (const std::exception& ex) {
      throw ValidationError("line " + std::to_string(lineno) + ": " + ex.what());
    }
    const std::string id = t.schema.table_id;
    if (!tables.emplace(id, std::move(t)).second) {
      throw ValidationError("line " + std::to_string(lineno) +
                            ": duplicate table_id '" + id + "'");
    }
  }
  return tables;
}

TableMap LoadTables(const std::filesystem::path& path, LoadDiagnostics* diag) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  return ParseTables(in, diag);
}

void WriteExamples(std::ostream& out, const Corpus& corpus) {
  for (const auto& e : corpus.examples) out << ExampleToJson(e).dump() << '\n';
}

void WriteExamples(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  WriteExamples(out, corpus);
}

void WriteTables(std::ostream& out, const TableMap& tables) {
  for (const auto& [id, t] : tables) out << TableToJson(t).dump() << '\n';
}

void WriteTables(const std::filesystem::path& path, const TableMap& tables) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  WriteTables(out, tables);
}

json CorpusReport::ToJson() const {
  json v = json::array();
  for (const auto& x : violations) {
    v.push_back({{"index", x.example_index},
                 {"id", x.example_id},
                 {"message", x.message}});
  }
  json conds = json::object();
  for (const auto& [k, n] : conds_histogram) conds[std::to_string(k)] = n;
  json qlen = json::object();
  for (const auto& [k, n] : question_length_histogram) qlen[std::to_string(k)] = n;
  return {{"examples", examples},
          {"violation_count", violations.size()},
          {"violations", std::move(v)},
          {"agg_histogram", agg_histogram},
          {"conds_histogram", std::move(conds)},
          {"question_length_histogram", std::move(qlen)},
          {"provenance_histogram", provenance_histogram}};
}

CorpusReport ValidateCorpus(const Corpus& corpus, const TableMap& tables,
                            std::size_t max_conds) {
  CorpusReport report;
  report.examples = corpus.examples.size();
  for (std::size_t i = 0; i < corpus.examples.size(); ++i) {
    const Example& e = corpus.examples[i];
    const std::string agg(AggName(e.gold.agg));
    ++report.agg_histogram[agg.empty() ? "NONE" : agg];
    ++report.conds_histogram[e.gold.conds.size()];
    ++report.question_length_histogram[Tokenize(e.question).size()];
    ++report.provenance_histogram[std::string(ProvenanceName(e.provenance))];

    auto it = tables.find(e.table_id);
    if (it == tables.end()) {
      report.violations.push_back(
          {i, e.id, "dangling table_id '" + e.table_id + "'"});
      continue;
    }
    for (const auto& v : ValidateSketch(e.gold, it->second.schema, max_conds)) {
      report.violations.push_back(
          {i, e.id, std::string(ViolationName(v.kind)) + ": " + v.message});
    }
  }
  return report;
}

}  // namespace sketchsql
