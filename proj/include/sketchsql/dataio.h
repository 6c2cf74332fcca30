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

// Line-delimited corpus files in the WikiSQL layout.
//
// Examples:  {"question": ..., "table_id": ..., "sql": {"sel": int,
//             "agg": int, "conds": [[col, op, value], ...]}}
// Tables:    {"id": ..., "header": [...], "types": [...], "rows": [[...]]}
//
// Optional example fields written by this library: "id", "provenance",
// "style". Unknown fields are ignored on load.

#ifndef SKETCHSQL_DATAIO_H_
#define SKETCHSQL_DATAIO_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "sketchsql/core.h"

namespace sketchsql {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Split { kTrain, kDev, kTest };
std::string_view SplitName(Split s);

struct Corpus {
  std::vector<Example> examples;
  Split split = Split::kTrain;

  bool empty() const { return examples.empty(); }
  std::size_t size() const { return examples.size(); }
};

enum class LoadMode { kStrict, kLenient };

struct LoadDiagnostics {
  std::vector<std::string> warnings;
  std::size_t skipped_lines = 0;
};

Example ExampleFromJson(const nlohmann::json& j);
nlohmann::json ExampleToJson(const Example& e);
Table TableFromJson(const nlohmann::json& j, LoadDiagnostics* diag = nullptr);
nlohmann::json TableToJson(const Table& t);

/// Strict mode throws ValidationError naming the first bad line; lenient mode
/// skips it and records a warning.
Corpus ParseExamples(std::istream& in, LoadMode mode = LoadMode::kStrict,
                     LoadDiagnostics* diag = nullptr,
                     Split split = Split::kTrain);
Corpus LoadExamples(const std::filesystem::path& path,
                    LoadMode mode = LoadMode::kStrict,
                    LoadDiagnostics* diag = nullptr,
                    Split split = Split::kTrain);

TableMap ParseTables(std::istream& in, LoadDiagnostics* diag = nullptr);
TableMap LoadTables(const std::filesystem::path& path,
                    LoadDiagnostics* diag = nullptr);

void WriteExamples(std::ostream& out, const Corpus& corpus);
void WriteExamples(const std::filesystem::path& path, const Corpus& corpus);
void WriteTables(std::ostream& out, const TableMap& tables);
void WriteTables(const std::filesystem::path& path, const TableMap& tables);

struct CorpusViolation {
  std::size_t example_index;
  std::string example_id;
  std::string message;
};

struct CorpusReport {
  std::size_t examples = 0;
  std::vector<CorpusViolation> violations;
  std::map<std::string, std::size_t> agg_histogram;
  std::map<std::size_t, std::size_t> conds_histogram;
  // Question length in tokens.
  std::map<std::size_t, std::size_t> question_length_histogram;
  std::map<std::string, std::size_t> provenance_histogram;

  bool ok() const { return violations.empty(); }
  nlohmann::json ToJson() const;
};

CorpusReport ValidateCorpus(const Corpus& corpus, const TableMap& tables,
                            std::size_t max_conds = kDefaultMaxConds);

}  // namespace sketchsql

#endif  // SKETCHSQL_DATAIO_H_
