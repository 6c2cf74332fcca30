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

// Deterministic synthetic mini-corpora.
//
// Every table column is drawn from a value archetype (person names, brands,
// small integers, years, or one of several categorical families). A column's
// header is either typed (a synonym that names the archetype, e.g. "Rider") or
// opaque (a generic name such as "Entry" that says nothing about its content).
// Each gold sketch yields a verbose question in the style of crowd-written
// benchmark questions and a keyword question in the style of search input.
// Probe tables are mostly opaque, and their questions omit where-column
// headers, so the where column can only be recovered from the table content.

#ifndef SKETCHSQL_SYNTH_H_
#define SKETCHSQL_SYNTH_H_

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "sketchsql/core.h"
#include "sketchsql/dataio.h"

namespace sketchsql {

enum class Archetype { kPerson, kBrand, kSmallInt, kYear, kCategory };
std::string_view ArchetypeName(Archetype a);

struct CategoryFamily {
  std::string name;
  std::vector<std::string> headers;
  std::vector<std::string> values;
};

struct ValuePools {
  std::vector<std::string> first_names;
  std::vector<std::string> last_names;
  std::vector<std::string> brands;
  int small_int_min = 1;
  int small_int_max = 99;
  int year_min = 1960;
  int year_max = 2023;
  std::vector<CategoryFamily> categories;

  std::vector<std::string> person_headers;
  std::vector<std::string> brand_headers;
  std::vector<std::string> small_int_headers;
  std::vector<std::string> year_headers;
  std::vector<std::string> opaque_headers;
};

ValuePools DefaultValuePools();

struct SynthConfig {
  std::size_t n_tables = 40;
  std::size_t rows_per_table = 12;
  std::size_t min_columns = 4;
  std::size_t max_columns = 6;
  std::size_t questions_per_table = 8;
  // Extra tables with mostly opaque headers and content-only questions.
  std::size_t probe_tables = 0;
  std::size_t probe_questions_per_table = 6;
  double opaque_header_rate = 0.25;
  // Fraction of regular tables whose questions are held out from training.
  double held_out_fraction = 0.25;
  std::uint64_t seed = 7;
  ValuePools pools = DefaultValuePools();

  /// Throws ValidationError when a count is zero or a range is inverted.
  void Validate() const;
};

struct ColumnManifestEntry {
  std::string table_id;
  std::size_t column;
  std::string header;
  Archetype archetype;
  std::string family;
  bool opaque;
};

struct SyntheticCorpus {
  // Verbose, keyword and probe questions for every table; Example::style says
  // which.
  Corpus corpus;
  TableMap tables;
  std::vector<ColumnManifestEntry> manifest;
  std::set<std::string> train_tables;
  std::set<std::string> held_out_tables;
  std::set<std::string> probe_tables;

  /// Examples on `table_ids` with the given style.
  Corpus Select(const std::set<std::string>& table_ids, QuestionStyle style,
                Split split = Split::kTrain) const;
  nlohmann::json ManifestJson() const;
};

/// Pure function of the config: identical configs give identical corpora.
SyntheticCorpus GenerateSyntheticCorpus(const SynthConfig& config);

}  // namespace sketchsql

#endif  // SKETCHSQL_SYNTH_H_
