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

// Search-style question synthesis from gold sketches, and rewriting of
// relational phrases ("more than") into operator symbols (">").

#ifndef SKETCHSQL_AUGMENT_H_
#define SKETCHSQL_AUGMENT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "sketchsql/core.h"
#include "sketchsql/dataio.h"
#include "sketchsql/random.h"

namespace sketchsql {

struct Replacement {
  std::string pattern;  // lowercase ngram
  CondOp op;
  std::string symbol;
};

/// Patterns are kept sorted longest first.
class ReplacementMap {
 public:
  ReplacementMap() = default;
  explicit ReplacementMap(std::vector<Replacement> entries);

  static ReplacementMap Defaults();
  /// One `pattern <TAB> op <TAB> symbol` per line; op is a symbol (= > <) or
  /// a name (eq gt lt). Blank lines and lines starting with '#' are skipped.
  static ReplacementMap Parse(std::istream& in);
  static ReplacementMap Load(const std::filesystem::path& path);

  const std::vector<Replacement>& entries() const { return entries_; }
  /// First-listed pattern for `op`, or "" when none is configured.
  std::string PhraseFor(CondOp op) const;

 private:
  std::vector<Replacement> entries_;
  std::string first_phrase_[kNumCondOps];
};

struct AugmentConfig {
  std::size_t variants_per_example = 4;
  bool include_select_prefix = true;
  bool include_select_suffix = true;
  bool shuffle_conditions = true;
  bool swap_column_value = true;
  double symbol_substitution_probability = 0.5;
  // Augmented examples added per original example.
  double mix_ratio = 0.5;
  std::uint64_t seed = 11;

  void Validate() const;
};

/// Every distinct question the templates can build for one example: select
/// header first or last (per the prefix/suffix flags); each condition as the
/// bare value, "header value" or "value header" (GT/LT conditions carry an
/// operator phrase); every condition order. Aggregations add a word in front
/// of the select header ("number of" for COUNT). Lowercase, deduplicated,
/// in a fixed order.
std::vector<std::string> EnumerateShortQuestions(const Example& example,
                                                 const TableSchema& schema,
                                                 const AugmentConfig& config,
                                                 const ReplacementMap& map);

/// Up to variants_per_example distinct questions drawn from the enumeration;
/// each carries the unchanged gold sketch and provenance kSynthesized.
std::vector<Example> SynthesizeShortQuestions(const Example& example,
                                              const TableSchema& schema,
                                              const AugmentConfig& config,
                                              const ReplacementMap& map,
                                              Rng& rng);

/// Replaces relational ngrams with symbols, each eligible occurrence with
/// probability `probability`. An ngram is eligible only when the gold sketch
/// has a condition with the same operator.
Example SubstituteRelationalSymbols(const Example& example,
                                    const ReplacementMap& map,
                                    double probability, Rng& rng);

struct AugmentStats {
  std::size_t originals = 0;
  std::size_t candidates = 0;
  std::size_t added = 0;
  std::map<std::string, std::size_t> provenance;

  nlohmann::json ToJson() const;
};

/// Originals plus round(mix_ratio * |corpus|) augmented examples drawn from the
/// pooled variants, shuffled under the config seed.
Corpus AugmentCorpus(const Corpus& corpus, const TableMap& tables,
                     const AugmentConfig& config,
                     const ReplacementMap& map = ReplacementMap::Defaults(),
                     AugmentStats* stats = nullptr);

}  // namespace sketchsql

#endif  // SKETCHSQL_AUGMENT_H_
