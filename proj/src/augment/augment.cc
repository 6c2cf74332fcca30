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
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "sketchsql/text.h"

namespace sketchsql {

namespace {

std::string_view AggWord(AggOp op) {
  switch (op) {
    case AggOp::kNone:
      return "";
    case AggOp::kMax:
      return "highest";
    case AggOp::kMin:
      return "lowest";
    case AggOp::kCount:
      return "number of";
    case AggOp::kSum:
      return "total";
    case AggOp::kAvg:
      return "average";
  }
  return "";
}

enum class CondForm { kValueOnly, kHeaderValue, kValueHeader };

std::string CondPhrase(const Condition& c, const TableSchema& schema,
                       CondForm form, const ReplacementMap& map) {
  const std::string header = ToLowerAscii(schema.headers[c.column]);
  std::string value = ToLowerAscii(Trim(c.value));
  if (c.op != CondOp::kEq) {
    std::string phrase = map.PhraseFor(c.op);
    if (phrase.empty()) phrase = std::string(CondSymbol(c.op));
    value = phrase + " " + value;
  }
  switch (form) {
    case CondForm::kValueOnly:
      return value;
    case CondForm::kHeaderValue:
      return header + " " + value;
    case CondForm::kValueHeader:
      return value + " " + header;
  }
  return value;
}

std::string Assemble(const std::string& select, bool select_first,
                     const std::vector<std::string>& conds) {
  std::string out;
  auto append = [&out](const std::string& s) {
    if (s.empty()) return;
    if (!out.empty()) out += ' ';
    out += s;
  };
  if (select_first) append(select);
  for (const auto& c : conds) append(c);
  if (!select_first) append(select);
  return out;
}

std::string SelectPhrase(const Example& e, const TableSchema& schema) {
  std::string sel = ToLowerAscii(schema.headers[e.gold.select_column]);
  const std::string_view word = AggWord(e.gold.agg);
  return word.empty() ? sel : std::string(word) + " " + sel;
}

std::vector<bool> SelectPlacements(const AugmentConfig& config) {
  std::vector<bool> out;
  if (config.include_select_prefix) out.push_back(true);
  if (config.include_select_suffix) out.push_back(false);
  if (out.empty()) out.push_back(true);
  return out;
}

std::vector<CondForm> Forms(const AugmentConfig& config) {
  std::vector<CondForm> out = {CondForm::kValueOnly, CondForm::kHeaderValue};
  if (config.swap_column_value) out.push_back(CondForm::kValueHeader);
  return out;
}

struct Occurrence {
  std::size_t begin;
  std::size_t end;
  const Replacement* entry;
};

// Leftmost-longest, word-anchored, non-overlapping occurrences.
std::vector<Occurrence> FindOccurrences(const std::string& lower,
                                        const ReplacementMap& map) {
  std::vector<Occurrence> out;
  std::size_t pos = 0;
  while (pos < lower.size()) {
    const Replacement* best = nullptr;
    if (IsWordBoundary(lower, pos)) {
      for (const auto& r : map.entries()) {  // longest first
        if (lower.compare(pos, r.pattern.size(), r.pattern) == 0 &&
            IsWordBoundary(lower, pos + r.pattern.size())) {
          best = &r;
          break;
        }
      }
    }
    if (best != nullptr) {
      out.push_back({pos, pos + best->pattern.size(), best});
      pos += best->pattern.size();
    } else {
      ++pos;
    }
  }
  return out;
}

}  // namespace

ReplacementMap::ReplacementMap(std::vector<Replacement> entries)
    : entries_(std::move(entries)) {
  for (auto& e : entries_) {
    e.pattern = NormalizeValue(e.pattern);
    if (e.pattern.empty()) throw ValidationError("empty replacement pattern");
    auto& first = first_phrase_[ToIndex(e.op)];
    if (first.empty()) first = e.pattern;
  }
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const Replacement& a, const Replacement& b) {
                     return a.pattern.size() > b.pattern.size();
                   });
}

ReplacementMap ReplacementMap::Defaults() {
  return ReplacementMap({{"more than", CondOp::kGt, ">"},
                         {"bigger than", CondOp::kGt, ">"},
                         {"larger than", CondOp::kGt, ">"},
                         {"greater than", CondOp::kGt, ">"},
                         {"over", CondOp::kGt, ">"},
                         {"above", CondOp::kGt, ">"},
                         {"less than", CondOp::kLt, "<"},
                         {"smaller than", CondOp::kLt, "<"},
                         {"fewer than", CondOp::kLt, "<"},
                         {"under", CondOp::kLt, "<"},
                         {"below", CondOp::kLt, "<"}});
}

ReplacementMap ReplacementMap::Parse(std::istream& in) {
  std::vector<Replacement> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, '\t');) fields.push_back(Trim(f));
    if (fields.size() != 3) {
      throw ValidationError("replacement map line " + std::to_string(lineno) +
                            ": expected 3 tab-separated fields");
    }
    entries.push_back({fields[0], CondOpFromSymbol(fields[1]), fields[2]});
  }
  return ReplacementMap(std::move(entries));
}

ReplacementMap ReplacementMap::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  return Parse(in);
}

std::string ReplacementMap::PhraseFor(CondOp op) const {
  return first_phrase_[ToIndex(op)];
}

void AugmentConfig::Validate() const {
  if (symbol_substitution_probability < 0.0 || symbol_substitution_probability > 1.0) {
    throw ValidationError("symbol_substitution_probability must lie in [0, 1]");
  }
  if (mix_ratio < 0.0) throw ValidationError("mix_ratio must be >= 0");
}

std::vector<std::string> EnumerateShortQuestions(const Example& example,
                                                 const TableSchema& schema,
                                                 const AugmentConfig& config,
                                                 const ReplacementMap& map) {
  const std::string select = SelectPhrase(example, schema);
  const auto placements = SelectPlacements(config);
  const auto forms = Forms(config);
  const auto& conds = example.gold.conds;

  std::vector<std::size_t> order(conds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<std::string> out;
  std::set<std::string> seen;
  do {
    // Odometer over per-condition forms.
    std::vector<std::size_t> pick(conds.size(), 0);
    while (true) {
      std::vector<std::string> phrases;
      for (std::size_t i = 0; i < order.size(); ++i) {
        phrases.push_back(CondPhrase(conds[order[i]], schema, forms[pick[i]], map));
      }
      for (bool first : placements) {
        std::string q = Assemble(select, first, phrases);
        if (seen.insert(q).second) out.push_back(std::move(q));
      }
      std::size_t i = 0;
      while (i < pick.size() && ++pick[i] == forms.size()) pick[i++] = 0;
      if (i == pick.size()) break;
    }
  } while (config.shuffle_conditions && std::next_permutation(order.begin(), order.end()));
  return out;
}

std::vector<Example> SynthesizeShortQuestions(const Example& example,
                                              const TableSchema& schema,
                                              const AugmentConfig& config,
                                              const ReplacementMap& map,
                                              Rng& rng) {
  std::vector<Example> out;
  if (config.variants_per_example == 0) return out;
  const std::string select = SelectPhrase(example, schema);
  const auto placements = SelectPlacements(config);
  const auto& conds = example.gold.conds;

  std::set<std::string> seen;
  const std::size_t attempts = 4 * config.variants_per_example;
  for (std::size_t a = 0; a < attempts && out.size() < config.variants_per_example; ++a) {
    std::vector<std::size_t> order(conds.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (config.shuffle_conditions) rng.Shuffle(order);
    std::vector<std::string> phrases;
    for (std::size_t i : order) {
      // Header omitted half the time; otherwise either side of the value.
      CondForm form = CondForm::kValueOnly;
      if (rng.Bernoulli(0.5)) {
        form = config.swap_column_value && rng.Bernoulli(0.5) ? CondForm::kValueHeader
                                                              : CondForm::kHeaderValue;
      }
      phrases.push_back(CondPhrase(conds[i], schema, form, map));
    }
    const bool first = placements[rng.Index(placements.size())];
    std::string q = Assemble(select, first, phrases);
    if (!seen.insert(q).second) continue;
    Example v = example;
    v.id = example.id + "-syn" + std::to_string(out.size());
    v.question = std::move(q);
    v.provenance = Provenance::kSynthesized;
    v.style = QuestionStyle::kKeyword;
    out.push_back(std::move(v));
  }
  return out;
}

Example SubstituteRelationalSymbols(const Example& example,
                                    const ReplacementMap& map,
                                    double probability, Rng& rng) {
  bool has_op[kNumCondOps] = {false, false, false};
  for (const auto& c : example.gold.conds) has_op[ToIndex(c.op)] = true;

  Example out = example;
  const std::string lower = ToLowerAscii(example.question);
  const auto occurrences = FindOccurrences(lower, map);
  std::string rewritten;
  std::size_t cursor = 0;
  bool fired = false;
  for (const auto& occ : occurrences) {
    if (!has_op[ToIndex(occ.entry->op)]) continue;
    if (!rng.Bernoulli(probability)) continue;
    rewritten.append(example.question, cursor, occ.begin - cursor);
    rewritten += occ.entry->symbol;
    cursor = occ.end;
    fired = true;
  }
  if (!fired) return out;
  rewritten.append(example.question, cursor, std::string::npos);
  out.question = std::move(rewritten);
  out.provenance = Provenance::kSymbolSubstituted;
  return out;
}

nlohmann::json AugmentStats::ToJson() const {
  return {{"originals", originals},
          {"candidates", candidates},
          {"added", added},
          {"provenance", provenance}};
}

Corpus AugmentCorpus(const Corpus& corpus, const TableMap& tables,
                     const AugmentConfig& config, const ReplacementMap& map,
                     AugmentStats* stats) {
  config.Validate();
  std::vector<Example> pool;
  for (std::size_t i = 0; i < corpus.examples.size(); ++i) {
    const Example& e = corpus.examples[i];
    auto it = tables.find(e.table_id);
    if (it == tables.end() || !ValidateSketch(e.gold, it->second.schema).empty()) {
      continue;
    }
    Rng rng(MixSeed(config.seed, i));
    for (auto& v : SynthesizeShortQuestions(e, it->second.schema, config, map, rng)) {
      pool.push_back(SubstituteRelationalSymbols(
          v, map, config.symbol_substitution_probability, rng));
    }
    Example sub = SubstituteRelationalSymbols(
        e, map, config.symbol_substitution_probability, rng);
    if (sub.provenance == Provenance::kSymbolSubstituted) {
      sub.id = e.id + "-sym";
      pool.push_back(std::move(sub));
    }
  }

  Rng rng(MixSeed(config.seed, 0xa5a5a5a5ULL));
  const auto want = static_cast<std::size_t>(
      std::llround(config.mix_ratio * static_cast<double>(corpus.size())));
  const std::size_t take = std::min(want, pool.size());
  // Partial Fisher-Yates: the first `take` slots become the sample.
  for (std::size_t i = 0; i < take; ++i) {
    std::swap(pool[i], pool[i + rng.Index(pool.size() - i)]);
  }

  Corpus out;
  out.split = corpus.split;
  out.examples = corpus.examples;
  out.examples.insert(out.examples.end(), pool.begin(), pool.begin() + take);
  rng.Shuffle(out.examples);

  if (stats != nullptr) {
    stats->originals = corpus.size();
    stats->candidates = pool.size();
    stats->added = take;
    stats->provenance.clear();
    for (const auto& e : out.examples) {
      ++stats->provenance[std::string(ProvenanceName(e.provenance))];
    }
  }
  return out;
}

}  // namespace sketchsql
