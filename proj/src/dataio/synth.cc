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

#include "sketchsql/synth.h"

#include <algorithm>
#include <cstdio>

#include "sketchsql/random.h"
#include "sketchsql/text.h"

namespace sketchsql {

using nlohmann::json;

namespace {

struct ColumnSpec {
  Archetype archetype;
  std::size_t family = 0;  // index into pools.categories for kCategory
  std::string header;
  bool opaque = false;
};

// One family slot per non-categorical archetype plus one per category family.
struct FamilySlot {
  Archetype archetype;
  std::size_t family;
};

bool IsNumeric(Archetype a) {
  return a == Archetype::kSmallInt || a == Archetype::kYear;
}

std::string TitleCase(std::string s) {
  bool start = true;
  for (auto& c : s) {
    if (start && c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    start = (c == ' ');
  }
  return s;
}

std::string JoinWords(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

class Generator {
 public:
  explicit Generator(const SynthConfig& config)
      : config_(config), pools_(config.pools), rng_(config.seed) {
    slots_.push_back({Archetype::kPerson, 0});
    slots_.push_back({Archetype::kBrand, 0});
    slots_.push_back({Archetype::kSmallInt, 0});
    slots_.push_back({Archetype::kYear, 0});
    for (std::size_t i = 0; i < pools_.categories.size(); ++i) {
      slots_.push_back({Archetype::kCategory, i});
    }
  }

  SyntheticCorpus Run() {
    SyntheticCorpus out;
    const std::string prefix = "s" + std::to_string(config_.seed);
    const auto held_out = static_cast<std::size_t>(
        config_.held_out_fraction * static_cast<double>(config_.n_tables) + 0.5);
    const std::size_t n_train = config_.n_tables - std::min(held_out, config_.n_tables);

    for (std::size_t t = 0; t < config_.n_tables + config_.probe_tables; ++t) {
      const bool probe = t >= config_.n_tables;
      char id[64];
      if (probe) {
        std::snprintf(id, sizeof(id), "%s-p%03zu", prefix.c_str(), t - config_.n_tables);
      } else {
        std::snprintf(id, sizeof(id), "%s-%04zu", prefix.c_str(), t);
      }
      std::vector<ColumnSpec> specs = MakeColumns(probe);
      Table table = MakeTable(id, specs);
      for (std::size_t c = 0; c < specs.size(); ++c) {
        out.manifest.push_back({id, c, specs[c].header, specs[c].archetype,
                                FamilyName(specs[c]), specs[c].opaque});
      }
      if (probe) {
        out.probe_tables.insert(id);
        for (std::size_t q = 0; q < config_.probe_questions_per_table; ++q) {
          MakeProbeExample(table, specs, q, out.corpus);
        }
      } else {
        (t < n_train ? out.train_tables : out.held_out_tables).insert(id);
        for (std::size_t q = 0; q < config_.questions_per_table; ++q) {
          MakeExamples(table, specs, q, out.corpus);
        }
      }
      out.tables.emplace(id, std::move(table));
    }
    return out;
  }

 private:
  std::string FamilyName(const ColumnSpec& s) const {
    if (s.archetype == Archetype::kCategory) return pools_.categories[s.family].name;
    return std::string(ArchetypeName(s.archetype));
  }

  const std::vector<std::string>& TypedHeaders(const FamilySlot& slot) const {
    switch (slot.archetype) {
      case Archetype::kPerson:
        return pools_.person_headers;
      case Archetype::kBrand:
        return pools_.brand_headers;
      case Archetype::kSmallInt:
        return pools_.small_int_headers;
      case Archetype::kYear:
        return pools_.year_headers;
      case Archetype::kCategory:
        return pools_.categories[slot.family].headers;
    }
    return pools_.person_headers;
  }

  std::vector<ColumnSpec> MakeColumns(bool probe) {
    const std::size_t n = static_cast<std::size_t>(rng_.Between(
        static_cast<long long>(config_.min_columns),
        static_cast<long long>(config_.max_columns)));
    std::vector<FamilySlot> slots = slots_;
    rng_.Shuffle(slots);
    slots.resize(std::min(n, slots.size()));

    std::vector<std::string> opaque = pools_.opaque_headers;
    rng_.Shuffle(opaque);
    std::size_t next_opaque = 0;

    std::vector<ColumnSpec> specs;
    for (const auto& slot : slots) {
      ColumnSpec s;
      s.archetype = slot.archetype;
      s.family = slot.family;
      const double rate = probe ? 0.8 : config_.opaque_header_rate;
      s.opaque = next_opaque < opaque.size() && rng_.Bernoulli(rate);
      s.header = s.opaque ? opaque[next_opaque++] : rng_.Pick(TypedHeaders(slot));
      specs.push_back(std::move(s));
    }
    if (probe) {
      // At least two opaque columns so content is what separates them, and at
      // least one typed column to select.
      std::size_t n_opaque = 0;
      for (auto& s : specs) n_opaque += s.opaque;
      for (std::size_t c = 0; c < specs.size() && n_opaque < 2; ++c) {
        if (!specs[c].opaque && next_opaque < opaque.size()) {
          specs[c].opaque = true;
          specs[c].header = opaque[next_opaque++];
          ++n_opaque;
        }
      }
      if (n_opaque == specs.size()) {
        specs[0].opaque = false;
        specs[0].header = rng_.Pick(TypedHeaders({specs[0].archetype, specs[0].family}));
      }
    }
    return specs;
  }

  std::string DrawValue(const ColumnSpec& s) {
    switch (s.archetype) {
      case Archetype::kPerson:
        return rng_.Pick(pools_.first_names) + " " + rng_.Pick(pools_.last_names);
      case Archetype::kBrand:
        return rng_.Pick(pools_.brands);
      case Archetype::kSmallInt:
        return std::to_string(rng_.Between(pools_.small_int_min, pools_.small_int_max));
      case Archetype::kYear:
        return std::to_string(rng_.Between(pools_.year_min, pools_.year_max));
      case Archetype::kCategory:
        return rng_.Pick(pools_.categories[s.family].values);
    }
    return "";
  }

  Table MakeTable(const std::string& id, const std::vector<ColumnSpec>& specs) {
    Table t;
    t.schema.table_id = id;
    for (const auto& s : specs) {
      t.schema.headers.push_back(s.header);
      t.schema.types.push_back(IsNumeric(s.archetype) ? ColumnType::kReal
                                                      : ColumnType::kText);
    }
    for (std::size_t r = 0; r < config_.rows_per_table; ++r) {
      std::vector<std::string> row;
      for (const auto& s : specs) row.push_back(DrawValue(s));
      t.rows.push_back(std::move(row));
    }
    return t;
  }

  AggOp DrawAgg(bool numeric) {
    if (numeric) {
      static const std::vector<double> w = {0.45, 0.12, 0.12, 0.15, 0.08, 0.08};
      return static_cast<AggOp>(rng_.Weighted(w));
    }
    return rng_.Bernoulli(0.2) ? AggOp::kCount : AggOp::kNone;
  }

  SqlSketch DrawSketch(const Table& table, const std::vector<ColumnSpec>& specs) {
    const std::size_t n_cols = specs.size();
    SqlSketch sketch;
    sketch.select_column = rng_.Index(n_cols);
    sketch.agg = DrawAgg(IsNumeric(specs[sketch.select_column].archetype));

    static const std::vector<double> cond_weights = {0.08, 0.52, 0.32, 0.08};
    const std::size_t want = std::min(rng_.Weighted(cond_weights), n_cols - 1);
    std::vector<std::size_t> others;
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (c != sketch.select_column) others.push_back(c);
    }
    rng_.Shuffle(others);
    others.resize(want);
    std::sort(others.begin(), others.end());

    const std::size_t anchor = table.rows.empty() ? 0 : rng_.Index(table.rows.size());
    for (std::size_t c : others) {
      Condition cond;
      cond.column = c;
      if (IsNumeric(specs[c].archetype) && rng_.Bernoulli(0.35)) {
        cond.op = rng_.Bernoulli(0.5) ? CondOp::kGt : CondOp::kLt;
        cond.value = table.rows[rng_.Index(table.rows.size())][c];
      } else {
        cond.op = CondOp::kEq;
        cond.value = table.rows[anchor][c];
      }
      sketch.conds.push_back(std::move(cond));
    }
    rng_.Shuffle(sketch.conds);
    return sketch;
  }

  std::string VerboseQuestion(const Table& table, const SqlSketch& sketch) {
    const std::string sel = ToLowerAscii(table.schema.headers[sketch.select_column]);
    static const std::vector<std::vector<std::string>> kSelect = {
        {"what is the {S}", "which {S}", "name the {S}", "tell me the {S}"},
        {"what is the highest {S}", "what is the largest {S}", "what is the maximum {S}"},
        {"what is the lowest {S}", "what is the smallest {S}", "what is the minimum {S}"},
        {"how many {S}", "what is the total number of {S}", "how many {S} are there"},
        {"what is the sum of {S}", "what is the sum of the {S}"},
        {"what is the average {S}", "what is the mean {S}"}};
    std::string head = rng_.Pick(kSelect[ToIndex(sketch.agg)]);
    if (sketch.conds.empty()) {
      if (sketch.agg == AggOp::kNone) {
        head = rng_.Bernoulli(0.5) ? "list all the {S}" : "what are all the {S}";
      }
      return Fill(head, sel, "") + "?";
    }
    static const std::vector<std::string> kEq = {"the {H} is {V}", "{H} is {V}",
                                                 "{H} of {V}", "a {H} of {V}"};
    static const std::vector<std::string> kGt = {
        "the {H} is more than {V}", "{H} larger than {V}", "{H} greater than {V}",
        "{H} bigger than {V}", "{H} over {V}"};
    static const std::vector<std::string> kLt = {"the {H} is less than {V}",
                                                 "{H} smaller than {V}",
                                                 "{H} fewer than {V}", "{H} under {V}"};
    static const std::vector<std::string> kJoin = {" when ", " where ", " with ",
                                                   " for "};
    std::string out = Fill(head, sel, "") + rng_.Pick(kJoin);
    for (std::size_t i = 0; i < sketch.conds.size(); ++i) {
      const auto& c = sketch.conds[i];
      const auto& pool = c.op == CondOp::kEq ? kEq : c.op == CondOp::kGt ? kGt : kLt;
      if (i > 0) out += " and ";
      out += Fill(rng_.Pick(pool), ToLowerAscii(table.schema.headers[c.column]),
                  c.value);
    }
    return out + "?";
  }

  static std::string Fill(std::string tpl, const std::string& header,
                          const std::string& value) {
    for (const auto& [key, rep] : {std::pair<std::string, const std::string*>{"{S}", &header},
                                   {"{H}", &header},
                                   {"{V}", &value}}) {
      for (std::size_t p = tpl.find(key); p != std::string::npos; p = tpl.find(key)) {
        tpl.replace(p, key.size(), *rep);
      }
    }
    return tpl;
  }

  std::string SelectPhrase(const Table& table, const SqlSketch& sketch) {
    const std::string sel = ToLowerAscii(table.schema.headers[sketch.select_column]);
    static const std::vector<std::vector<std::string>> kPrefix = {
        {""}, {"highest", "max"}, {"lowest", "min"}, {"number of", "how many"},
        {"total"}, {"average", "avg"}};
    return JoinWords({rng_.Pick(kPrefix[ToIndex(sketch.agg)]), sel});
  }

  std::string KeywordCondition(const Table& table, const Condition& c,
                               bool allow_header) {
    const std::string h = ToLowerAscii(table.schema.headers[c.column]);
    const std::string v = ToLowerAscii(c.value);
    if (c.op == CondOp::kEq) {
      const std::size_t form = allow_header ? rng_.Index(3) : 0;
      if (form == 0) return v;
      return form == 1 ? h + " " + v : v + " " + h;
    }
    static const std::vector<std::string> kGt = {">", "more than", "over", "above"};
    static const std::vector<std::string> kLt = {"<", "less than", "under", "below"};
    const std::string op = rng_.Pick(c.op == CondOp::kGt ? kGt : kLt);
    return rng_.Bernoulli(0.5) ? h + " " + op + " " + v : op + " " + v + " " + h;
  }

  std::string KeywordQuestion(const Table& table, const SqlSketch& sketch,
                              bool allow_header) {
    std::vector<std::string> conds;
    for (const auto& c : sketch.conds) {
      conds.push_back(KeywordCondition(table, c, allow_header));
    }
    rng_.Shuffle(conds);
    const std::string sel = SelectPhrase(table, sketch);
    if (rng_.Bernoulli(0.6)) {
      static const std::vector<std::string> kFiller = {"", "", "with", "for", "of"};
      std::vector<std::string> parts = {sel};
      if (!conds.empty()) parts.push_back(rng_.Pick(kFiller));
      parts.insert(parts.end(), conds.begin(), conds.end());
      return JoinWords(parts);
    }
    conds.push_back(sel);
    return JoinWords(conds);
  }

  void MakeExamples(const Table& table, const std::vector<ColumnSpec>& specs,
                    std::size_t q, Corpus& corpus) {
    const SqlSketch sketch = DrawSketch(table, specs);
    const std::string base = table.schema.table_id + "-q" + std::to_string(q);
    Example verbose;
    verbose.id = base + "-v";
    verbose.question = VerboseQuestion(table, sketch);
    verbose.table_id = table.schema.table_id;
    verbose.gold = sketch;
    verbose.style = QuestionStyle::kVerbose;
    Example keyword = verbose;
    keyword.id = base + "-k";
    keyword.question = KeywordQuestion(table, sketch, true);
    keyword.style = QuestionStyle::kKeyword;
    corpus.examples.push_back(std::move(verbose));
    corpus.examples.push_back(std::move(keyword));
  }

  void MakeProbeExample(const Table& table, const std::vector<ColumnSpec>& specs,
                        std::size_t q, Corpus& corpus) {
    std::vector<std::size_t> typed;
    std::vector<std::size_t> opaque;
    for (std::size_t c = 0; c < specs.size(); ++c) {
      (specs[c].opaque ? opaque : typed).push_back(c);
    }
    SqlSketch sketch;
    sketch.select_column = rng_.Pick(typed);
    sketch.agg = IsNumeric(specs[sketch.select_column].archetype) && rng_.Bernoulli(0.3)
                     ? AggOp::kMax
                     : (rng_.Bernoulli(0.15) ? AggOp::kCount : AggOp::kNone);
    rng_.Shuffle(opaque);
    const std::size_t n = std::min<std::size_t>(opaque.size(), rng_.Bernoulli(0.6) ? 1 : 2);
    const std::size_t anchor = rng_.Index(table.rows.size());
    for (std::size_t i = 0; i < n; ++i) {
      sketch.conds.push_back({opaque[i], CondOp::kEq, table.rows[anchor][opaque[i]]});
    }
    Example e;
    e.id = table.schema.table_id + "-q" + std::to_string(q) + "-p";
    e.question = KeywordQuestion(table, sketch, false);
    e.table_id = table.schema.table_id;
    e.gold = std::move(sketch);
    e.style = QuestionStyle::kProbe;
    corpus.examples.push_back(std::move(e));
  }

  const SynthConfig& config_;
  const ValuePools& pools_;
  Rng rng_;
  std::vector<FamilySlot> slots_;
};

}  // namespace

std::string_view ArchetypeName(Archetype a) {
  switch (a) {
    case Archetype::kPerson:
      return "person";
    case Archetype::kBrand:
      return "brand";
    case Archetype::kSmallInt:
      return "small_int";
    case Archetype::kYear:
      return "year";
    case Archetype::kCategory:
      return "category";
  }
  return "category";
}

ValuePools DefaultValuePools() {
  ValuePools p;
  p.first_names = {"rafael", "novak",  "jarkko", "nicolas", "mike",   "stevie",
                   "maria",  "charlie", "eddie", "roger",   "andy",   "serena",
                   "lucas",  "elena",  "tomas",  "marco",   "julia",  "pablo",
                   "sofia",  "daniel", "oliver", "emma",    "hugo",   "ines",
                   "victor", "clara",  "felix",  "nora",    "arthur", "lena"};
  p.last_names = {"nadal",   "djokovic", "nieminen", "terol",   "meglio",
                  "bonsey",  "herrera",  "freedman", "fletcher", "federer",
                  "murray",  "williams", "moreno",   "petrova",  "berdych",
                  "rossi",   "schmidt",  "garcia",   "lindqvist", "novak",
                  "dubois",  "kowalski", "okafor",   "tanaka",   "silva",
                  "jensen",  "costa",    "baker",    "moretti",  "larsen"};
  for (auto& n : p.first_names) n = TitleCase(n);
  for (auto& n : p.last_names) n = TitleCase(n);
  p.brands = {"Honda",  "Derbi",   "KTM",     "Aprilia", "Yamaha", "Suzuki",
              "Ducati", "BMW",     "Gilera",  "Benelli", "Toyota", "Ford",
              "Ferrari", "Renault", "Peugeot", "Mazda",   "Nissan", "Volvo",
              "Subaru", "Lotus",   "Porsche", "Audi",    "Fiat",   "Skoda"};
  p.categories = {
      {"surface", {"Court", "Surface"}, {"clay", "grass", "hard", "carpet"}},
      {"result",
       {"Result", "Outcome"},
       {"winner", "runner-up", "semifinalist", "quarterfinalist", "withdrew"}},
      {"genre",
       {"Genre", "Category"},
       {"drama", "comedy", "thriller", "horror", "documentary", "western"}},
      {"position",
       {"Position", "Role"},
       {"forward", "guard", "center", "defender", "goalkeeper", "midfielder"}},
      {"nationality",
       {"Nationality", "Country"},
       {"australian", "american", "french", "spanish", "german", "italian",
        "swedish", "canadian"}},
      {"status",
       {"Status", "Standing"},
       {"active", "retired", "injured", "suspended"}},
      {"city",
       {"City", "Venue"},
       {"boston", "chicago", "denver", "seattle", "toronto", "dallas", "miami"}},
  };
  p.person_headers = {"Player", "Rider", "Driver", "Coach", "Owner", "Winning driver"};
  p.brand_headers = {"Manufacturer", "Make", "Brand", "Constructor", "Sponsor"};
  p.small_int_headers = {"Jersey", "Laps", "Grid", "Rank", "Goals", "Points"};
  p.year_headers = {"Year", "Season", "Founded"};
  p.opaque_headers = {"Entry", "Field", "Detail", "Info", "Label", "Ref",
                      "Note", "Item", "Place", "Code", "Attribute", "Value"};
  return p;
}

void SynthConfig::Validate() const {
  if (n_tables == 0 || rows_per_table == 0 || questions_per_table == 0 ||
      min_columns == 0) {
    throw ValidationError("synthetic corpus counts must be >= 1");
  }
  if (min_columns > max_columns) {
    throw ValidationError("min_columns must not exceed max_columns");
  }
  if (min_columns < 2) {
    throw ValidationError("tables need at least two columns");
  }
  const std::size_t families = 4 + pools.categories.size();
  if (max_columns > families) {
    throw ValidationError("max_columns exceeds the number of value families (" +
                          std::to_string(families) + ")");
  }
  if (opaque_header_rate < 0.0 || opaque_header_rate > 1.0 ||
      held_out_fraction < 0.0 || held_out_fraction > 1.0) {
    throw ValidationError("rates must lie in [0, 1]");
  }
}

Corpus SyntheticCorpus::Select(const std::set<std::string>& table_ids,
                               QuestionStyle style, Split split) const {
  Corpus out;
  out.split = split;
  for (const auto& e : corpus.examples) {
    if (e.style == style && table_ids.count(e.table_id) > 0) out.examples.push_back(e);
  }
  return out;
}

json SyntheticCorpus::ManifestJson() const {
  json columns = json::array();
  for (const auto& m : manifest) {
    columns.push_back({{"table_id", m.table_id},
                       {"column", m.column},
                       {"header", m.header},
                       {"archetype", std::string(ArchetypeName(m.archetype))},
                       {"family", m.family},
                       {"opaque", m.opaque}});
  }
  return {{"columns", std::move(columns)},
          {"train_tables", train_tables},
          {"held_out_tables", held_out_tables},
          {"probe_tables", probe_tables}};
}

SyntheticCorpus GenerateSyntheticCorpus(const SynthConfig& config) {
  config.Validate();
  return Generator(config).Run();
}

}  // namespace sketchsql
