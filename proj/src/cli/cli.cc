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

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "sketchsql/augment.h"
#include "sketchsql/bench.h"
#include "sketchsql/cli.h"
#include "sketchsql/content_index.h"
#include "sketchsql/dataio.h"
#include "sketchsql/executor.h"
#include "sketchsql/sampling.h"
#include "sketchsql/serialize.h"
#include "sketchsql/synth.h"
#include "sketchsql/text.h"
#include "sketchsql/traineval.h"

namespace sketchsql {

namespace fs = std::filesystem;

namespace {

std::string UtcNow() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string DefaultOutDir() {
  const char* env = std::getenv(std::string(kOutDirEnv).c_str());
  return env != nullptr && *env != '\0' ? env : "sketchsql-out";
}

// Options shared by several subcommands.
struct Common {
  std::string data;
  std::string tables;
  std::string strategy = "none";
  std::size_t k = 3;
  std::uint64_t seed = 1;
  std::size_t budget = kDefaultBudget;
  std::string out = DefaultOutDir();
  std::string config;

  StrategySpec Spec() const {
    if (strategy.find(':') != std::string::npos || strategy == "none" || strategy == "em1") {
      return StrategySpec::Parse(strategy);
    }
    return StrategySpec::Parse(strategy + ":" + std::to_string(k));
  }
};

struct TrainOpts {
  std::string dev;
  std::size_t epochs = 30;
  std::size_t batch = 16;
  double lr = 1e-3;
  double encoder_lr = 0.0;  // 0: same as lr
  double clip = 5.0;
  std::size_t d_model = 64;
  std::size_t layers = 2;
  std::size_t heads = 4;
  std::size_t ff_dim = 0;
  double dropout = 0.1;
  std::size_t max_span = 16;
  bool no_positions = false;
  bool no_match_features = false;
  bool augment = false;
  double mix_ratio = 1.0;
  std::size_t variants = 4;
  double target_lf = 0.0;
  std::size_t eval_every = 5;
  std::size_t checkpoint_every = 0;
  std::size_t min_count = 1;
};

struct Opts {
  Common c;
  TrainOpts t;
  // validate
  bool lenient = false;
  std::size_t max_conds = kDefaultMaxConds;
  // synth
  std::size_t n_tables = 40;
  std::size_t rows = 12;
  std::size_t questions = 8;
  std::size_t probe_tables = 10;
  std::size_t probe_questions = 6;
  double held_out = 0.25;
  // augment
  double substitution = 0.5;
  std::string replacements;
  // sample / serialize / render / repl
  std::string table_id;
  std::string question;
  std::string sketch;
  std::string headers;
  // eval / compare / repl
  std::vector<std::string> checkpoints;
  std::vector<std::string> strategies = {"none", "rand:3", "rel:3"};
  std::size_t threads = 0;
  // bench
  std::vector<std::size_t> bench_rows = {1000, 100000, 1000000};
  std::size_t queries = 200;
};

class Run {
 public:
  Run(std::string sub, const Opts& o, std::ostream& out) : o_(o), out_(out) {
    manifest_.subcommand = std::move(sub);
    manifest_.tool_version = std::string(ToolVersion());
    manifest_.started = UtcNow();
    manifest_.seeds["seed"] = o.c.seed;
  }

  fs::path Out(const std::string& name) {
    fs::create_directories(o_.c.out);
    const fs::path p = fs::path(o_.c.out) / name;
    manifest_.outputs.push_back(p.string());
    return p;
  }

  void Input(const std::string& path) {
    if (!path.empty() && fs::is_regular_file(path)) manifest_.input_digests[path] = Sha256File(path);
  }

  void WriteJson(const std::string& name, const nlohmann::json& j) {
    std::ofstream f(Out(name));
    f << j.dump(2) << '\n';
    if (!f) throw IoError("cannot write " + name);
  }

  void Finish(const CLI::App& sub) {
    for (const CLI::Option* opt : sub.get_options()) {
      if (opt->get_lnames().empty()) continue;
      const std::string name = opt->get_lnames()[0];
      if (name == "help") continue;
      if (opt->get_expected_max() == 0) {
        manifest_.config[name] = opt->count() > 0 && opt->as<bool>();
      } else if (opt->get_expected_max() > 1) {
        nlohmann::json arr = nlohmann::json::array();
        if (opt->count() > 0) {
          for (const auto& r : opt->results()) arr.push_back(r);
        } else {
          for (const auto& r : CLI::detail::split_up(opt->get_default_str(), ',')) {
            std::string v = r;
            v.erase(std::remove_if(v.begin(), v.end(),
                                   [](char ch) { return ch == '[' || ch == ']' || ch == '"'; }),
                    v.end());
            v = std::string(Trim(v));
            if (!v.empty()) arr.push_back(v);
          }
        }
        manifest_.config[name] = arr;
      } else {
        manifest_.config[name] = opt->count() > 0 ? opt->results().back() : opt->get_default_str();
      }
    }
    manifest_.finished = UtcNow();
    const fs::path p = fs::path(o_.c.out) / ("manifest-" + manifest_.subcommand + ".json");
    fs::create_directories(o_.c.out);
    std::ofstream f(p);
    f << manifest_.ToJson().dump(2) << '\n';
    if (!f) throw IoError("cannot write " + p.string());
  }

  RunManifest& manifest() { return manifest_; }
  std::ostream& out() { return out_; }

 private:
  const Opts& o_;
  std::ostream& out_;
  RunManifest manifest_;
};

TableMap LoadTablesFor(Run& run, const std::string& path) {
  if (path.empty()) throw ValidationError("--tables is required");
  run.Input(path);
  return LoadTables(path);
}

Corpus LoadCorpusFor(Run& run, const std::string& path, Split split = Split::kTrain) {
  if (path.empty()) throw ValidationError("--data is required");
  run.Input(path);
  return LoadExamples(path, LoadMode::kStrict, nullptr, split);
}

const Table& FindTable(const TableMap& tables, const std::string& id) {
  if (tables.empty()) throw ValidationError("no tables loaded");
  if (id.empty()) return tables.begin()->second;
  auto it = tables.find(id);
  if (it == tables.end()) throw ValidationError("unknown table '" + id + "'");
  return it->second;
}

SampleSet SampleOne(const Table& t, const StrategySpec& spec, std::string_view question,
                    std::uint64_t seed) {
  if (spec.strategy == Strategy::kNone) return EmptySamples(t.schema);
  const ContentIndex index = ContentIndex::Build(t);
  const SampleSet offline = spec.strategy == Strategy::kRandom
                                ? SampleRandom(index, t.schema, spec.k, seed)
                                : SampleSet{};
  return SampleFor(spec, t.schema, index, question, seed, &offline);
}

// Subcommands. Each returns an exit status.

int DoValidate(Run& run, const Opts& o) {
  const TableMap tables = LoadTablesFor(run, o.c.tables);
  LoadDiagnostics diag;
  if (o.c.data.empty()) throw ValidationError("--data is required");
  run.Input(o.c.data);
  const Corpus corpus =
      LoadExamples(o.c.data, o.lenient ? LoadMode::kLenient : LoadMode::kStrict, &diag);
  const CorpusReport r = ValidateCorpus(corpus, tables, o.max_conds);
  nlohmann::json j = r.ToJson();
  j["skipped_lines"] = diag.skipped_lines;
  j["warnings"] = diag.warnings;
  run.WriteJson("validate.json", j);
  run.out() << r.examples << " examples, " << r.violations.size() << " violations, "
            << diag.skipped_lines << " skipped lines\n";
  for (std::size_t i = 0; i < r.violations.size() && i < 20; ++i) {
    run.out() << "  [" << r.violations[i].example_index << "] " << r.violations[i].example_id
              << ": " << r.violations[i].message << '\n';
  }
  return r.ok() ? kExitOk : kExitValidation;
}

int DoSynth(Run& run, const Opts& o) {
  SynthConfig c;
  c.n_tables = o.n_tables;
  c.rows_per_table = o.rows;
  c.questions_per_table = o.questions;
  c.probe_tables = o.probe_tables;
  c.probe_questions_per_table = o.probe_questions;
  c.held_out_fraction = o.held_out;
  c.seed = o.c.seed;
  const SyntheticCorpus s = GenerateSyntheticCorpus(c);
  WriteTables(run.Out("tables.jsonl"), s.tables);
  const struct {
    const char* file;
    const std::set<std::string>& ids;
    QuestionStyle style;
    Split split;
  } parts[] = {
      {"train.jsonl", s.train_tables, QuestionStyle::kVerbose, Split::kTrain},
      {"train_keyword.jsonl", s.train_tables, QuestionStyle::kKeyword, Split::kTrain},
      {"heldout_verbose.jsonl", s.held_out_tables, QuestionStyle::kVerbose, Split::kDev},
      {"heldout_keyword.jsonl", s.held_out_tables, QuestionStyle::kKeyword, Split::kDev},
      {"probe.jsonl", s.probe_tables, QuestionStyle::kProbe, Split::kTest},
  };
  for (const auto& p : parts) {
    const Corpus corpus = s.Select(p.ids, p.style, p.split);
    WriteExamples(run.Out(p.file), corpus);
    run.out() << p.file << ": " << corpus.size() << " examples\n";
  }
  run.WriteJson("columns.json", s.ManifestJson());
  run.out() << "tables.jsonl: " << s.tables.size() << " tables\n";
  return kExitOk;
}

AugmentConfig AugmentConfigFrom(const Opts& o) {
  AugmentConfig a;
  a.variants_per_example = o.t.variants;
  a.mix_ratio = o.t.mix_ratio;
  a.symbol_substitution_probability = o.substitution;
  a.seed = o.c.seed;
  return a;
}

int DoAugment(Run& run, const Opts& o) {
  const TableMap tables = LoadTablesFor(run, o.c.tables);
  const Corpus corpus = LoadCorpusFor(run, o.c.data);
  ReplacementMap map = ReplacementMap::Defaults();
  if (!o.replacements.empty()) {
    run.Input(o.replacements);
    map = ReplacementMap::Load(o.replacements);
  }
  AugmentStats stats;
  const Corpus out = AugmentCorpus(corpus, tables, AugmentConfigFrom(o), map, &stats);
  WriteExamples(run.Out("augmented.jsonl"), out);
  run.WriteJson("augment_stats.json", stats.ToJson());
  run.out() << stats.originals << " originals, " << stats.candidates << " candidates, "
            << stats.added << " added\n";
  return kExitOk;
}

int DoIndex(Run& run, const Opts& o) {
  const TableMap tables = LoadTablesFor(run, o.c.tables);
  const StrategySpec spec = o.c.Spec();
  nlohmann::json rows = nlohmann::json::array();
  std::vector<SampleSet> offline;
  for (const auto& [id, t] : tables) {
    const ContentIndex index = ContentIndex::Build(t);
    const auto& st = index.build_stats();
    rows.push_back({{"table_id", id},
                    {"cells", index.cell_count()},
                    {"patterns", index.pattern_count()},
                    {"trie_nodes", index.node_count()},
                    {"setup_seconds", st.seconds},
                    {"peak_heap_bytes", st.peak_heap_bytes},
                    {"retained_bytes", st.retained_bytes}});
    if (spec.strategy == Strategy::kRandom) {
      offline.push_back(SampleRandom(index, t.schema, spec.k, o.c.seed));
    }
  }
  run.WriteJson("index.json", {{"tables", rows}});
  if (!offline.empty()) {
    std::ofstream f(run.Out("samples.jsonl"));
    WriteSampleSets(f, offline);
  }
  run.out() << "indexed " << tables.size() << " tables";
  if (!offline.empty()) run.out() << ", offline samples for " << spec.ToString();
  run.out() << '\n';
  return kExitOk;
}

int DoSample(Run& run, const Opts& o) {
  const TableMap tables = LoadTablesFor(run, o.c.tables);
  const Table& t = FindTable(tables, o.table_id);
  const SampleSet s = SampleOne(t, o.c.Spec(), o.question, o.c.seed);
  run.out() << s.ToJson().dump(2) << '\n';
  return kExitOk;
}

int DoSerialize(Run& run, const Opts& o) {
  const TableMap tables = LoadTablesFor(run, o.c.tables);
  const Table& t = FindTable(tables, o.table_id);
  const SerializedInput in = SerializeInput(o.question, t.schema,
                                            SampleOne(t, o.c.Spec(), o.question, o.c.seed),
                                            o.c.budget);
  run.out() << RenderInput(in) << "\n\n" << RenderInputDebug(in);
  if (in.dropped_samples > 0) run.out() << "dropped samples: " << in.dropped_samples << '\n';
  return kExitOk;
}

TrainConfig TrainConfigFrom(const Opts& o) {
  TrainConfig c;
  c.epochs = o.t.epochs;
  c.batch_size = o.t.batch;
  c.adam.lr = o.t.lr;
  if (o.t.encoder_lr > 0.0) c.encoder_lr = o.t.encoder_lr;
  c.clip_norm = o.t.clip;
  c.spec = o.c.Spec();
  c.budget = o.c.budget;
  c.augment = o.t.augment;
  c.augment_config = AugmentConfigFrom(o);
  c.model.d_model = o.t.d_model;
  c.model.layers = o.t.layers;
  c.model.heads = o.t.heads;
  c.model.ff_dim = o.t.ff_dim;
  c.model.dropout = o.t.dropout;
  c.model.max_span = o.t.max_span;
  c.model.max_positions = std::max(c.model.max_positions, o.c.budget);
  c.model.positions = !o.t.no_positions;
  c.model.match_features = !o.t.no_match_features;
  c.vocab_min_count = o.t.min_count;
  c.seed = o.c.seed;
  c.target_train_lf = o.t.target_lf;
  c.eval_every = o.t.eval_every;
  c.checkpoint_every = o.t.checkpoint_every;
  if (c.checkpoint_every > 0) c.checkpoint_dir = fs::path(o.c.out) / "checkpoints";
  return c;
}

int DoTrain(Run& run, const Opts& o) {
  const TableMap tables = LoadTablesFor(run, o.c.tables);
  const Corpus train = LoadCorpusFor(run, o.c.data);
  Corpus dev;
  if (!o.t.dev.empty()) dev = LoadCorpusFor(run, o.t.dev, Split::kDev);
  const TrainConfig config = TrainConfigFrom(o);
  run.WriteJson("train_config.json", config.ToJson());
  TrainResult r = Train(train, tables, config, dev.empty() ? nullptr : &dev,
                        [&run](const EpochRecord& e) {
                          run.out() << "epoch " << e.epoch << " loss " << std::fixed
                                    << std::setprecision(4) << e.mean_loss;
                          if (e.train_lf) run.out() << " train_lf " << *e.train_lf;
                          if (e.dev_lf) run.out() << " dev_lf " << *e.dev_lf << " dev_ex " << *e.dev_ex;
                          run.out() << std::defaultfloat << '\n';
                          return true;
                        });
  r.model.Save(run.Out("model.ckpt"));
  run.WriteJson("history.json", r.history.ToJson());
  run.out() << "trained on " << r.history.trained << " of " << r.history.examples
            << " examples (" << r.history.dropped_unalignable << " unalignable dropped)\n";
  return kExitOk;
}

Model LoadCheckpoint(Run& run, const std::string& path) {
  run.Input(path);
  return Model::Load(fs::path(path));
}

int DoEval(Run& run, const Opts& o) {
  if (o.checkpoints.size() != 1) throw ValidationError("eval takes exactly one --checkpoint");
  const TableMap tables = LoadTablesFor(run, o.c.tables);
  const Corpus corpus = LoadCorpusFor(run, o.c.data, Split::kDev);
  const Model model = LoadCheckpoint(run, o.checkpoints[0]);
  const EvalReport r = Evaluate(model, corpus, tables, o.c.Spec(), o.c.seed, o.c.budget, o.threads);
  run.WriteJson("eval.json", r.ToJson());
  {
    std::ofstream f(run.Out("predictions.jsonl"));
    WritePredictions(f, r);
  }
  const std::string table = RenderComparison({r});
  std::ofstream(run.Out("eval.txt")) << table;
  run.out() << table;
  return kExitOk;
}

int DoCompare(Run& run, const Opts& o) {
  if (o.checkpoints.empty()) throw ValidationError("compare needs --checkpoint");
  const TableMap tables = LoadTablesFor(run, o.c.tables);
  const Corpus corpus = LoadCorpusFor(run, o.c.data, Split::kDev);
  std::vector<Model> models;
  for (const auto& p : o.checkpoints) models.push_back(LoadCheckpoint(run, p));
  std::vector<const Model*> ptrs;
  for (const auto& m : models) ptrs.push_back(&m);
  std::vector<StrategySpec> specs;
  for (const auto& s : o.strategies) specs.push_back(StrategySpec::Parse(s));
  const auto reports = CompareStrategies(ptrs, corpus, tables, specs, o.c.seed, o.c.budget);
  run.WriteJson("compare.json", ComparisonJson(reports));
  const std::string table = RenderComparison(reports);
  std::ofstream(run.Out("compare.txt")) << table;
  run.out() << table;
  return kExitOk;
}

int DoBench(Run& run, const Opts& o) {
  BenchConfig c;
  c.rows = o.bench_rows;
  c.spec = o.c.Spec();
  c.n_queries = o.queries;
  c.budget = o.c.budget;
  c.seed = o.c.seed;
  const BenchReport r = BenchSampling(c);
  run.WriteJson("bench.json", r.ToJson());
  for (const auto& p : r.points) {
    run.out() << "rows " << p.rows << " setup " << p.setup_seconds << "s memory "
              << p.peak_memory_bytes << "B per-query " << p.per_query_seconds << "s\n";
  }
  return kExitOk;
}

int DoRender(Run& run, const Opts& o) {
  if (o.sketch.empty()) throw ValidationError("--sketch is required");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(o.sketch);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad --sketch: ") + e.what());
  }
  TableSchema schema;
  if (!o.headers.empty()) {
    schema.table_id = "_";
    for (const auto& h : CLI::detail::split(o.headers, ',')) {
      schema.headers.emplace_back(Trim(h));
      schema.types.push_back(ColumnType::kText);
    }
  } else {
    const TableMap tables = LoadTablesFor(run, o.c.tables);
    schema = FindTable(tables, o.table_id).schema;
  }
  Example wrapped;
  try {
    wrapped = ExampleFromJson({{"question", "_"}, {"table_id", schema.table_id}, {"sql", j}});
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad --sketch: ") + e.what());
  }
  run.out() << RenderSql(wrapped.gold, schema) << '\n';
  return kExitOk;
}

void PrintResult(std::ostream& out, const QueryResult& r) {
  if (r.kind == QueryResult::Kind::kAggregate) {
    out << "  = " << (r.number ? std::to_string(*r.number) : std::string("NULL")) << '\n';
    return;
  }
  out << "  " << r.row_count() << " row(s)\n";
  for (std::size_t i = 0; i < r.cells.size() && i < 20; ++i) out << "  " << r.cells[i] << '\n';
}

int DoRepl(Run& run, const Opts& o, std::istream& in) {
  if (o.checkpoints.size() != 1) throw ValidationError("repl takes exactly one --checkpoint");
  const TableMap tables = LoadTablesFor(run, o.c.tables);
  const Model model = LoadCheckpoint(run, o.checkpoints[0]);
  const Predictor predictor(model, tables, o.c.Spec(), o.c.seed, o.c.budget);
  std::string table_id = FindTable(tables, o.table_id).schema.table_id;
  run.out() << "table " << table_id << " (:table <id> to switch, :quit to leave)\n> " << std::flush;
  std::string line;
  while (std::getline(in, line)) {
    const std::string q(Trim(line));
    if (q == ":quit" || q == ":q") break;
    try {
      if (q.starts_with(":table")) {
        table_id = FindTable(tables, std::string(Trim(q.substr(6)))).schema.table_id;
        run.out() << "table " << table_id << '\n';
      } else if (!q.empty()) {
        const Table& t = predictor.table(table_id);
        const SqlSketch s = predictor.Predict(table_id, q);
        run.out() << RenderSql(s, t.schema) << '\n';
        PrintResult(run.out(), Execute(s, t));
      }
    } catch (const ValidationError& e) {
      run.out() << "error: " << e.what() << '\n';
    }
    run.out() << "> " << std::flush;
  }
  run.out() << '\n';
  return kExitOk;
}

void AddCommon(CLI::App* sub, Common& c, bool data, bool tables, bool strategy) {
  if (data) sub->add_option("--data", c.data, "Examples file (line-delimited JSON)");
  if (tables) sub->add_option("--tables", c.tables, "Tables file (line-delimited JSON)");
  if (strategy) {
    sub->add_option("--strategy", c.strategy, "none, rand, rel or em1 (or e.g. rel:3)");
    sub->add_option("--k", c.k, "Samples per column")->check(CLI::PositiveNumber);
  }
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--budget", c.budget, "Serialized input budget in tokens")
      ->check(CLI::PositiveNumber);
  sub->add_option("--out", c.out, "Output directory");
  sub->add_option("--config", c.config, "Flat key=value config file");
}

void AddTrainOptions(CLI::App* sub, TrainOpts& t) {
  sub->add_option("--dev", t.dev, "Dev examples for per-epoch metrics");
  sub->add_option("--epochs", t.epochs)->check(CLI::PositiveNumber);
  sub->add_option("--batch", t.batch)->check(CLI::PositiveNumber);
  sub->add_option("--lr", t.lr);
  sub->add_option("--encoder-lr", t.encoder_lr, "Encoder rate (0: same as --lr)");
  sub->add_option("--clip", t.clip, "Gradient clip norm (0: off)");
  sub->add_option("--d-model", t.d_model);
  sub->add_option("--layers", t.layers);
  sub->add_option("--heads", t.heads);
  sub->add_option("--ff-dim", t.ff_dim, "0: 4 * d-model");
  sub->add_option("--dropout", t.dropout);
  sub->add_option("--max-span", t.max_span);
  sub->add_flag("--no-positions", t.no_positions);
  sub->add_flag("--no-match-features", t.no_match_features);
  sub->add_flag("--augment", t.augment, "Augment the training corpus first");
  sub->add_option("--mix-ratio", t.mix_ratio);
  sub->add_option("--variants", t.variants);
  sub->add_option("--target-lf", t.target_lf, "Stop at this train LF (0: off)");
  sub->add_option("--eval-every", t.eval_every)->check(CLI::PositiveNumber);
  sub->add_option("--checkpoint-every", t.checkpoint_every);
  sub->add_option("--min-count", t.min_count);
}

// Appends `--key=value` for config-file keys the subcommand knows and the
// command line did not set.
std::vector<std::string> MergeConfig(const std::vector<std::string>& args, CLI::App& app) {
  std::string config_path;
  CLI::App* sub = nullptr;
  std::set<std::string> given;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (sub == nullptr && !a.starts_with("-")) {
      sub = app.get_subcommand_no_throw(a);
      continue;
    }
    if (!a.starts_with("--")) continue;
    const auto eq = a.find('=');
    const std::string key = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
    given.insert(key);
    if (key == "config") {
      if (eq != std::string::npos) {
        config_path = a.substr(eq + 1);
      } else if (i + 1 < args.size()) {
        config_path = args[i + 1];
      }
    }
  }
  if (config_path.empty() || sub == nullptr) return args;
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(config_path);
  } catch (const CLI::FileError&) {
    throw IoError("cannot read config file " + config_path);
  }
  std::vector<std::string> merged = args;
  for (const auto& item : items) {
    std::string key = item.name;
    std::replace(key.begin(), key.end(), '_', '-');
    if (given.contains(key) || key == "config") continue;
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr) continue;
    for (const auto& v : item.inputs) merged.push_back("--" + key + "=" + v);
  }
  return merged;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
           std::ostream& err) {
  CLI::App app("Colloquial question to single-table SQL: data, sampling, training, evaluation.",
               "sketchsql");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ToolVersion()));
  Opts o;

  struct Cmd {
    CLI::App* app;
    std::function<int(Run&)> fn;
  };
  std::vector<Cmd> cmds;
  auto add = [&](const char* name, const char* help, std::function<int(Run&)> fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    cmds.push_back({sub, std::move(fn)});
    return sub;
  };

  CLI::App* s = add("validate", "Check a corpus against its tables",
                    [&](Run& r) { return DoValidate(r, o); });
  AddCommon(s, o.c, true, true, false);
  s->add_flag("--lenient", o.lenient, "Skip malformed lines instead of failing");
  s->add_option("--max-conds", o.max_conds);

  s = add("synth", "Generate a synthetic corpus", [&](Run& r) { return DoSynth(r, o); });
  AddCommon(s, o.c, false, false, false);
  s->add_option("--n-tables", o.n_tables)->check(CLI::PositiveNumber);
  s->add_option("--rows", o.rows)->check(CLI::PositiveNumber);
  s->add_option("--questions", o.questions)->check(CLI::PositiveNumber);
  s->add_option("--probe-tables", o.probe_tables);
  s->add_option("--probe-questions", o.probe_questions);
  s->add_option("--held-out", o.held_out, "Fraction of tables held out");

  s = add("augment", "Add search-style questions to a corpus",
          [&](Run& r) { return DoAugment(r, o); });
  AddCommon(s, o.c, true, true, false);
  s->add_option("--mix-ratio", o.t.mix_ratio);
  s->add_option("--variants", o.t.variants);
  s->add_option("--substitution", o.substitution, "Relational symbol substitution probability");
  s->add_option("--replacements", o.replacements, "Replacement map (pattern TAB op TAB symbol)");

  s = add("index", "Build content indexes and offline random samples",
          [&](Run& r) { return DoIndex(r, o); });
  AddCommon(s, o.c, false, true, true);

  s = add("sample", "Print the samples for one question", [&](Run& r) { return DoSample(r, o); });
  AddCommon(s, o.c, false, true, true);
  s->add_option("--table-id", o.table_id);
  s->add_option("--question", o.question)->required();

  s = add("serialize", "Print the encoder input for one question",
          [&](Run& r) { return DoSerialize(r, o); });
  AddCommon(s, o.c, false, true, true);
  s->add_option("--table-id", o.table_id);
  s->add_option("--question", o.question)->required();

  s = add("train", "Train a model", [&](Run& r) { return DoTrain(r, o); });
  AddCommon(s, o.c, true, true, true);
  AddTrainOptions(s, o.t);

  s = add("eval", "Evaluate a checkpoint", [&](Run& r) { return DoEval(r, o); });
  AddCommon(s, o.c, true, true, true);
  s->add_option("--checkpoint", o.checkpoints)->required();
  s->add_option("--threads", o.threads, "0: all cores");

  s = add("compare", "Evaluate several strategies", [&](Run& r) { return DoCompare(r, o); });
  AddCommon(s, o.c, true, true, false);
  s->add_option("--checkpoint", o.checkpoints, "One model, or one per strategy")->required();
  s->add_option("--strategies", o.strategies)->delimiter(',');

  s = add("bench", "Time sampling over a ladder of table sizes",
          [&](Run& r) { return DoBench(r, o); });
  AddCommon(s, o.c, false, false, true);
  s->add_option("--rows", o.bench_rows, "Table sizes")->delimiter(',');
  s->add_option("--queries", o.queries)->check(CLI::PositiveNumber);

  s = add("render", "Print the SQL for a sketch", [&](Run& r) { return DoRender(r, o); });
  AddCommon(s, o.c, false, true, false);
  s->add_option("--sketch", o.sketch, R"(e.g. {"sel": 0, "agg": 0, "conds": [[1, 0, "42"]]})");
  s->add_option("--headers", o.headers, "Comma-separated headers (instead of --tables)");
  s->add_option("--table-id", o.table_id);

  s = add("repl", "Answer questions interactively", [&](Run& r) { return DoRepl(r, o, in); });
  AddCommon(s, o.c, false, true, true);
  s->add_option("--checkpoint", o.checkpoints)->required();
  s->add_option("--table-id", o.table_id);

  if (args.empty()) {
    out << app.help();
    return kExitUsage;
  }
  try {
    std::vector<std::string> merged = MergeConfig(args, app);
    std::reverse(merged.begin(), merged.end());
    app.parse(merged);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands()[0]->help());
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << ToolVersion() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n";
    CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands()[0];
    err << sub->help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  for (const auto& cmd : cmds) {
    if (!cmd.app->parsed()) continue;
    try {
      Run run(cmd.app->get_name(), o, out);
      if (!o.c.config.empty()) run.Input(o.c.config);
      const int status = cmd.fn(run);
      run.Finish(*cmd.app);
      return status;
    } catch (const ValidationError& e) {
      err << "error: " << e.what() << '\n';
    } catch (const IoError& e) {
      err << "error: " << e.what() << '\n';
    } catch (const nlohmann::json::exception& e) {
      err << "error: " << e.what() << '\n';
    } catch (const std::filesystem::filesystem_error& e) {
      err << "error: " << e.what() << '\n';
    }
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace sketchsql
