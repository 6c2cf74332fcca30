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

// Training, prediction and evaluation.
//
// Examples of a mini-batch are run one at a time and their gradients summed
// (scaled by 1/batch), so tables with different column counts never need
// padding.

#ifndef SKETCHSQL_TRAINEVAL_H_
#define SKETCHSQL_TRAINEVAL_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sketchsql/augment.h"
#include "sketchsql/content_index.h"
#include "sketchsql/core.h"
#include "sketchsql/dataio.h"
#include "sketchsql/model.h"
#include "sketchsql/sampling.h"
#include "sketchsql/serialize.h"

namespace sketchsql {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam(const std::vector<ad::Parameter>& params, AdamConfig config);

  /// One update from the current gradients. `lr_scale[i]` multiplies the rate
  /// of parameter i (empty means 1 everywhere).
  void Step(std::vector<ad::Parameter>& params, const std::vector<double>& lr_scale = {});
  std::size_t steps() const { return t_; }

 private:
  AdamConfig config_;
  std::vector<ad::Matrix> m_;
  std::vector<ad::Matrix> v_;
  std::size_t t_ = 0;
};

/// Rescales all gradients so their joint L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
double ClipGradients(std::vector<ad::Parameter>& params, double max_norm);

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 16;
  AdamConfig adam;
  // Rate for embed.* and enc.* parameters; the heads use adam.lr.
  std::optional<double> encoder_lr;
  double clip_norm = 5.0;  // 0 disables clipping
  StrategySpec spec;
  std::size_t budget = kDefaultBudget;
  bool augment = false;
  AugmentConfig augment_config;
  ModelConfig model;
  std::size_t vocab_min_count = 1;
  // Initialization (overriding model.seed), example order, dropout and
  // sampling.
  std::uint64_t seed = 1;
  // Save a checkpoint every this many epochs into checkpoint_dir (0: never).
  std::size_t checkpoint_every = 0;
  std::filesystem::path checkpoint_dir;
  // Stop once train LF reaches this (0: run every epoch).
  double target_train_lf = 0.0;
  // Train/dev metrics are computed every this many epochs and at the end.
  std::size_t eval_every = 1;

  /// Throws ValidationError for non-positive counts or rates.
  void Validate() const;
  nlohmann::json ToJson() const;
  static TrainConfig FromJson(const nlohmann::json& j);
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  LossBreakdown parts;    // means over the epoch
  double seconds = 0.0;
  std::optional<double> train_lf;
  std::optional<double> dev_lf;
  std::optional<double> dev_ex;

  nlohmann::json ToJson() const;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t examples = 0;           // after augmentation
  std::size_t trained = 0;            // after dropping
  std::size_t dropped_unalignable = 0;
  std::size_t ambiguous_values = 0;
  bool reached_target = false;

  nlohmann::json ToJson() const;
};

struct TrainResult {
  Model model;
  TrainHistory history;
};

/// Called after each epoch; returning false stops training.
using EpochCallback = std::function<bool(const EpochRecord&)>;

/// Builds the vocabulary from `train` (after augmentation) and its tables, then
/// fits a fresh model. Throws ValidationError on an empty corpus or when no
/// example survives alignment.
TrainResult Train(const Corpus& train, const TableMap& tables, const TrainConfig& config,
                  const Corpus* dev = nullptr, const EpochCallback& on_epoch = {});

/// Continues training an existing model.
TrainHistory TrainModel(Model& model, const Corpus& train, const TableMap& tables,
                        const TrainConfig& config, const Corpus* dev = nullptr,
                        const EpochCallback& on_epoch = {});

/// Samples, serializes and decodes questions for one strategy. Keeps one
/// content index and one offline random sample set per table, built on first
/// use. Safe for concurrent callers.
class Predictor {
 public:
  Predictor(const Model& model, const TableMap& tables, StrategySpec spec,
            std::uint64_t seed, std::size_t budget = kDefaultBudget);

  SampleSet Samples(const std::string& table_id, std::string_view question) const;
  SerializedInput Serialize(const std::string& table_id, std::string_view question) const;
  /// Throws ValidationError for an unknown table.
  SqlSketch Predict(const std::string& table_id, std::string_view question) const;

  const Table& table(const std::string& table_id) const;

 private:
  struct TableCache {
    ContentIndex index;
    SampleSet offline;
  };
  const TableCache& Cache(const std::string& table_id) const;

  const Model& model_;
  const TableMap& tables_;
  StrategySpec spec_;
  std::uint64_t seed_;
  std::size_t budget_;
  mutable std::mutex mu_;
  mutable std::map<std::string, std::unique_ptr<TableCache>, std::less<>> cache_;
};

enum class Subtask { kSel, kAgg, kWnum, kWcol, kWop, kWval };
inline constexpr int kNumSubtasks = 6;
std::string_view SubtaskName(Subtask s);

/// Per-slot agreement. wcol compares condition columns as multisets, wop
/// (column, op) pairs, wval (column, normalized value) pairs.
bool SubtaskEqual(Subtask s, const SqlSketch& pred, const SqlSketch& gold);

struct ExampleRecord {
  std::string id;
  std::string table_id;
  std::string question;
  SqlSketch predicted;
  SqlSketch gold;
  std::string predicted_sql;
  std::string gold_sql;
  bool lf = false;
  bool ex = false;
  bool subtask[kNumSubtasks] = {};
};

struct EvalReport {
  std::string label;
  std::size_t total = 0;
  std::size_t lf_correct = 0;
  std::size_t ex_correct = 0;
  std::size_t subtask_correct[kNumSubtasks] = {};
  std::vector<ExampleRecord> records;

  double lf() const;
  double ex() const;
  double accuracy(Subtask s) const;
  std::vector<const ExampleRecord*> errors() const;

  /// Metrics plus the error records.
  nlohmann::json ToJson() const;
};

/// Scores predictions (one per example, in corpus order). Pure: the same
/// inputs give the same report. Throws ValidationError on a size mismatch or a
/// missing table.
EvalReport EvaluatePredictions(const Corpus& corpus, const TableMap& tables,
                               const std::vector<SqlSketch>& predictions,
                               std::string label = "");

/// Predicts every example with `threads` workers (0: hardware concurrency)
/// and scores the result. Throws ValidationError on an empty corpus or a
/// missing table.
EvalReport Evaluate(const Model& model, const Corpus& corpus, const TableMap& tables,
                    const StrategySpec& spec, std::uint64_t seed,
                    std::size_t budget = kDefaultBudget, std::size_t threads = 0);

/// Line-delimited {"id", "table_id", "pred": {sel, agg, conds}, "sql", "lf", "ex"}.
void WritePredictions(std::ostream& out, const EvalReport& report);
/// Predictions in file order, keyed back to `corpus` by id. Throws
/// ValidationError when an example has no prediction.
std::vector<SqlSketch> ReadPredictions(std::istream& in, const Corpus& corpus);

/// One report per strategy. With one model every strategy uses it; otherwise
/// models[i] is evaluated under specs[i].
std::vector<EvalReport> CompareStrategies(const std::vector<const Model*>& models,
                                          const Corpus& corpus, const TableMap& tables,
                                          const std::vector<StrategySpec>& specs,
                                          std::uint64_t seed,
                                          std::size_t budget = kDefaultBudget);

/// Columns: strategy, LF, EX, then the six subtask accuracies, as percentages.
std::string RenderComparison(const std::vector<EvalReport>& reports);
nlohmann::json ComparisonJson(const std::vector<EvalReport>& reports);

}  // namespace sketchsql

#endif  // SKETCHSQL_TRAINEVAL_H_
