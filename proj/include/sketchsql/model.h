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

// Transformer encoder over serialized inputs, and the six sketch heads.
//
// Every input token is embedded as the sum of token, shape-class, segment,
// lexical-match, position and column-ordinal embeddings; the last two are the
// positional part and can be switched off. The encoder is a pre-norm transformer stack.
// Heads read the question-token vectors and one pooled vector per column
// (the mean over that column's header tokens):
//
//   sel   per column, from the header vector and its column-attention context
//   agg   6 ops, from the selected column's header and context
//   wnum  0..max_conds, from an attention-pooled question summary
//   wcol  per column, sigmoid
//   wop   per column, 3 ops
//   wval  per column, start and end logits over question tokens only
//
// Column attention: weights softmax_i(h^T W q_i), context sum_i a_i q_i, with
// one W per head.

#ifndef SKETCHSQL_MODEL_H_
#define SKETCHSQL_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "sketchsql/autodiff.h"
#include "sketchsql/core.h"
#include "sketchsql/dataio.h"
#include "sketchsql/serialize.h"

namespace sketchsql {

class Rng;

struct ModelConfig {
  std::size_t vocab_size = 0;  // taken from the vocabulary
  std::size_t d_model = 128;
  std::size_t layers = 2;
  std::size_t heads = 4;
  std::size_t ff_dim = 0;  // 0 means 4 * d_model
  std::size_t max_positions = 512;
  std::size_t max_columns = 32;
  std::size_t max_conds = kDefaultMaxConds;
  std::size_t max_span = 16;
  double dropout = 0.1;
  double init_scale = 1.0;
  // Position and column-ordinal embeddings.
  bool positions = true;
  // Lexical-match embeddings (see Features::matches).
  bool match_features = true;
  std::uint64_t seed = 1;

  std::size_t ff() const { return ff_dim == 0 ? 4 * d_model : ff_dim; }
  /// Throws ValidationError unless d_model % heads == 0 and all sizes >= 1.
  void Validate() const;
  nlohmann::json ToJson() const;
  static ModelConfig FromJson(const nlohmann::json& j);
};

/// Lowercased token strings. Ids 0-4 are [UNK], [CLS], [SEP], "||" and "|".
class Vocabulary {
 public:
  static constexpr int kUnk = 0;
  static constexpr int kCls = 1;
  static constexpr int kSep = 2;
  static constexpr int kHeaderSamples = 3;
  static constexpr int kSampleSep = 4;

  Vocabulary();
  explicit Vocabulary(const std::vector<std::string>& tokens);

  /// Tokens of every question, header and cell reachable from `corpus`, kept
  /// when seen at least `min_count` times. Order: specials, then by first
  /// appearance.
  static Vocabulary Build(const Corpus& corpus, const TableMap& tables,
                          std::size_t min_count = 1);

  int Add(std::string_view token);
  int Id(std::string_view token) const;
  std::size_t size() const { return tokens_.size(); }
  const std::string& token(int id) const { return tokens_[static_cast<std::size_t>(id)]; }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

enum class ShapeClass { kSpecial = 0, kWord = 1, kNumber = 2, kMixed = 3, kPunct = 4 };
inline constexpr int kNumShapeClasses = 5;
inline constexpr int kNumMatchClasses = 4;
ShapeClass ClassifyToken(std::string_view text);

/// Integer features of one serialized input.
struct Features {
  std::vector<int> token_ids;
  std::vector<int> shapes;
  std::vector<int> segments;
  std::vector<int> column_ordinals;  // 0 outside column blocks, else column+1
  // Exact lowercase string match across segments. Question tokens: bit 0 set
  // when some header token is equal, bit 1 when some sample token is. Header
  // and sample tokens: 1 or 2 when some question token is equal. Punctuation
  // and delimiters are 0.
  std::vector<int> matches;
  std::vector<std::vector<int>> header_rows;  // per column
  int question_begin = 1;
  int question_length = 0;

  std::size_t size() const { return token_ids.size(); }
  std::size_t column_count() const { return header_rows.size(); }
};

/// Throws ValidationError when the input is longer than max_positions, has
/// more columns than max_columns, no question tokens, or a column without
/// header tokens.
Features Featurize(const SerializedInput& input, const Vocabulary& vocab,
                   const ModelConfig& config);

struct EncoderOutput {
  ad::Matrix tokens;    // n x d
  ad::Matrix headers;   // columns x d
  ad::Matrix question;  // question tokens x d
};

struct HeadOutputs {
  Eigen::VectorXd sel_logits;   // columns
  Eigen::VectorXd agg_logits;   // kNumAggOps
  int agg_select = 0;           // column the agg head was conditioned on
  Eigen::VectorXd wnum_logits;  // max_conds + 1
  Eigen::VectorXd wcol_scores;  // columns, in (0, 1)
  ad::Matrix wop_logits;        // columns x kNumCondOps
  ad::Matrix wval_start_logits; // columns x question tokens
  ad::Matrix wval_end_logits;

  std::size_t column_count() const { return static_cast<std::size_t>(sel_logits.size()); }
  std::size_t question_length() const {
    return static_cast<std::size_t>(wval_start_logits.cols());
  }
};

// Graph handles for training.
struct EncoderGraph {
  ad::Var tokens;
  ad::Var headers;
  ad::Var question;
};

struct HeadGraph {
  ad::Var sel;        // columns x 1
  ad::Var agg;        // 1 x 6
  int agg_select = 0;
  ad::Var wnum;       // 1 x (max_conds + 1)
  ad::Var wcol;       // columns x 1, logits
  ad::Var wop;        // columns x 3
  ad::Var wval_start; // columns x question tokens
  ad::Var wval_end;
};

HeadOutputs ToHeadOutputs(const ad::Tape& tape, const HeadGraph& graph);

/// Attention weights (columns x question tokens) and contexts (columns x d)
/// for headers H and question vectors Q under bilinear map W.
struct ColumnAttentionResult {
  ad::Matrix weights;
  ad::Matrix context;
};
ColumnAttentionResult ColumnAttention(const ad::Matrix& headers,
                                      const ad::Matrix& question,
                                      const ad::Matrix& w);
/// The same computation recorded on a tape; returns the context.
ad::Var ColumnAttention(ad::Tape& tape, ad::Var headers, ad::Var question, ad::Var w);

class Model {
 public:
  Model(ModelConfig config, Vocabulary vocab);

  const ModelConfig& config() const { return config_; }
  const Vocabulary& vocab() const { return vocab_; }
  std::vector<ad::Parameter>& parameters() { return params_; }
  const std::vector<ad::Parameter>& parameters() const { return params_; }
  const ad::Parameter& parameter(std::string_view name) const;
  std::size_t parameter_count() const;
  void ZeroGrad();

  Features Featurize(const SerializedInput& input) const;

  /// Trainable graph: parameters take gradients; dropout applies when `rng`
  /// is non-null. The agg head is conditioned on `agg_select` (the gold select
  /// column during training).
  HeadGraph Forward(ad::Tape& tape, const Features& features, int agg_select,
                    Rng* rng, EncoderGraph* encoder = nullptr);

  EncoderOutput Encode(const Features& features) const;
  /// Inference over frozen parameters; safe for concurrent callers. With no
  /// `agg_select` the agg head follows the argmax of sel_logits.
  HeadOutputs Predict(const Features& features,
                      std::optional<int> agg_select = std::nullopt) const;

  // Checkpoint layout (all integers little-endian):
  //   "SKQL"  magic
  //   u32     format version (1)
  //   u64     byte length, then the JSON model config
  //   u32     vocabulary size, then per token: u32 length, bytes
  //   u32     tensor count, then per tensor: u32 name length, name bytes,
  //           u32 rows, u32 cols, rows*cols IEEE-754 f64 values, row-major
  void Save(std::ostream& out) const;
  void Save(const std::filesystem::path& path) const;
  static Model Load(std::istream& in);
  static Model Load(const std::filesystem::path& path);

 private:
  using LeafFn = std::function<ad::Var(std::size_t)>;

  std::size_t AddParameter(const std::string& name, std::size_t rows, std::size_t cols,
                           double init_std, Rng& rng);
  std::size_t Index(std::string_view name) const;
  EncoderGraph BuildEncoder(ad::Tape& tape, const Features& f, const LeafFn& leaf,
                            Rng* rng) const;
  HeadGraph BuildHeads(ad::Tape& tape, const EncoderGraph& enc, std::optional<int> agg_select,
                       const LeafFn& leaf) const;

  ModelConfig config_;
  Vocabulary vocab_;
  std::vector<ad::Parameter> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Question-token span [start, end] (inclusive) of each gold condition value.
struct GoldAlignment {
  std::vector<std::pair<int, int>> spans;
  // Conditions whose value occurs more than once; the first occurrence is used.
  std::size_t ambiguous = 0;
};

/// First occurrence of each condition value among the question tokens whose
/// source text normalizes to the value and spans at most `max_span` tokens.
/// nullopt when some value has no such occurrence.
std::optional<GoldAlignment> AlignGold(const SqlSketch& gold, std::string_view question,
                                       const SerializedInput& input, std::size_t max_span);

/// Builds the sketch from head scores: argmax select, agg and count; the top
/// wnum columns by wcol score (ties to the lower index); per column the argmax
/// op and the best span with start <= end and end - start < max_span, its text
/// taken from the original question.
SqlSketch DecodeSketch(const HeadOutputs& heads, const TableSchema& schema,
                       std::string_view question, const SerializedInput& input,
                       std::size_t max_span);

struct LossBreakdown {
  double sel = 0.0;
  double agg = 0.0;
  double wnum = 0.0;
  double wcol = 0.0;
  double wop = 0.0;
  double wval = 0.0;  // start + end
  double total = 0.0;

  nlohmann::json ToJson() const;
};

/// Unweighted sum of: cross-entropy for sel, agg and wnum; binary
/// cross-entropy over all columns for wcol; and per gold condition, op
/// cross-entropy plus start and end cross-entropies on its column's row.
ad::Var SketchLoss(ad::Tape& tape, const HeadGraph& heads, const SqlSketch& gold,
                   const GoldAlignment& alignment, LossBreakdown* breakdown = nullptr);

}  // namespace sketchsql

#endif  // SKETCHSQL_MODEL_H_
