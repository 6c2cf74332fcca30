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

#include "sketchsql/model.h"

#include <cmath>

#include "sketchsql/random.h"

namespace sketchsql {

using ad::Matrix;
using ad::Tape;
using ad::Var;

void ModelConfig::Validate() const {
  if (vocab_size < 1 || d_model < 1 || layers < 1 || heads < 1 || ff() < 1 ||
      max_positions < 1 || max_columns < 1 || max_conds < 1 || max_span < 1) {
    throw ValidationError("model sizes must be >= 1");
  }
  if (d_model % heads != 0) throw ValidationError("d_model must be divisible by heads");
  if (dropout < 0.0 || dropout >= 1.0) throw ValidationError("dropout must lie in [0, 1)");
  if (!(init_scale > 0.0)) throw ValidationError("init_scale must be positive");
}

nlohmann::json ModelConfig::ToJson() const {
  return {{"vocab_size", vocab_size}, {"d_model", d_model},
          {"layers", layers},         {"heads", heads},
          {"ff_dim", ff()},           {"max_positions", max_positions},
          {"max_columns", max_columns}, {"max_conds", max_conds},
          {"max_span", max_span},     {"dropout", dropout},
          {"init_scale", init_scale}, {"positions", positions},
          {"match_features", match_features}, {"seed", seed}};
}

ModelConfig ModelConfig::FromJson(const nlohmann::json& j) {
  ModelConfig c;
  c.vocab_size = j.value("vocab_size", c.vocab_size);
  c.d_model = j.value("d_model", c.d_model);
  c.layers = j.value("layers", c.layers);
  c.heads = j.value("heads", c.heads);
  c.ff_dim = j.value("ff_dim", c.ff_dim);
  c.max_positions = j.value("max_positions", c.max_positions);
  c.max_columns = j.value("max_columns", c.max_columns);
  c.max_conds = j.value("max_conds", c.max_conds);
  c.max_span = j.value("max_span", c.max_span);
  c.dropout = j.value("dropout", c.dropout);
  c.init_scale = j.value("init_scale", c.init_scale);
  c.positions = j.value("positions", c.positions);
  c.match_features = j.value("match_features", c.match_features);
  c.seed = j.value("seed", c.seed);
  return c;
}

Model::Model(ModelConfig config, Vocabulary vocab)
    : config_(std::move(config)), vocab_(std::move(vocab)) {
  config_.vocab_size = vocab_.size();
  config_.Validate();
  const std::size_t d = config_.d_model;
  const std::size_t ff = config_.ff();
  const double emb = 0.5 * config_.init_scale;
  Rng rng(config_.seed);

  // Embeddings.
  AddParameter("embed.token", config_.vocab_size, d, emb, rng);
  AddParameter("embed.shape", kNumShapeClasses, d, emb, rng);
  AddParameter("embed.segment", kNumSegments, d, emb, rng);
  if (config_.match_features) AddParameter("embed.match", kNumMatchClasses, d, emb, rng);
  AddParameter("embed.position", config_.max_positions, d, emb, rng);
  AddParameter("embed.column", config_.max_columns + 1, d, emb, rng);

  // Negative std selects Xavier-uniform init, zero gives zeros; gains start
  // at one.
  for (std::size_t l = 0; l < config_.layers; ++l) {
    const std::string p = "enc." + std::to_string(l) + ".";
    AddParameter(p + "ln1.gain", 1, d, 0.0, rng);
    AddParameter(p + "ln1.bias", 1, d, 0.0, rng);
    // No key bias: it shifts every score of a query equally.
    for (const char* w : {"wq", "wk", "wv", "wo"}) AddParameter(p + "attn." + w, d, d, -1.0, rng);
    for (const char* b : {"bq", "bv", "bo"}) AddParameter(p + "attn." + b, 1, d, 0.0, rng);
    AddParameter(p + "ln2.gain", 1, d, 0.0, rng);
    AddParameter(p + "ln2.bias", 1, d, 0.0, rng);
    AddParameter(p + "ff.w1", d, ff, -1.0, rng);
    AddParameter(p + "ff.b1", 1, ff, 0.0, rng);
    AddParameter(p + "ff.w2", ff, d, -1.0, rng);
    AddParameter(p + "ff.b2", 1, d, 0.0, rng);
  }
  AddParameter("enc.final.gain", 1, d, 0.0, rng);
  AddParameter("enc.final.bias", 1, d, 0.0, rng);

  // Heads. Each column-scoring head has its own attention map and a
  // tanh(h Wh + c Wc + b) hidden layer.
  for (const char* head : {"sel", "agg", "wcol", "wop", "wval"}) {
    const std::string p = std::string("head.") + head + ".";
    AddParameter(p + "att", d, d, -1.0, rng);
    if (std::string_view(head) == "wval") continue;
    AddParameter(p + "wh", d, d, -1.0, rng);
    AddParameter(p + "wc", d, d, -1.0, rng);
    AddParameter(p + "b", 1, d, 0.0, rng);
  }
  AddParameter("head.sel.out", d, 1, -1.0, rng);
  AddParameter("head.agg.out", d, kNumAggOps, -1.0, rng);
  AddParameter("head.agg.out_b", 1, kNumAggOps, 0.0, rng);
  AddParameter("head.wcol.out", d, 1, -1.0, rng);
  AddParameter("head.wcol.out_b", 1, 1, 0.0, rng);
  AddParameter("head.wop.out", d, kNumCondOps, -1.0, rng);
  AddParameter("head.wop.out_b", 1, kNumCondOps, 0.0, rng);
  AddParameter("head.wnum.pool", d, 1, -1.0, rng);
  AddParameter("head.wnum.w", d, d, -1.0, rng);
  AddParameter("head.wnum.b", 1, d, 0.0, rng);
  AddParameter("head.wnum.out", d, config_.max_conds + 1, -1.0, rng);
  AddParameter("head.wnum.out_b", 1, config_.max_conds + 1, 0.0, rng);
  for (const char* side : {"start", "end"}) {
    const std::string p = std::string("head.wval.") + side + ".";
    AddParameter(p + "wh", d, d, -1.0, rng);
    AddParameter(p + "wc", d, d, -1.0, rng);
    AddParameter(p + "b", 1, d, 0.0, rng);
    AddParameter(p + "wq", d, d, -1.0, rng);
  }
}

std::size_t Model::AddParameter(const std::string& name, std::size_t rows, std::size_t cols,
                                double init_std, Rng& rng) {
  const auto r = static_cast<Eigen::Index>(rows);
  const auto c = static_cast<Eigen::Index>(cols);
  Matrix m(r, c);
  if (name.ends_with(".gain")) {
    m.setOnes();
  } else if (init_std == 0.0) {
    m.setZero();
  } else if (init_std < 0.0) {
    const double a = config_.init_scale * std::sqrt(6.0 / static_cast<double>(rows + cols));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = (2.0 * rng.Uniform() - 1.0) * a;
  } else {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = init_std * rng.Normal();
  }
  index_.emplace(name, params_.size());
  params_.emplace_back(name, std::move(m));
  return params_.size() - 1;
}

std::size_t Model::Index(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw std::out_of_range("no parameter '" + std::string(name) + "'");
  return it->second;
}

const ad::Parameter& Model::parameter(std::string_view name) const {
  return params_[Index(name)];
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

void Model::ZeroGrad() {
  for (auto& p : params_) p.ZeroGrad();
}

Features Model::Featurize(const SerializedInput& input) const {
  return sketchsql::Featurize(input, vocab_, config_);
}

EncoderGraph Model::BuildEncoder(Tape& tape, const Features& f, const LeafFn& leaf,
                                 Rng* rng) const {
  const int n = static_cast<int>(f.size());
  if (static_cast<std::size_t>(n) > config_.max_positions) {
    throw ValidationError("input exceeds max_positions");
  }
  auto P = [&](std::string_view name) { return leaf(Index(name)); };
  const double drop = rng != nullptr ? config_.dropout : 0.0;

  std::vector<Var> parts = {tape.Rows(P("embed.token"), f.token_ids),
                            tape.Rows(P("embed.shape"), f.shapes),
                            tape.Rows(P("embed.segment"), f.segments)};
  if (config_.match_features) parts.push_back(tape.Rows(P("embed.match"), f.matches));
  if (config_.positions) {
    std::vector<int> pos(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pos[static_cast<std::size_t>(i)] = i;
    std::vector<int> cols = f.column_ordinals;
    for (int& c : cols) c = std::min<int>(c, static_cast<int>(config_.max_columns));
    parts.push_back(tape.Rows(P("embed.position"), pos));
    parts.push_back(tape.Rows(P("embed.column"), cols));
  }
  Var x = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) x = tape.Add(x, parts[i]);
  if (drop > 0.0) x = tape.Dropout(x, drop, *rng);

  const int d = static_cast<int>(config_.d_model);
  const int h = static_cast<int>(config_.heads);
  const int dh = d / h;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
  for (std::size_t l = 0; l < config_.layers; ++l) {
    const std::string p = "enc." + std::to_string(l) + ".";
    Var a = tape.LayerNorm(x, P(p + "ln1.gain"), P(p + "ln1.bias"));
    const Var q = tape.AddRow(tape.MatMul(a, P(p + "attn.wq")), P(p + "attn.bq"));
    const Var k = tape.MatMul(a, P(p + "attn.wk"));
    const Var v = tape.AddRow(tape.MatMul(a, P(p + "attn.wv")), P(p + "attn.bv"));
    std::vector<Var> outs;
    outs.reserve(static_cast<std::size_t>(h));
    for (int i = 0; i < h; ++i) {
      const Var qi = tape.ColRange(q, i * dh, dh);
      const Var ki = tape.ColRange(k, i * dh, dh);
      const Var vi = tape.ColRange(v, i * dh, dh);
      const Var w = tape.SoftmaxRows(tape.Scale(tape.MatMulNT(qi, ki), inv_sqrt));
      outs.push_back(tape.MatMul(w, vi));
    }
    Var att = h == 1 ? outs[0] : tape.ConcatCols(outs);
    att = tape.AddRow(tape.MatMul(att, P(p + "attn.wo")), P(p + "attn.bo"));
    if (drop > 0.0) att = tape.Dropout(att, drop, *rng);
    x = tape.Add(x, att);

    Var b = tape.LayerNorm(x, P(p + "ln2.gain"), P(p + "ln2.bias"));
    b = tape.Gelu(tape.AddRow(tape.MatMul(b, P(p + "ff.w1")), P(p + "ff.b1")));
    b = tape.AddRow(tape.MatMul(b, P(p + "ff.w2")), P(p + "ff.b2"));
    if (drop > 0.0) b = tape.Dropout(b, drop, *rng);
    x = tape.Add(x, b);
  }
  x = tape.LayerNorm(x, P("enc.final.gain"), P("enc.final.bias"));

  EncoderGraph g;
  g.tokens = x;
  std::vector<Var> headers;
  headers.reserve(f.column_count());
  for (const auto& rows : f.header_rows) headers.push_back(tape.MeanRows(x, rows));
  g.headers = tape.ConcatRows(headers);
  g.question = tape.RowRange(x, f.question_begin, f.question_length);
  return g;
}

Var ColumnAttention(Tape& tape, Var headers, Var question, Var w) {
  const Var scores = tape.MatMulNT(tape.MatMul(headers, w), question);
  return tape.MatMul(tape.SoftmaxRows(scores), question);
}

ColumnAttentionResult ColumnAttention(const Matrix& headers, const Matrix& question,
                                      const Matrix& w) {
  Tape tape;
  const Var h = tape.Constant(headers);
  const Var q = tape.Constant(question);
  const Var scores = tape.MatMulNT(tape.MatMul(h, tape.Constant(w)), q);
  const Var weights = tape.SoftmaxRows(scores);
  return {tape.value(weights), tape.value(tape.MatMul(weights, q))};
}

HeadGraph Model::BuildHeads(Tape& tape, const EncoderGraph& enc, std::optional<int> agg_select,
                            const LeafFn& leaf) const {
  auto P = [&](std::string_view name) { return leaf(Index(name)); };
  const Var H = enc.headers;
  const Var Q = enc.question;
  auto hidden = [&](const std::string& head, Var h, Var c) {
    const std::string p = "head." + head + ".";
    const Var z = tape.Add(tape.MatMul(h, P(p + "wh")), tape.MatMul(c, P(p + "wc")));
    return tape.Tanh(tape.AddRow(z, P(p + "b")));
  };

  HeadGraph g;
  const Var sel_ctx = ColumnAttention(tape, H, Q, P("head.sel.att"));
  g.sel = tape.MatMul(hidden("sel", H, sel_ctx), P("head.sel.out"));

  int s = 0;
  if (agg_select.has_value()) {
    s = *agg_select;
  } else {
    const Matrix& sel = tape.value(g.sel);
    Eigen::Index best = 0;
    sel.col(0).maxCoeff(&best);
    s = static_cast<int>(best);
  }
  if (s < 0 || s >= tape.value(H).rows()) throw ValidationError("agg select column out of range");
  g.agg_select = s;
  const Var agg_ctx = ColumnAttention(tape, H, Q, P("head.agg.att"));
  const Var agg_h = hidden("agg", tape.RowRange(H, s, 1), tape.RowRange(agg_ctx, s, 1));
  g.agg = tape.AddRow(tape.MatMul(agg_h, P("head.agg.out")), P("head.agg.out_b"));

  const Var pool = tape.SoftmaxRows(tape.Transpose(tape.MatMul(Q, P("head.wnum.pool"))));
  const Var summary = tape.MatMul(pool, Q);
  const Var wnum_h = tape.Tanh(tape.AddRow(tape.MatMul(summary, P("head.wnum.w")),
                                           P("head.wnum.b")));
  g.wnum = tape.AddRow(tape.MatMul(wnum_h, P("head.wnum.out")), P("head.wnum.out_b"));

  const Var wcol_ctx = ColumnAttention(tape, H, Q, P("head.wcol.att"));
  const Var wcol_h = hidden("wcol", H, wcol_ctx);
  g.wcol = tape.AddRow(tape.MatMul(wcol_h, P("head.wcol.out")), P("head.wcol.out_b"));

  const Var wop_ctx = ColumnAttention(tape, H, Q, P("head.wop.att"));
  g.wop = tape.AddRow(tape.MatMul(hidden("wop", H, wop_ctx), P("head.wop.out")),
                      P("head.wop.out_b"));

  // Bilinear span scores between a column-conditioned key and each question
  // token.
  const Var wval_ctx = ColumnAttention(tape, H, Q, P("head.wval.att"));
  auto span = [&](const std::string& side) {
    const std::string p = "head.wval." + side + ".";
    const Var key = tape.Tanh(tape.AddRow(
        tape.Add(tape.MatMul(H, P(p + "wh")), tape.MatMul(wval_ctx, P(p + "wc"))), P(p + "b")));
    return tape.MatMulNT(key, tape.MatMul(Q, P(p + "wq")));
  };
  g.wval_start = span("start");
  g.wval_end = span("end");
  return g;
}

HeadGraph Model::Forward(Tape& tape, const Features& features, int agg_select, Rng* rng,
                         EncoderGraph* encoder) {
  const LeafFn leaf = [&](std::size_t i) { return tape.Param(params_[i]); };
  const EncoderGraph enc = BuildEncoder(tape, features, leaf, rng);
  if (encoder != nullptr) *encoder = enc;
  return BuildHeads(tape, enc, agg_select, leaf);
}

EncoderOutput Model::Encode(const Features& features) const {
  Tape tape;
  const LeafFn leaf = [&](std::size_t i) { return tape.FrozenParam(params_[i]); };
  const EncoderGraph enc = BuildEncoder(tape, features, leaf, nullptr);
  return {tape.value(enc.tokens), tape.value(enc.headers), tape.value(enc.question)};
}

HeadOutputs Model::Predict(const Features& features, std::optional<int> agg_select) const {
  Tape tape;
  const LeafFn leaf = [&](std::size_t i) { return tape.FrozenParam(params_[i]); };
  const EncoderGraph enc = BuildEncoder(tape, features, leaf, nullptr);
  return ToHeadOutputs(tape, BuildHeads(tape, enc, agg_select, leaf));
}

}  // namespace sketchsql
