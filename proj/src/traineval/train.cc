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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "sketchsql/random.h"
#include "sketchsql/traineval.h"

namespace sketchsql {

Adam::Adam(const std::vector<ad::Parameter>& params, AdamConfig config) : config_(config) {
  for (const auto& p : params) {
    m_.push_back(ad::Matrix::Zero(p.value.rows(), p.value.cols()));
    v_.push_back(ad::Matrix::Zero(p.value.rows(), p.value.cols()));
  }
}

void Adam::Step(std::vector<ad::Parameter>& params, const std::vector<double>& lr_scale) {
  if (params.size() != m_.size()) throw ValidationError("optimizer built for other parameters");
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double lr = config_.lr * (lr_scale.empty() ? 1.0 : lr_scale[i]);
    auto& g = params[i].grad;
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * g.cwiseProduct(g);
    if (lr == 0.0) continue;
    params[i].value.array() -=
        lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + config_.eps);
  }
}

double ClipGradients(std::vector<ad::Parameter>& params, double max_norm) {
  double sq = 0.0;
  for (const auto& p : params) sq += p.grad.squaredNorm();
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double s = max_norm / norm;
    for (auto& p : params) p.grad *= s;
  }
  return norm;
}

void TrainConfig::Validate() const {
  if (epochs == 0 || batch_size == 0 || eval_every == 0) {
    throw ValidationError("epochs, batch_size and eval_every must be positive");
  }
  if (!(adam.lr >= 0.0) || (encoder_lr && !(*encoder_lr >= 0.0))) {
    throw ValidationError("learning rates must be non-negative");
  }
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0) ||
      !(adam.eps > 0.0)) {
    throw ValidationError("adam betas must lie in [0, 1) and eps must be positive");
  }
  if (clip_norm < 0.0) throw ValidationError("clip_norm must be non-negative");
  if (target_train_lf < 0.0 || target_train_lf > 1.0) {
    throw ValidationError("target_train_lf must lie in [0, 1]");
  }
  if (checkpoint_every > 0 && checkpoint_dir.empty()) {
    throw ValidationError("checkpoint_every needs a checkpoint_dir");
  }
  if (augment) augment_config.Validate();
  ModelConfig m = model;
  m.vocab_size = std::max<std::size_t>(m.vocab_size, 1);  // set from the data later
  m.Validate();
}

nlohmann::json TrainConfig::ToJson() const {
  nlohmann::json j = {
      {"epochs", epochs},
      {"batch_size", batch_size},
      {"lr", adam.lr},
      {"beta1", adam.beta1},
      {"beta2", adam.beta2},
      {"eps", adam.eps},
      {"clip_norm", clip_norm},
      {"strategy", spec.ToString()},
      {"budget", budget},
      {"augment", augment},
      {"model", model.ToJson()},
      {"vocab_min_count", vocab_min_count},
      {"seed", seed},
      {"checkpoint_every", checkpoint_every},
      {"checkpoint_dir", checkpoint_dir.string()},
      {"target_train_lf", target_train_lf},
      {"eval_every", eval_every},
  };
  j["encoder_lr"] = encoder_lr ? nlohmann::json(*encoder_lr) : nlohmann::json(nullptr);
  const auto& a = augment_config;
  j["augment_config"] = {{"variants_per_example", a.variants_per_example},
                         {"include_select_prefix", a.include_select_prefix},
                         {"include_select_suffix", a.include_select_suffix},
                         {"shuffle_conditions", a.shuffle_conditions},
                         {"swap_column_value", a.swap_column_value},
                         {"symbol_substitution_probability", a.symbol_substitution_probability},
                         {"mix_ratio", a.mix_ratio},
                         {"seed", a.seed}};
  return j;
}

TrainConfig TrainConfig::FromJson(const nlohmann::json& j) {
  TrainConfig c;
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.adam.lr = j.value("lr", c.adam.lr);
  c.adam.beta1 = j.value("beta1", c.adam.beta1);
  c.adam.beta2 = j.value("beta2", c.adam.beta2);
  c.adam.eps = j.value("eps", c.adam.eps);
  if (j.contains("encoder_lr") && !j["encoder_lr"].is_null()) {
    c.encoder_lr = j["encoder_lr"].get<double>();
  }
  c.clip_norm = j.value("clip_norm", c.clip_norm);
  if (j.contains("strategy")) c.spec = StrategySpec::Parse(j["strategy"].get<std::string>());
  c.budget = j.value("budget", c.budget);
  c.augment = j.value("augment", c.augment);
  if (j.contains("model")) c.model = ModelConfig::FromJson(j["model"]);
  c.vocab_min_count = j.value("vocab_min_count", c.vocab_min_count);
  c.seed = j.value("seed", c.seed);
  c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
  c.checkpoint_dir = j.value("checkpoint_dir", std::string());
  c.target_train_lf = j.value("target_train_lf", c.target_train_lf);
  c.eval_every = j.value("eval_every", c.eval_every);
  if (j.contains("augment_config")) {
    const auto& a = j["augment_config"];
    auto& o = c.augment_config;
    o.variants_per_example = a.value("variants_per_example", o.variants_per_example);
    o.include_select_prefix = a.value("include_select_prefix", o.include_select_prefix);
    o.include_select_suffix = a.value("include_select_suffix", o.include_select_suffix);
    o.shuffle_conditions = a.value("shuffle_conditions", o.shuffle_conditions);
    o.swap_column_value = a.value("swap_column_value", o.swap_column_value);
    o.symbol_substitution_probability =
        a.value("symbol_substitution_probability", o.symbol_substitution_probability);
    o.mix_ratio = a.value("mix_ratio", o.mix_ratio);
    o.seed = a.value("seed", o.seed);
  }
  return c;
}

nlohmann::json EpochRecord::ToJson() const {
  nlohmann::json j = {{"epoch", epoch}, {"loss", mean_loss}, {"parts", parts.ToJson()},
                      {"seconds", seconds}};
  if (train_lf) j["train_lf"] = *train_lf;
  if (dev_lf) j["dev_lf"] = *dev_lf;
  if (dev_ex) j["dev_ex"] = *dev_ex;
  return j;
}

nlohmann::json TrainHistory::ToJson() const {
  nlohmann::json epochs_json = nlohmann::json::array();
  for (const auto& e : epochs) epochs_json.push_back(e.ToJson());
  return {{"examples", examples},
          {"trained", trained},
          {"dropped_unalignable", dropped_unalignable},
          {"ambiguous_values", ambiguous_values},
          {"reached_target", reached_target},
          {"epochs", epochs_json}};
}

namespace {

struct Prepared {
  const Example* example;
  SerializedInput input;
  Features features;
  GoldAlignment alignment;
};

void AddParts(LossBreakdown& into, const LossBreakdown& b, double w) {
  into.sel += w * b.sel;
  into.agg += w * b.agg;
  into.wnum += w * b.wnum;
  into.wcol += w * b.wcol;
  into.wop += w * b.wop;
  into.wval += w * b.wval;
  into.total += w * b.total;
}

bool IsEncoderParameter(const std::string& name) {
  return name.starts_with("embed.") || name.starts_with("enc.");
}

}  // namespace

TrainHistory TrainModel(Model& model, const Corpus& train, const TableMap& tables,
                        const TrainConfig& config, const Corpus* dev,
                        const EpochCallback& on_epoch) {
  config.Validate();
  if (train.empty()) throw ValidationError("training corpus is empty");

  TrainHistory history;
  history.examples = train.size();
  const Predictor sampler(model, tables, config.spec, config.seed, config.budget);
  std::vector<Prepared> data;
  data.reserve(train.size());
  for (const auto& e : train.examples) {
    SerializedInput input = sampler.Serialize(e.table_id, e.question);
    auto alignment = AlignGold(e.gold, e.question, input, model.config().max_span);
    if (!alignment) {
      ++history.dropped_unalignable;
      continue;
    }
    history.ambiguous_values += alignment->ambiguous;
    Features f = model.Featurize(input);
    data.push_back({&e, std::move(input), std::move(f), std::move(*alignment)});
  }
  history.trained = data.size();
  if (data.empty()) throw ValidationError("no training example could be aligned");

  std::vector<double> lr_scale;
  if (config.encoder_lr && config.adam.lr > 0.0) {
    for (const auto& p : model.parameters()) {
      lr_scale.push_back(IsEncoderParameter(p.name) ? *config.encoder_lr / config.adam.lr : 1.0);
    }
  }
  Adam adam(model.parameters(), config.adam);
  Rng order_rng(MixSeed(config.seed, 0x5eed0001));
  Rng dropout_rng(MixSeed(config.seed, 0x5eed0002));
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  auto train_lf = [&] {
    std::size_t hit = 0;
    for (const auto& d : data) {
      const Table& t = sampler.table(d.example->table_id);
      const SqlSketch pred = DecodeSketch(model.Predict(d.features), t.schema,
                                          d.example->question, d.input, model.config().max_span);
      if (LfEqual(pred, d.example->gold)) ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(data.size());
  };

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    order_rng.Shuffle(order);
    EpochRecord rec;
    rec.epoch = epoch;
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const std::size_t end = std::min(order.size(), b + config.batch_size);
      const double scale = 1.0 / static_cast<double>(end - b);
      model.ZeroGrad();
      for (std::size_t i = b; i < end; ++i) {
        const Prepared& d = data[order[i]];
        ad::Tape tape;
        const HeadGraph g =
            model.Forward(tape, d.features, static_cast<int>(d.example->gold.select_column),
                          model.config().dropout > 0.0 ? &dropout_rng : nullptr);
        LossBreakdown parts;
        const ad::Var loss = SketchLoss(tape, g, d.example->gold, d.alignment, &parts);
        tape.Backward(tape.Scale(loss, scale));
        AddParts(rec.parts, parts, 1.0 / static_cast<double>(data.size()));
      }
      ClipGradients(model.parameters(), config.clip_norm);
      adam.Step(model.parameters(), lr_scale);
    }
    rec.mean_loss = rec.parts.total;

    const bool last = epoch == config.epochs;
    if (epoch % config.eval_every == 0 || last) {
      rec.train_lf = train_lf();
      if (dev != nullptr && !dev->empty()) {
        const EvalReport r = Evaluate(model, *dev, tables, config.spec, config.seed, config.budget);
        rec.dev_lf = r.lf();
        rec.dev_ex = r.ex();
      }
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (config.checkpoint_every > 0 && epoch % config.checkpoint_every == 0) {
      std::filesystem::create_directories(config.checkpoint_dir);
      char name[32];
      std::snprintf(name, sizeof(name), "epoch-%04zu.ckpt", epoch);
      model.Save(config.checkpoint_dir / name);
    }
    history.epochs.push_back(rec);
    const bool keep_going = !on_epoch || on_epoch(rec);
    if (config.target_train_lf > 0.0 && rec.train_lf && *rec.train_lf >= config.target_train_lf) {
      history.reached_target = true;
      break;
    }
    if (!keep_going) break;
  }
  return history;
}

TrainResult Train(const Corpus& train, const TableMap& tables, const TrainConfig& config,
                  const Corpus* dev, const EpochCallback& on_epoch) {
  config.Validate();
  if (train.empty()) throw ValidationError("training corpus is empty");
  Corpus data = config.augment ? AugmentCorpus(train, tables, config.augment_config) : train;
  Vocabulary vocab = Vocabulary::Build(data, tables, config.vocab_min_count);
  ModelConfig mc = config.model;
  mc.vocab_size = vocab.size();
  mc.seed = config.seed;
  TrainResult result{Model(mc, std::move(vocab)), {}};
  result.history = TrainModel(result.model, data, tables, config, dev, on_epoch);
  return result;
}

}  // namespace sketchsql
