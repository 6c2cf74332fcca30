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

#include <set>
#include <unordered_set>

#include "sketchsql/model.h"
#include "sketchsql/text.h"

namespace sketchsql {

Vocabulary::Vocabulary() {
  for (std::string_view s : {std::string_view("[unk]"), kClsToken, kSepToken,
                             kHeaderSamplesToken, kSampleSepToken}) {
    Add(s);
  }
}

Vocabulary::Vocabulary(const std::vector<std::string>& tokens) {
  for (const auto& t : tokens) {
    const int before = static_cast<int>(tokens_.size());
    if (Add(t) != before) throw ValidationError("duplicate vocabulary token '" + t + "'");
  }
  if (tokens_.size() < 5 || tokens_[kCls] != ToLowerAscii(kClsToken) ||
      tokens_[kSep] != ToLowerAscii(kSepToken) || tokens_[kHeaderSamples] != kHeaderSamplesToken ||
      tokens_[kSampleSep] != kSampleSepToken) {
    throw ValidationError("vocabulary does not start with the special tokens");
  }
}

int Vocabulary::Add(std::string_view token) {
  std::string key = ToLowerAscii(token);
  auto it = ids_.find(key);
  if (it != ids_.end()) return it->second;
  const int id = static_cast<int>(tokens_.size());
  ids_.emplace(key, id);
  tokens_.push_back(std::move(key));
  return id;
}

int Vocabulary::Id(std::string_view token) const {
  auto it = ids_.find(ToLowerAscii(token));
  return it == ids_.end() ? kUnk : it->second;
}

Vocabulary Vocabulary::Build(const Corpus& corpus, const TableMap& tables,
                             std::size_t min_count) {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> counts;
  auto see = [&](std::string_view text) {
    for (auto& t : TokenizeLower(text)) {
      auto [it, fresh] = counts.emplace(t, 0);
      if (fresh) order.push_back(t);
      ++it->second;
    }
  };
  std::set<std::string, std::less<>> used;
  for (const auto& e : corpus.examples) {
    see(e.question);
    used.insert(e.table_id);
  }
  for (const auto& id : used) {
    auto it = tables.find(id);
    if (it == tables.end()) continue;
    for (const auto& h : it->second.schema.headers) see(h);
    for (const auto& row : it->second.rows) {
      for (const auto& cell : row) see(cell);
    }
  }
  Vocabulary v;
  for (const auto& t : order) {
    if (counts[t] >= min_count) v.Add(t);
  }
  return v;
}

ShapeClass ClassifyToken(std::string_view text) {
  bool digit = false, alpha = false, other = false;
  for (unsigned char c : text) {
    if (c >= '0' && c <= '9') {
      digit = true;
    } else if (IsWordByte(c)) {
      alpha = true;
    } else {
      other = true;
    }
  }
  if (other || text.empty()) return ShapeClass::kPunct;
  if (digit && alpha) return ShapeClass::kMixed;
  return digit ? ShapeClass::kNumber : ShapeClass::kWord;
}

Features Featurize(const SerializedInput& input, const Vocabulary& vocab,
                   const ModelConfig& config) {
  if (input.size() > config.max_positions) {
    throw ValidationError("input of " + std::to_string(input.size()) +
                          " tokens exceeds max_positions " +
                          std::to_string(config.max_positions));
  }
  if (input.column_count > config.max_columns) {
    throw ValidationError("table of " + std::to_string(input.column_count) +
                          " columns exceeds max_columns " + std::to_string(config.max_columns));
  }
  if (input.question_length == 0) throw ValidationError("question has no tokens");
  Features f;
  const std::size_t n = input.size();
  f.token_ids.reserve(n);
  f.shapes.reserve(n);
  f.segments.reserve(n);
  f.column_ordinals.reserve(n);
  f.header_rows.assign(input.column_count, {});
  f.question_begin = static_cast<int>(input.question_begin);
  f.question_length = static_cast<int>(input.question_length);
  for (std::size_t i = 0; i < n; ++i) {
    const InputToken& t = input.tokens[i];
    int id = Vocabulary::kUnk;
    ShapeClass shape = ClassifyToken(t.text);
    if (t.segment == Segment::kSeparator) {
      shape = ShapeClass::kSpecial;
      if (t.text == kClsToken) {
        id = Vocabulary::kCls;
      } else if (t.text == kSepToken) {
        id = Vocabulary::kSep;
      } else if (t.text == kHeaderSamplesToken) {
        id = Vocabulary::kHeaderSamples;
      } else {
        id = Vocabulary::kSampleSep;
      }
    } else {
      id = vocab.Id(t.text);
    }
    f.token_ids.push_back(id);
    f.shapes.push_back(static_cast<int>(shape));
    f.segments.push_back(static_cast<int>(t.segment));
    f.column_ordinals.push_back(t.column < 0 ? 0 : t.column + 1);
    if (t.segment == Segment::kHeader) {
      f.header_rows[static_cast<std::size_t>(t.column)].push_back(static_cast<int>(i));
    }
  }

  std::unordered_set<std::string> in_question, in_headers, in_samples;
  std::vector<std::string> lower(n);
  for (std::size_t i = 0; i < n; ++i) {
    const InputToken& t = input.tokens[i];
    if (t.segment == Segment::kSeparator || f.shapes[i] == static_cast<int>(ShapeClass::kPunct)) {
      continue;
    }
    lower[i] = ToLowerAscii(t.text);
    (t.segment == Segment::kQuestion ? in_question
     : t.segment == Segment::kHeader ? in_headers
                                     : in_samples).insert(lower[i]);
  }
  f.matches.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (lower[i].empty()) continue;
    switch (input.tokens[i].segment) {
      case Segment::kQuestion:
        f.matches[i] = (in_headers.contains(lower[i]) ? 1 : 0) |
                       (in_samples.contains(lower[i]) ? 2 : 0);
        break;
      case Segment::kHeader:
        f.matches[i] = in_question.contains(lower[i]) ? 1 : 0;
        break;
      case Segment::kSample:
        f.matches[i] = in_question.contains(lower[i]) ? 2 : 0;
        break;
      case Segment::kSeparator:
        break;
    }
  }

  for (std::size_t c = 0; c < f.header_rows.size(); ++c) {
    if (f.header_rows[c].empty()) {
      throw ValidationError("column " + std::to_string(c) + " has no header tokens");
    }
  }
  return f;
}

}  // namespace sketchsql
