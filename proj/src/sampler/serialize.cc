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

#include "sketchsql/serialize.h"

#include <sstream>

#include "sketchsql/text.h"

namespace sketchsql {

std::string_view SegmentName(Segment s) {
  switch (s) {
    case Segment::kQuestion:
      return "question";
    case Segment::kHeader:
      return "header";
    case Segment::kSample:
      return "sample";
    case Segment::kSeparator:
      return "separator";
  }
  return "?";
}

namespace {

// Tokens of one header or cell, carrying the whitespace needed to rebuild it.
std::vector<InputToken> Piece(std::string_view text, Segment segment, int column,
                              int sample) {
  std::vector<InputToken> out;
  std::size_t prev = 0;
  for (auto& t : Tokenize(text)) {
    InputToken tok;
    tok.text = std::move(t.text);
    tok.segment = segment;
    tok.column = column;
    tok.sample = sample;
    tok.gap = std::string(text.substr(prev, t.begin - prev));
    prev = t.end;
    out.push_back(std::move(tok));
  }
  if (!out.empty()) out.back().tail = std::string(text.substr(prev));
  return out;
}

InputToken Delim(std::string_view text, int column) {
  InputToken tok;
  tok.text = std::string(text);
  tok.segment = Segment::kSeparator;
  tok.column = column;
  return tok;
}

}  // namespace

std::string SerializedInput::QuestionText(std::string_view question, std::size_t first,
                                          std::size_t last) const {
  const std::size_t b = question_spans.at(first).first;
  const std::size_t e = question_spans.at(last).second;
  return std::string(question.substr(b, e - b));
}

SerializedInput SerializeInput(std::string_view question, const TableSchema& schema,
                               const SampleSet& samples, std::size_t budget) {
  const std::size_t n_cols = schema.column_count();
  if (!samples.columns.empty() && samples.columns.size() != n_cols) {
    throw ValidationError("sample set has " + std::to_string(samples.columns.size()) +
                          " columns, schema has " + std::to_string(n_cols));
  }
  const auto q_tokens = Tokenize(question);

  std::vector<std::vector<InputToken>> headers(n_cols);
  std::vector<std::vector<std::vector<InputToken>>> cells(n_cols);
  std::size_t fixed = 2 + q_tokens.size();  // [CLS] ... [SEP]
  for (std::size_t c = 0; c < n_cols; ++c) {
    headers[c] = Piece(schema.headers[c], Segment::kHeader, static_cast<int>(c), -1);
    fixed += headers[c].size() + 1;
    if (!samples.columns.empty()) {
      for (std::size_t s = 0; s < samples.columns[c].size(); ++s) {
        auto piece = Piece(samples.columns[c][s], Segment::kSample, static_cast<int>(c),
                           static_cast<int>(s));
        if (!piece.empty()) cells[c].push_back(std::move(piece));
      }
    }
  }
  if (fixed > budget) {
    throw ValidationError("question and headers need " + std::to_string(fixed) +
                          " tokens, budget is " + std::to_string(budget));
  }

  // Extra tokens a column's samples add: "||", the cells, and "|" between them.
  auto sample_cost = [&](std::size_t c) {
    if (cells[c].empty()) return std::size_t{0};
    std::size_t n = cells[c].size();  // one "||" plus n - 1 "|"
    for (const auto& p : cells[c]) n += p.size();
    return n;
  };
  std::size_t total = fixed;
  for (std::size_t c = 0; c < n_cols; ++c) total += sample_cost(c);

  SerializedInput out;
  while (total > budget) {
    std::size_t widest = n_cols;
    std::size_t widest_len = 0;
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (cells[c].empty()) continue;
      const std::size_t len = headers[c].size() + sample_cost(c);
      if (widest == n_cols || len > widest_len) {
        widest = c;
        widest_len = len;
      }
    }
    const std::size_t before = sample_cost(widest);
    cells[widest].pop_back();
    total -= before - sample_cost(widest);
    ++out.dropped_samples;
  }

  out.column_count = n_cols;
  out.tokens.reserve(total);
  out.tokens.push_back(Delim(kClsToken, -1));
  out.question_begin = 1;
  out.question_length = q_tokens.size();
  for (const auto& t : q_tokens) {
    InputToken tok;
    tok.text = t.text;
    tok.segment = Segment::kQuestion;
    out.tokens.push_back(std::move(tok));
    out.question_spans.emplace_back(t.begin, t.end);
  }
  out.tokens.push_back(Delim(kSepToken, -1));
  for (std::size_t c = 0; c < n_cols; ++c) {
    const int col = static_cast<int>(c);
    for (auto& t : headers[c]) out.tokens.push_back(std::move(t));
    for (std::size_t s = 0; s < cells[c].size(); ++s) {
      out.tokens.push_back(Delim(s == 0 ? kHeaderSamplesToken : kSampleSepToken, col));
      for (auto& t : cells[c][s]) out.tokens.push_back(std::move(t));
    }
    out.tokens.push_back(Delim(kSepToken, -1));
  }
  return out;
}

std::vector<ColumnBlock> RecoverBlocks(const SerializedInput& input) {
  std::vector<ColumnBlock> blocks(input.column_count);
  for (const auto& t : input.tokens) {
    if (t.column < 0) continue;
    auto& block = blocks.at(static_cast<std::size_t>(t.column));
    if (t.segment == Segment::kHeader) {
      block.header += t.gap + t.text + t.tail;
    } else if (t.segment == Segment::kSample) {
      const auto s = static_cast<std::size_t>(t.sample);
      if (block.samples.size() <= s) block.samples.resize(s + 1);
      block.samples[s] += t.gap + t.text + t.tail;
    }
  }
  return blocks;
}

std::string RenderInput(const SerializedInput& input) {
  std::string out;
  for (const auto& t : input.tokens) {
    if (!out.empty()) out += ' ';
    out += t.text;
  }
  return out;
}

std::string RenderInputDebug(const SerializedInput& input) {
  std::ostringstream os;
  for (std::size_t i = 0; i < input.tokens.size(); ++i) {
    const auto& t = input.tokens[i];
    os << i << '\t' << SegmentName(t.segment) << '\t' << t.column << '\t' << t.sample
       << '\t' << t.text << '\n';
  }
  return os.str();
}

}  // namespace sketchsql
