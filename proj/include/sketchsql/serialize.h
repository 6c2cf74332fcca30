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

// Encoder input layout:
//
//   [CLS] q1 .. qn [SEP] H1 || s11 | s12 [SEP] H2 [SEP] ...
//
// A column without samples has no "||" block.

#ifndef SKETCHSQL_SERIALIZE_H_
#define SKETCHSQL_SERIALIZE_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sketchsql/core.h"
#include "sketchsql/sampling.h"

namespace sketchsql {

inline constexpr std::size_t kDefaultBudget = 512;

inline constexpr std::string_view kClsToken = "[CLS]";
inline constexpr std::string_view kSepToken = "[SEP]";
inline constexpr std::string_view kHeaderSamplesToken = "||";
inline constexpr std::string_view kSampleSepToken = "|";

enum class Segment { kQuestion = 0, kHeader = 1, kSample = 2, kSeparator = 3 };
inline constexpr int kNumSegments = 4;

struct InputToken {
  std::string text;   // surface form
  Segment segment;
  int column = -1;    // header/sample tokens and in-block delimiters
  int sample = -1;    // sample tokens only
  std::string gap;    // source bytes between the previous token of the same
                      // header or cell and this one
  std::string tail;   // trailing source bytes, on the last token of a
                      // header or cell
};

struct SerializedInput {
  std::vector<InputToken> tokens;
  std::size_t question_begin = 1;  // token position of q1
  std::size_t question_length = 0;
  // Byte span in the original question for each question token.
  std::vector<std::pair<std::size_t, std::size_t>> question_spans;
  std::size_t column_count = 0;
  std::size_t dropped_samples = 0;

  std::size_t size() const { return tokens.size(); }
  /// Original question text covering question tokens [first, last].
  std::string QuestionText(std::string_view question, std::size_t first,
                           std::size_t last) const;
};

/// Lays out question, headers and samples. While the result exceeds `budget`,
/// removes the last sample of the column with the longest block (ties go to the
/// lower column). Throws ValidationError when question and headers alone do not
/// fit.
SerializedInput SerializeInput(std::string_view question, const TableSchema& schema,
                               const SampleSet& samples,
                               std::size_t budget = kDefaultBudget);

struct ColumnBlock {
  std::string header;
  std::vector<std::string> samples;
  bool operator==(const ColumnBlock&) const = default;
};

/// Rebuilds headers and samples from segment and column labels.
std::vector<ColumnBlock> RecoverBlocks(const SerializedInput& input);

/// Tokens joined by spaces.
std::string RenderInput(const SerializedInput& input);
/// One line per token: position, segment, column, sample, text.
std::string RenderInputDebug(const SerializedInput& input);

std::string_view SegmentName(Segment s);

}  // namespace sketchsql

#endif  // SKETCHSQL_SERIALIZE_H_
