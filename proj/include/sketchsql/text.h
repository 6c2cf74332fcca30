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

#ifndef SKETCHSQL_TEXT_H_
#define SKETCHSQL_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace sketchsql {

// Word bytes are ASCII alphanumerics plus every non-ASCII byte, so UTF-8
// sequences never split a word.
inline bool IsWordByte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

inline bool IsSpaceByte(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::string ToLowerAscii(std::string_view s);
std::string Trim(std::string_view s);

/// Lowercase, trim and collapse internal whitespace runs to one space. This is
/// the single normalization used for value equality everywhere (logical-form
/// comparison, EQ conditions, execution-result comparison).
std::string NormalizeValue(std::string_view s);

/// A normalized string together with the byte offset of every normalized
/// character in the source text.
struct NormalizedText {
  std::string text;
  std::vector<std::size_t> source_offset;  // size() == text.size() + 1
};

/// Same normalization as NormalizeValue, keeping the offset map.
NormalizedText NormalizeWithOffsets(std::string_view s);

/// True when position `pos` of `text` sits between a word byte and a non-word
/// byte (or at either end).
bool IsWordBoundary(std::string_view text, std::size_t pos);

struct Token {
  std::string text;    // surface form, original case
  std::size_t begin;   // byte offsets into the source string
  std::size_t end;
};

/// Splits into runs of word bytes and single punctuation bytes; whitespace is
/// dropped.
std::vector<Token> Tokenize(std::string_view s);

/// Lowercased token texts only.
std::vector<std::string> TokenizeLower(std::string_view s);

}  // namespace sketchsql

#endif  // SKETCHSQL_TEXT_H_
