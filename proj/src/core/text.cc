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

#include "sketchsql/text.h"

namespace sketchsql {

namespace {

char LowerByte(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

}  // namespace

std::string ToLowerAscii(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = LowerByte(c);
  return out;
}

std::string Trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && IsSpaceByte(s[b])) ++b;
  while (e > b && IsSpaceByte(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

NormalizedText NormalizeWithOffsets(std::string_view s) {
  NormalizedText out;
  out.text.reserve(s.size());
  out.source_offset.reserve(s.size() + 1);
  bool pending_space = false;
  std::size_t space_at = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (IsSpaceByte(c)) {
      if (!pending_space) space_at = i;
      pending_space = true;
      continue;
    }
    if (pending_space && !out.text.empty()) {
      out.text.push_back(' ');
      out.source_offset.push_back(space_at);
    }
    pending_space = false;
    out.text.push_back(LowerByte(static_cast<char>(c)));
    out.source_offset.push_back(i);
  }
  // One past the last kept byte.
  if (out.source_offset.empty()) {
    out.source_offset.push_back(s.size());
  } else {
    out.source_offset.push_back(out.source_offset.back() + 1);
  }
  return out;
}

std::string NormalizeValue(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char ch : s) {
    if (IsSpaceByte(static_cast<unsigned char>(ch))) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(LowerByte(ch));
  }
  return out;
}

bool IsWordBoundary(std::string_view text, std::size_t pos) {
  if (pos == 0 || pos >= text.size()) return true;
  return !(IsWordByte(static_cast<unsigned char>(text[pos - 1])) &&
           IsWordByte(static_cast<unsigned char>(text[pos])));
}

std::vector<Token> Tokenize(std::string_view s) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (IsSpaceByte(c)) {
      ++i;
    } else if (IsWordByte(c)) {
      std::size_t j = i + 1;
      while (j < s.size() && IsWordByte(static_cast<unsigned char>(s[j]))) ++j;
      tokens.push_back({std::string(s.substr(i, j - i)), i, j});
      i = j;
    } else {
      tokens.push_back({std::string(1, s[i]), i, i + 1});
      ++i;
    }
  }
  return tokens;
}

std::vector<std::string> TokenizeLower(std::string_view s) {
  std::vector<std::string> out;
  for (auto& t : Tokenize(s)) out.push_back(ToLowerAscii(t.text));
  return out;
}

}  // namespace sketchsql
