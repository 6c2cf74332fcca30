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

#ifndef SKETCHSQL_CONTENT_INDEX_H_
#define SKETCHSQL_CONTENT_INDEX_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sketchsql/core.h"

namespace sketchsql {

/// A cell found in a question.
struct CellMatch {
  std::size_t column;
  std::string cell;        // verbatim cell value
  std::size_t begin;       // byte span in the original question
  std::size_t end;

  bool operator==(const CellMatch&) const = default;
};

struct IndexBuildStats {
  double seconds = 0.0;
  // Heap high-water mark above the pre-build baseline, sampled between build
  // phases (glibc mallinfo2).
  std::size_t peak_heap_bytes = 0;
  // Bytes held by the finished index's own containers.
  std::size_t retained_bytes = 0;
};

/// Keyword automaton over the distinct cells of one table.
///
/// Patterns are cells under NormalizeValue (lowercase, collapsed whitespace).
/// The trie is an Aho-Corasick automaton: failure links plus dictionary
/// output links, so a scan over a question is linear in its length plus the
/// number of raw hits. Matching is word-anchored and resolves overlaps
/// leftmost-longest, the way FlashText does.
///
/// Immutable after Build(); concurrent Extract() calls are safe.
class ContentIndex {
 public:
  struct Entry {
    std::uint32_t column;
    std::uint32_t value;  // index into distinct_values(column)
  };

  ContentIndex() = default;

  static ContentIndex Build(const Table& table);

  std::size_t pattern_count() const { return pattern_entry_offsets_.empty() ? 0 : pattern_entry_offsets_.size() - 1; }
  std::size_t cell_count() const { return cell_count_; }
  std::size_t column_count() const { return distinct_.size(); }
  std::size_t node_count() const { return nodes_.size(); }
  const IndexBuildStats& build_stats() const { return stats_; }

  /// Distinct non-empty cells of `column`, in first-occurrence order.
  const std::vector<std::string>& distinct_values(std::size_t column) const {
    return distinct_[column];
  }

  /// (column, cell) entries stored for a normalized pattern; empty if absent.
  std::vector<std::pair<std::size_t, std::string>> Lookup(std::string_view pattern) const;

  /// Matches ordered by question position, then column.
  std::vector<CellMatch> ExtractMatches(std::string_view question) const;

 private:
  static constexpr std::int32_t kNone = -1;

  // Nodes are numbered breadth-first and siblings are contiguous, sorted by
  // label.
  struct Node {
    std::int32_t first_child = kNone;
    std::int32_t fail = 0;
    std::int32_t output = kNone;   // nearest terminal node on the fail chain
    std::int32_t pattern = kNone;  // pattern id when terminal
    std::uint32_t depth = 0;
    std::uint16_t child_count = 0;
    unsigned char label = 0;
  };

  std::int32_t Child(std::int32_t node, unsigned char c) const;
  std::int32_t Step(std::int32_t node, unsigned char c) const;
  void LinkFailures();
  std::size_t RetainedBytes() const;

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> pattern_entry_offsets_;  // CSR over entries_
  std::vector<Entry> entries_;
  std::vector<std::vector<std::string>> distinct_;
  std::size_t cell_count_ = 0;
  IndexBuildStats stats_;
};

/// Bytes currently allocated on the heap, or 0 where unsupported.
std::size_t HeapInUse();

}  // namespace sketchsql

#endif  // SKETCHSQL_CONTENT_INDEX_H_
