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

#include "sketchsql/content_index.h"

#include <malloc.h>

#include <algorithm>
#include <chrono>

#include "sketchsql/text.h"

namespace sketchsql {

std::size_t HeapInUse() {
#if defined(__GLIBC__) && (__GLIBC__ > 2 || (__GLIBC__ == 2 && __GLIBC_MINOR__ >= 33))
  const struct mallinfo2 info = mallinfo2();
  return info.uordblks + info.hblkhd;
#else
  return 0;
#endif
}

namespace {

// Distinct non-empty cells of one column in first-occurrence order. Open
// addressing over value ordinals (0 marks an empty slot); the table grows with
// the distinct count, so low-cardinality columns stay cache resident.
std::vector<std::string> DistinctCells(const Table& table, std::size_t column) {
  std::vector<std::string> values;
  std::vector<std::uint32_t> slots(16, 0);
  std::vector<std::size_t> hashes;
  const std::hash<std::string_view> hasher;
  auto place = [&](std::size_t h, std::uint32_t ordinal) {
    std::size_t mask = slots.size() - 1;
    for (std::size_t i = h & mask;; i = (i + 1) & mask) {
      if (slots[i] == 0) {
        slots[i] = ordinal;
        return;
      }
    }
  };
  for (const auto& row : table.rows) {
    const std::string& cell = row[column];
    if (Trim(cell).empty()) continue;
    const std::size_t h = hasher(cell);
    const std::size_t mask = slots.size() - 1;
    std::size_t i = h & mask;
    bool found = false;
    for (; slots[i] != 0; i = (i + 1) & mask) {
      const std::uint32_t v = slots[i] - 1;
      if (hashes[v] == h && values[v] == cell) {
        found = true;
        break;
      }
    }
    if (found) continue;
    values.push_back(cell);
    hashes.push_back(h);
    slots[i] = static_cast<std::uint32_t>(values.size());
    if (2 * values.size() > slots.size()) {
      slots.assign(slots.size() * 2, 0);
      for (std::size_t v = 0; v < values.size(); ++v) {
        place(hashes[v], static_cast<std::uint32_t>(v + 1));
      }
    }
  }
  return values;
}

struct Candidate {
  std::size_t begin;
  std::size_t end;
  std::int32_t pattern;
};

class PeakTracker {
 public:
  PeakTracker() : baseline_(HeapInUse()) {}
  void Sample() { peak_ = std::max(peak_, HeapInUse()); }
  std::size_t peak_above_baseline() const {
    return peak_ > baseline_ ? peak_ - baseline_ : 0;
  }

 private:
  std::size_t baseline_;
  std::size_t peak_ = 0;
};

}  // namespace

std::int32_t ContentIndex::Child(std::int32_t node, unsigned char c) const {
  const Node& n = nodes_[node];
  if (n.child_count == 0) return kNone;
  const auto first = nodes_.begin() + n.first_child;
  const auto last = first + n.child_count;
  const auto it = std::lower_bound(first, last, c, [](const Node& x, unsigned char label) {
    return x.label < label;
  });
  if (it == last || it->label != c) return kNone;
  return static_cast<std::int32_t>(it - nodes_.begin());
}

std::int32_t ContentIndex::Step(std::int32_t node, unsigned char c) const {
  while (true) {
    const std::int32_t next = Child(node, c);
    if (next != kNone) return next;
    if (node == 0) return 0;
    node = nodes_[node].fail;
  }
}

void ContentIndex::LinkFailures() {
  // Breadth-first numbering means every shallower node already has its link.
  for (std::size_t u = 0; u < nodes_.size(); ++u) {
    const Node parent = nodes_[u];
    for (std::int32_t v = parent.first_child; v != kNone && v < parent.first_child + parent.child_count;
         ++v) {
      std::int32_t target = 0;
      if (u != 0) {
        const unsigned char c = nodes_[v].label;
        std::int32_t f = parent.fail;
        target = Child(f, c);
        while (target == kNone && f != 0) {
          f = nodes_[f].fail;
          target = Child(f, c);
        }
        if (target == kNone) target = 0;
      }
      nodes_[v].fail = target;
      const Node& fn = nodes_[target];
      nodes_[v].output = fn.pattern != kNone ? target : fn.output;
    }
  }
}

ContentIndex ContentIndex::Build(const Table& table) {
  const auto start = std::chrono::steady_clock::now();
  PeakTracker peak;

  ContentIndex index;
  const std::size_t n_cols = table.column_count();
  index.cell_count_ = table.cell_count();
  index.distinct_.resize(n_cols);

  struct Keyed {
    std::string text;  // normalized
    std::uint32_t column;
    std::uint32_t value;
  };
  std::size_t n_distinct = 0;
  for (std::size_t c = 0; c < n_cols; ++c) {
    index.distinct_[c] = DistinctCells(table, c);
    n_distinct += index.distinct_[c].size();
    peak.Sample();
  }
  std::vector<Keyed> keyed;
  keyed.reserve(n_distinct);
  for (std::size_t c = 0; c < n_cols; ++c) {
    const auto& values = index.distinct_[c];
    for (std::size_t v = 0; v < values.size(); ++v) {
      keyed.push_back({NormalizeValue(values[v]), static_cast<std::uint32_t>(c),
                       static_cast<std::uint32_t>(v)});
    }
  }
  peak.Sample();

  // Level-order construction. Node i owns keyed[lo[i], hi[i]), whose texts
  // share the node's prefix; the range is stably partitioned by the next byte
  // (texts ending here first), which is an MSD radix sort spread over the
  // levels. Total work is linear in the pattern bytes.
  std::vector<Keyed> scratch(keyed.size());
  auto key_at = [](const Keyed& k, std::uint32_t depth) {
    return k.text.size() == depth ? 0 : 1 + static_cast<int>(static_cast<unsigned char>(k.text[depth]));
  };
  auto& offsets = index.pattern_entry_offsets_;
  index.entries_.reserve(keyed.size());
  std::vector<std::uint32_t> lo = {0};
  std::vector<std::uint32_t> hi = {static_cast<std::uint32_t>(keyed.size())};
  index.nodes_.emplace_back();
  std::size_t counts[257];
  for (std::size_t i = 0; i < index.nodes_.size(); ++i) {
    const std::uint32_t depth = index.nodes_[i].depth;
    std::uint32_t a = lo[i];
    const std::uint32_t b = hi[i];
    if (b - a > 1) {
      if (b - a <= 32) {
        for (std::uint32_t j = a + 1; j < b; ++j) {
          const int key = key_at(keyed[j], depth);
          std::uint32_t m = j;
          while (m > a && key_at(keyed[m - 1], depth) > key) --m;
          if (m != j) std::rotate(keyed.begin() + m, keyed.begin() + j, keyed.begin() + j + 1);
        }
      } else {
        std::fill(std::begin(counts), std::end(counts), 0);
        for (std::uint32_t j = a; j < b; ++j) ++counts[key_at(keyed[j], depth)];
        if (*std::max_element(std::begin(counts), std::end(counts)) != b - a) {
          std::size_t pos = a;
          for (auto& c : counts) {
            const std::size_t n = c;
            c = pos;
            pos += n;
          }
          for (std::uint32_t j = a; j < b; ++j) {
            scratch[counts[key_at(keyed[j], depth)]++] = std::move(keyed[j]);
          }
          std::move(scratch.begin() + a, scratch.begin() + b, keyed.begin() + a);
        }
      }
    }
    if (a < b && keyed[a].text.size() == depth) {
      index.nodes_[i].pattern = static_cast<std::int32_t>(offsets.size());
      offsets.push_back(static_cast<std::uint32_t>(index.entries_.size()));
      for (; a < b && keyed[a].text.size() == depth; ++a) {
        index.entries_.push_back({keyed[a].column, keyed[a].value});
      }
    }
    if (a == b) continue;
    index.nodes_[i].first_child = static_cast<std::int32_t>(index.nodes_.size());
    std::uint16_t count = 0;
    while (a < b) {
      const auto label = static_cast<unsigned char>(keyed[a].text[depth]);
      std::uint32_t e = a + 1;
      while (e < b && static_cast<unsigned char>(keyed[e].text[depth]) == label) ++e;
      Node child;
      child.label = label;
      child.depth = depth + 1;
      index.nodes_.push_back(child);
      lo.push_back(a);
      hi.push_back(e);
      ++count;
      a = e;
    }
    index.nodes_[i].child_count = count;
  }
  offsets.push_back(static_cast<std::uint32_t>(index.entries_.size()));
  peak.Sample();
  keyed = {};
  scratch = {};
  lo = {};
  hi = {};

  index.LinkFailures();
  index.nodes_.shrink_to_fit();
  index.entries_.shrink_to_fit();
  offsets.shrink_to_fit();

  index.stats_.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  index.stats_.peak_heap_bytes = peak.peak_above_baseline();
  index.stats_.retained_bytes = index.RetainedBytes();
  return index;
}

std::size_t ContentIndex::RetainedBytes() const {
  std::size_t bytes = nodes_.capacity() * sizeof(Node) +
                      pattern_entry_offsets_.capacity() * sizeof(std::uint32_t) +
                      entries_.capacity() * sizeof(Entry);
  for (const auto& col : distinct_) {
    bytes += col.capacity() * sizeof(std::string);
    for (const auto& s : col) {
      if (s.capacity() > 15) bytes += s.capacity() + 1;  // beyond SSO buffer
    }
  }
  return bytes;
}

std::vector<std::pair<std::size_t, std::string>> ContentIndex::Lookup(
    std::string_view pattern) const {
  std::vector<std::pair<std::size_t, std::string>> out;
  if (nodes_.empty()) return out;
  std::int32_t node = 0;
  for (unsigned char c : pattern) {
    node = Child(node, c);
    if (node == kNone) return out;
  }
  const std::int32_t pid = nodes_[node].pattern;
  if (pid == kNone) return out;
  for (auto i = pattern_entry_offsets_[pid]; i < pattern_entry_offsets_[pid + 1]; ++i) {
    const Entry& e = entries_[i];
    out.emplace_back(e.column, distinct_[e.column][e.value]);
  }
  return out;
}

std::vector<CellMatch> ContentIndex::ExtractMatches(std::string_view question) const {
  std::vector<CellMatch> out;
  if (pattern_count() == 0) return out;
  const NormalizedText norm = NormalizeWithOffsets(question);
  const std::string& text = norm.text;

  std::vector<Candidate> candidates;
  std::int32_t state = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    state = Step(state, static_cast<unsigned char>(text[i]));
    std::int32_t t = nodes_[state].pattern != kNone ? state : nodes_[state].output;
    for (; t != kNone; t = nodes_[t].output) {
      const std::size_t end = i + 1;
      const std::size_t begin = end - nodes_[t].depth;
      if (IsWordBoundary(text, begin) && IsWordBoundary(text, end)) {
        candidates.push_back({begin, end, nodes_[t].pattern});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return a.begin != b.begin ? a.begin < b.begin : a.end > b.end;
  });

  std::size_t cursor = 0;
  for (const auto& cand : candidates) {
    if (cand.begin < cursor) continue;
    cursor = cand.end;
    const std::size_t src_begin = norm.source_offset[cand.begin];
    const std::size_t src_end = norm.source_offset[cand.end - 1] + 1;
    for (auto i = pattern_entry_offsets_[cand.pattern];
         i < pattern_entry_offsets_[cand.pattern + 1]; ++i) {
      const Entry& e = entries_[i];
      out.push_back({e.column, distinct_[e.column][e.value], src_begin, src_end});
    }
  }
  return out;
}

}  // namespace sketchsql
