// Copyright 2026 The xsp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// BIO-tagged token sequences and their conversion to flat intent/slot trees.
//
// Chunking is lenient: a stray I-X with no preceding B-X (or following a
// chunk with a different label) starts a new chunk rather than being an
// error, matching the behavior of the common sequence-labeling evaluation
// toolkits so that Slot F1 is well defined on noisy predictions.

#pragma once

#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

#include "xsp/parse_tree.hpp"

namespace xsp {

struct BioSequence {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;  // each `O`, `B-<label>` or `I-<label>`
  std::string intent;

  friend bool operator==(const BioSequence& a, const BioSequence& b) {
    return a.tokens == b.tokens && a.tags == b.tags && a.intent == b.intent;
  }
};

struct Chunk {
  std::string label;
  std::size_t begin;  // token index, inclusive
  std::size_t end;    // token index, exclusive

  friend bool operator==(const Chunk& a, const Chunk& b) {
    return a.label == b.label && a.begin == b.begin && a.end == b.end;
  }
  friend bool operator<(const Chunk& a, const Chunk& b) {
    if (a.begin != b.begin) return a.begin < b.begin;
    if (a.end != b.end) return a.end < b.end;
    return a.label < b.label;
  }
};

inline bool valid_bio_tag(const std::string& tag) {
  if (tag == "O") return true;
  if (tag.size() < 3) return false;
  if (tag[0] != 'B' && tag[0] != 'I') return false;
  return tag[1] == '-';
}

inline std::string ascii_upper(std::string s) {
  for (char& c : s)
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

// Maximal chunks of a tag sequence under the lenient rule.
inline std::vector<Chunk> extract_chunks(const std::vector<std::string>& tags) {
  std::vector<Chunk> chunks;
  std::string open_label;
  std::size_t open_begin = 0;
  bool open = false;
  auto close = [&](std::size_t end) {
    if (open) chunks.push_back({open_label, open_begin, end});
    open = false;
  };
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const std::string& tag = tags[i];
    if (tag == "O" || tag.empty()) {
      close(i);
      continue;
    }
    char kind = tag[0];
    std::string label = tag.size() > 2 ? tag.substr(2) : std::string();
    if (kind == 'B' || !open || label != open_label) {
      close(i);
      open = true;
      open_label = label;
      open_begin = i;
    }
    // I- with matching open label extends the chunk.
  }
  close(tags.size());
  return chunks;
}

// Flat tree: root intent, one slot per maximal chunk in token order, `O`
// tokens dropped. Labels are upper-cased on ingestion.
inline ParseTree bio_to_tree(const BioSequence& seq) {
  ParseTree tree;
  tree.root.label = ascii_upper(seq.intent);
  for (const Chunk& chunk : extract_chunks(seq.tags)) {
    SlotNode slot;
    slot.label = ascii_upper(chunk.label);
    slot.tokens.assign(seq.tokens.begin() + chunk.begin,
                       seq.tokens.begin() + chunk.end);
    tree.root.slots.push_back(std::move(slot));
  }
  return tree;
}

}  // namespace xsp
