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

// The decoupled intent/slot representation: a bracketed tree whose root is an
// intent node, whose children are slots, and where each slot holds either a
// token span, one nested intent, or nothing (signature form).
//
//   [IN:CREATE_ALARM [SL:DATE_TIME 8 am ] ]
//
// Parsing, canonical serialization, signature extraction and comparison all
// live here. Trees are plain values; every operation is pure.

#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "xsp/unicode.hpp"

namespace xsp {

class MalformedParse : public std::runtime_error {
 public:
  MalformedParse(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

struct IntentNode;

// Slot payload is exactly one of: a token span, a nested intent, or empty.
// `nested` holds zero or one elements; a vector is used so the mutually
// recursive value types stay copyable.
struct SlotNode {
  std::string label;
  std::vector<std::string> tokens;
  std::vector<IntentNode> nested;

  bool has_nested() const { return !nested.empty(); }
  bool is_leaf() const { return nested.empty(); }

  friend bool operator==(const SlotNode&, const SlotNode&);
};

struct IntentNode {
  std::string label;
  std::vector<SlotNode> slots;

  friend bool operator==(const IntentNode& a, const IntentNode& b) {
    return a.label == b.label && a.slots == b.slots;
  }
};

inline bool operator==(const SlotNode& a, const SlotNode& b) {
  return a.label == b.label && a.tokens == b.tokens && a.nested == b.nested;
}

struct ParseTree {
  IntentNode root;

  friend bool operator==(const ParseTree& a, const ParseTree& b) {
    return a.root == b.root;
  }
};

// A parse with all slot values removed; nested intents are kept and
// recursively emptied.
struct Signature {
  ParseTree tree;

  friend bool operator==(const Signature& a, const Signature& b) {
    return a.tree == b.tree;
  }
};

namespace detail {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

inline bool is_label_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '.';
}

class TreeParser {
 public:
  explicit TreeParser(std::string_view text) : text_(text) {}

  ParseTree run() {
    skip_space();
    if (eof()) throw MalformedParse("empty input", pos_);
    if (peek() != '[') throw MalformedParse("expected '['", pos_);
    ParseTree tree{parse_intent()};
    skip_space();
    if (!eof())
      throw MalformedParse("trailing content after root node", pos_);
    return tree;
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void skip_space() {
    while (!eof() && is_space(peek())) ++pos_;
  }

  // Reads a run of non-space, non-bracket characters.
  std::string read_word() {
    std::size_t start = pos_;
    while (!eof() && !is_space(peek()) && peek() != '[' && peek() != ']')
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string read_label(std::string_view prefix, std::size_t open_pos) {
    std::size_t start = pos_;
    std::string word = read_word();
    if (word.size() < prefix.size() ||
        std::string_view(word).substr(0, prefix.size()) != prefix) {
      throw MalformedParse(
          "expected " + std::string(prefix) + " label", start);
    }
    std::string label = word.substr(prefix.size());
    if (label.empty()) throw MalformedParse("empty label", start);
    for (std::size_t k = 0; k < label.size(); ++k) {
      if (!is_label_char(label[k]))
        throw MalformedParse("invalid label character",
                             start + prefix.size() + k);
    }
    (void)open_pos;
    return label;
  }

  IntentNode parse_intent() {
    std::size_t open_pos = pos_;
    ++pos_;  // '['
    IntentNode node;
    node.label = read_label("IN:", open_pos);
    while (true) {
      skip_space();
      if (eof()) throw MalformedParse("unbalanced brackets", open_pos);
      char c = peek();
      if (c == ']') {
        ++pos_;
        return node;
      }
      if (c == '[') {
        node.slots.push_back(parse_slot());
        continue;
      }
      throw MalformedParse("intent node may contain only slot children",
                           pos_);
    }
  }

  SlotNode parse_slot() {
    std::size_t open_pos = pos_;
    ++pos_;  // '['
    SlotNode node;
    node.label = read_label("SL:", open_pos);
    while (true) {
      skip_space();
      if (eof()) throw MalformedParse("unbalanced brackets", open_pos);
      char c = peek();
      if (c == ']') {
        ++pos_;
        return node;
      }
      if (c == '[') {
        if (!node.tokens.empty())
          throw MalformedParse(
              "slot contains both tokens and a nested intent", pos_);
        if (node.has_nested())
          throw MalformedParse("slot contains two nested intents", pos_);
        node.nested.push_back(parse_intent());
        continue;
      }
      if (node.has_nested())
        throw MalformedParse("slot contains both tokens and a nested intent",
                             pos_);
      node.tokens.push_back(read_word());
      continue;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline void serialize_intent(const IntentNode& node, std::string& out);

inline void serialize_slot(const SlotNode& node, std::string& out) {
  out += "[SL:";
  out += node.label;
  for (const std::string& tok : node.tokens) {
    out += ' ';
    out += tok;
  }
  if (node.has_nested()) {
    out += ' ';
    serialize_intent(node.nested.front(), out);
  }
  out += " ]";
}

inline void serialize_intent(const IntentNode& node, std::string& out) {
  out += "[IN:";
  out += node.label;
  for (const SlotNode& slot : node.slots) {
    out += ' ';
    serialize_slot(slot, out);
  }
  out += " ]";
}

}  // namespace detail

// Parses the bracketed surface form. Whitespace between elements is
// normalized away; token content is preserved verbatim. Throws
// MalformedParse (with a byte offset) on any grammar violation.
inline ParseTree parse(std::string_view text) {
  return detail::TreeParser(text).run();
}

// Canonical surface form: `[LABEL child1 child2 ... ]` with single spaces;
// empty slots render as `[SL:LABEL ]`. parse(serialize(t)) == t.
inline std::string serialize(const IntentNode& node) {
  std::string out;
  detail::serialize_intent(node, out);
  return out;
}

inline std::string serialize(const ParseTree& tree) {
  return serialize(tree.root);
}

inline std::string serialize(const Signature& sig) {
  return serialize(sig.tree);
}

namespace detail {

inline IntentNode strip_values(const IntentNode& node) {
  IntentNode out;
  out.label = node.label;
  out.slots.reserve(node.slots.size());
  for (const SlotNode& slot : node.slots) {
    SlotNode s;
    s.label = slot.label;
    if (slot.has_nested()) s.nested.push_back(strip_values(slot.nested.front()));
    out.slots.push_back(std::move(s));
  }
  return out;
}

// Canonical key for order-insensitive signature comparison: child keys are
// sorted at every intent level, so key equality is multiset equality.
inline std::string signature_key(const IntentNode& node, bool sort_children) {
  std::vector<std::string> keys;
  keys.reserve(node.slots.size());
  for (const SlotNode& slot : node.slots) {
    std::string k = "SL:" + slot.label;
    if (slot.has_nested())
      k += "(" + signature_key(slot.nested.front(), sort_children) + ")";
    keys.push_back(std::move(k));
  }
  if (sort_children) std::sort(keys.begin(), keys.end());
  std::string out = "IN:" + node.label + "{";
  for (const std::string& k : keys) {
    out += k;
    out += ';';
  }
  out += '}';
  return out;
}

}  // namespace detail

// Removes every token span; nested intents are preserved and recursively
// emptied. Idempotent; node count and labels are unchanged.
inline Signature extract_signature(const ParseTree& tree) {
  return Signature{ParseTree{detail::strip_values(tree.root)}};
}

inline Signature extract_signature(const Signature& sig) {
  return extract_signature(sig.tree);
}

// With ignore_order, children of each intent node are compared as multisets
// of (label, recursive signature); otherwise ordered structural comparison.
inline bool signatures_equal(const Signature& a, const Signature& b,
                             bool ignore_order) {
  if (!ignore_order) return a == b;
  return detail::signature_key(a.tree.root, true) ==
         detail::signature_key(b.tree.root, true);
}

// --------------------------------------------------------------------------
// Tree utilities shared by the pipelines.

// Leaf slots (payload is a token span or empty) in document order, nested
// intents walked depth-first.
inline void collect_leaf_slots(IntentNode& node, std::vector<SlotNode*>& out) {
  for (SlotNode& slot : node.slots) {
    if (slot.has_nested())
      collect_leaf_slots(slot.nested.front(), out);
    else
      out.push_back(&slot);
  }
}

inline void collect_leaf_slots(const IntentNode& node,
                               std::vector<const SlotNode*>& out) {
  for (const SlotNode& slot : node.slots) {
    if (slot.has_nested())
      collect_leaf_slots(slot.nested.front(), out);
    else
      out.push_back(&slot);
  }
}

inline std::vector<SlotNode*> leaf_slots(ParseTree& tree) {
  std::vector<SlotNode*> out;
  collect_leaf_slots(tree.root, out);
  return out;
}

inline std::vector<const SlotNode*> leaf_slots(const ParseTree& tree) {
  std::vector<const SlotNode*> out;
  collect_leaf_slots(tree.root, out);
  return out;
}

// Applies text normalization to every slot token.
inline ParseTree normalize_tree(const ParseTree& tree,
                                NormForm form = NormForm::nfc,
                                bool lowercase = false) {
  ParseTree out = tree;
  for (SlotNode* slot : leaf_slots(out))
    for (std::string& tok : slot->tokens)
      tok = normalize_text(tok, form, lowercase);
  return out;
}

// Structural invariant check used by dataset validation; returns problem
// descriptions, empty when the tree is well formed.
inline void validate_node(const IntentNode& node, std::vector<std::string>& out);

inline void validate_label(const std::string& label,
                           std::vector<std::string>& out) {
  if (label.empty()) {
    out.push_back("empty label");
    return;
  }
  for (char c : label) {
    if (!detail::is_label_char(c)) {
      out.push_back("invalid label character in '" + label + "'");
      return;
    }
  }
}

inline void validate_slot(const SlotNode& slot, std::vector<std::string>& out) {
  validate_label(slot.label, out);
  if (!slot.tokens.empty() && slot.has_nested())
    out.push_back("slot '" + slot.label + "' has both tokens and nested intent");
  if (slot.nested.size() > 1)
    out.push_back("slot '" + slot.label + "' has multiple nested intents");
  for (const std::string& tok : slot.tokens) {
    if (tok.empty()) out.push_back("empty token in slot '" + slot.label + "'");
    for (char c : tok)
      if (c == '[' || c == ']' || detail::is_space(c)) {
        out.push_back("token with bracket or whitespace in slot '" +
                      slot.label + "'");
        break;
      }
  }
  if (slot.has_nested()) validate_node(slot.nested.front(), out);
}

inline void validate_node(const IntentNode& node,
                          std::vector<std::string>& out) {
  validate_label(node.label, out);
  for (const SlotNode& slot : node.slots) validate_slot(slot, out);
}

inline std::vector<std::string> validate(const ParseTree& tree) {
  std::vector<std::string> out;
  validate_node(tree.root, out);
  return out;
}

}  // namespace xsp
