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

// Translate-Align-Project: project slot spans from a source parse onto a
// translation through word-alignment links, apply rejection filters and
// POS-based boundary trimming, and account for every filtered example.
//
// A projected slot value is the contiguous closure [min..max] of the target
// indices aligned into the slot's source range: interior unaligned tokens
// are included, while an interior token aligned outside the slot rejects the
// example (span-split). An example whose projected tree ends up with a
// different multiset of non-empty slot labels than its source is rejected
// (slot-set-mismatch), which also covers overlapping projections and slots
// emptied by trimming.

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "xsp/alignment.hpp"
#include "xsp/corpus.hpp"
#include "xsp/parse_tree.hpp"
#include "xsp/pos.hpp"

namespace xsp {

class UnanchoredSlot : public std::runtime_error {
 public:
  explicit UnanchoredSlot(const std::string& what)
      : std::runtime_error(what) {}
};

class MissingTranslation : public std::runtime_error {
 public:
  explicit MissingTranslation(const std::string& id)
      : std::runtime_error("no translation for example id: " + id) {}
};

// Token index range [begin, end).
struct TokenRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool empty() const { return begin >= end; }
  std::size_t size() const { return empty() ? 0 : end - begin; }

  friend bool operator==(const TokenRange& a, const TokenRange& b) {
    return a.begin == b.begin && a.end == b.end;
  }
};

enum class RejectionReason {
  source_tokenization_mismatch,
  non_whitespace_target_tokenization,
  span_split,
  slot_set_mismatch,
};

inline std::string to_string(RejectionReason r) {
  switch (r) {
    case RejectionReason::source_tokenization_mismatch:
      return "source-tokenization-mismatch";
    case RejectionReason::non_whitespace_target_tokenization:
      return "non-whitespace-target-tokenization";
    case RejectionReason::span_split:
      return "span-split";
    case RejectionReason::slot_set_mismatch:
      return "slot-set-mismatch";
  }
  return "?";
}

// A tree whose leaf slots are anchored to target token index ranges;
// `ranges` is parallel to leaf_slots(tree).
struct AnchoredParse {
  ParseTree tree;
  std::vector<TokenRange> ranges;
};

struct ProjectionOutcome {
  std::optional<AnchoredParse> projected;
  std::optional<RejectionReason> rejection;

  bool rejected() const { return rejection.has_value(); }
};

// ---------------------------------------------------------------------------
// Anchoring source slot values to source token positions

// Locates every leaf slot value as a contiguous token subsequence, claiming
// positions left to right so repeated values anchor deterministically.
// Throws UnanchoredSlot when a value cannot be located.
inline std::vector<TokenRange> anchor_slots(
    const ParseTree& tree, const std::vector<std::string>& tokens) {
  std::vector<const SlotNode*> leaves = leaf_slots(tree);
  std::vector<TokenRange> ranges;
  std::vector<bool> claimed(tokens.size(), false);
  ranges.reserve(leaves.size());
  for (const SlotNode* slot : leaves) {
    if (slot->tokens.empty()) {
      ranges.push_back({0, 0});
      continue;
    }
    const std::size_t n = slot->tokens.size();
    bool found = false;
    for (std::size_t start = 0; start + n <= tokens.size() && !found;
         ++start) {
      bool ok = true;
      for (std::size_t k = 0; k < n && ok; ++k)
        ok = !claimed[start + k] && tokens[start + k] == slot->tokens[k];
      if (!ok) continue;
      for (std::size_t k = 0; k < n; ++k) claimed[start + k] = true;
      ranges.push_back({start, start + n});
      found = true;
    }
    if (!found)
      throw UnanchoredSlot("slot '" + slot->label +
                           "' value not found in source tokens: " +
                           join(slot->tokens));
  }
  return ranges;
}

namespace detail {

// Multiset of slot labels that carry a non-empty value, at any depth.
inline std::vector<std::string> nonempty_slot_labels(const ParseTree& tree) {
  std::vector<std::string> labels;
  for (const SlotNode* slot : leaf_slots(tree))
    if (!slot->tokens.empty()) labels.push_back(slot->label);
  std::sort(labels.begin(), labels.end());
  return labels;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Projection

inline ProjectionOutcome project_parse(
    const ParseTree& source_parse, const std::vector<std::string>& source_tokens,
    const std::vector<std::string>& target_tokens, const AlignmentLinks& links) {
  std::vector<TokenRange> source_ranges =
      anchor_slots(source_parse, source_tokens);

  // target index -> aligned source index (unique per target in these models).
  std::vector<long> target_to_source(target_tokens.size(), -1);
  for (const auto& [s, t] : links.links)
    if (t < target_to_source.size())
      target_to_source[t] = static_cast<long>(s);

  AnchoredParse result;
  result.tree = source_parse;
  std::vector<SlotNode*> leaves = leaf_slots(result.tree);
  result.ranges.assign(leaves.size(), {0, 0});

  for (std::size_t k = 0; k < leaves.size(); ++k) {
    const TokenRange src = source_ranges[k];
    if (src.empty()) {
      leaves[k]->tokens.clear();
      continue;
    }
    std::size_t tmin = target_tokens.size(), tmax = 0;
    bool any = false;
    for (std::size_t t = 0; t < target_tokens.size(); ++t) {
      long s = target_to_source[t];
      if (s >= 0 && static_cast<std::size_t>(s) >= src.begin &&
          static_cast<std::size_t>(s) < src.end) {
        tmin = std::min(tmin, t);
        tmax = std::max(tmax, t);
        any = true;
      }
    }
    if (!any) {
      leaves[k]->tokens.clear();
      continue;
    }
    // Interior tokens aligned outside the slot's source range split the span.
    for (std::size_t t = tmin + 1; t < tmax; ++t) {
      long s = target_to_source[t];
      if (s >= 0 && (static_cast<std::size_t>(s) < src.begin ||
                     static_cast<std::size_t>(s) >= src.end))
        return {std::nullopt, RejectionReason::span_split};
    }
    leaves[k]->tokens.assign(target_tokens.begin() + tmin,
                             target_tokens.begin() + tmax + 1);
    result.ranges[k] = {tmin, tmax + 1};
  }

  // Overlapping projections of different slots are rejected with the other
  // slot-set defects.
  std::vector<TokenRange> occupied;
  for (const TokenRange& r : result.ranges) {
    if (r.empty()) continue;
    for (const TokenRange& o : occupied)
      if (r.begin < o.end && o.begin < r.end)
        return {std::nullopt, RejectionReason::slot_set_mismatch};
    occupied.push_back(r);
  }

  if (detail::nonempty_slot_labels(result.tree) !=
      detail::nonempty_slot_labels(source_parse))
    return {std::nullopt, RejectionReason::slot_set_mismatch};

  return {std::move(result), std::nullopt};
}

// ---------------------------------------------------------------------------
// POS-based boundary trimming

// Repeatedly strips leading/trailing ADP or DET tokens from every slot whose
// label is not exempt. Never alters labels or structure; values only shrink.
// A slot may become empty, which the slot-set re-check downstream rejects.
inline AnchoredParse pos_trim(const AnchoredParse& parse,
                              const PosTaggedUtterance& target_pos,
                              const std::set<std::string>& exempt_labels = {
                                  "DATE_TIME"}) {
  AnchoredParse out = parse;
  std::vector<SlotNode*> leaves = leaf_slots(out.tree);
  auto trimmable = [&](std::size_t token_index) {
    if (token_index >= target_pos.tags.size()) return false;
    PosTag tag = target_pos.tags[token_index];
    return tag == PosTag::adp || tag == PosTag::det;
  };
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    if (exempt_labels.count(leaves[k]->label)) continue;
    TokenRange& r = out.ranges[k];
    while (!r.empty() && trimmable(r.begin)) ++r.begin;
    while (!r.empty() && trimmable(r.end - 1)) --r.end;
    if (r.empty()) {
      leaves[k]->tokens.clear();
      r = {0, 0};
    } else {
      leaves[k]->tokens.assign(target_pos.tokens.begin() + r.begin,
                               target_pos.tokens.begin() + r.end);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Filters and postprocessing

// Keep only targets where whitespace splitting reproduces the tokenizer's
// output exactly.
inline bool whitespace_tokenization_filter(
    std::string_view raw_target, const std::vector<std::string>& target_tokens) {
  if (raw_target.empty() || target_tokens.empty()) return false;
  return split_whitespace(raw_target) == target_tokens;
}

struct PostprocessOptions {
  bool lowercase = false;
  bool turkish_ascii = false;
};

namespace detail {

inline char32_t turkish_ascii_map(char32_t cp) {
  switch (cp) {
    case 0x011F: return U'g';  // ğ
    case 0x011E: return U'G';  // Ğ
    case 0x0131: return U'i';  // ı
    case 0x0130: return U'I';  // İ
    case 0x00F6: return U'o';  // ö
    case 0x00D6: return U'O';  // Ö
    case 0x00FC: return U'u';  // ü
    case 0x00DC: return U'U';  // Ü
    case 0x015F: return U's';  // ş
    case 0x015E: return U'S';  // Ş
    case 0x00E7: return U'c';  // ç
    case 0x00C7: return U'C';  // Ç
    default: return cp;
  }
}

}  // namespace detail

// Language-specific postprocessing of translations; exact character table
// for Turkish, full lowercase mapping otherwise. Idempotent.
inline std::string target_postprocess(std::string_view text,
                                      const PostprocessOptions& options) {
  std::u32string cps = unicode::decode_utf8(text);
  if (options.turkish_ascii)
    for (char32_t& cp : cps) cp = detail::turkish_ascii_map(cp);
  if (options.lowercase) cps = unicode::to_lower(cps);
  return unicode::encode_utf8(cps);
}

inline std::vector<std::string> target_postprocess(
    const std::vector<std::string>& tokens, const PostprocessOptions& options) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const std::string& tok : tokens)
    out.push_back(target_postprocess(tok, options));
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline

struct FilterReport {
  std::size_t input = 0;
  std::size_t kept = 0;
  std::map<RejectionReason, std::size_t> rejected;
  std::size_t unanchored = 0;            // UnanchoredSlot errors
  std::size_t missing_translation = 0;   // id with no translation

  std::size_t rejected_total() const {
    std::size_t n = unanchored + missing_translation;
    for (const auto& [r, c] : rejected) n += c;
    return n;
  }

  double percent(std::size_t count) const {
    return input == 0 ? 0.0
                      : 100.0 * static_cast<double>(count) /
                            static_cast<double>(input);
  }

  void merge(const FilterReport& other) {
    input += other.input;
    kept += other.kept;
    unanchored += other.unanchored;
    missing_translation += other.missing_translation;
    for (const auto& [r, c] : other.rejected) rejected[r] += c;
  }

  // Textual table: reason, count, percentage of input.
  std::string format_table() const {
    std::ostringstream os;
    char buf[32];
    auto row = [&](const std::string& name, std::size_t count) {
      std::snprintf(buf, sizeof buf, "%6zu %7.2f%%", count, percent(count));
      os << "  " << name;
      for (std::size_t i = name.size(); i < 38; ++i) os << ' ';
      os << buf << '\n';
    };
    os << "filter report (" << input << " inputs)\n";
    for (RejectionReason r :
         {RejectionReason::source_tokenization_mismatch,
          RejectionReason::non_whitespace_target_tokenization,
          RejectionReason::span_split, RejectionReason::slot_set_mismatch}) {
      auto it = rejected.find(r);
      row(to_string(r), it == rejected.end() ? 0 : it->second);
    }
    if (unanchored) row("unanchored-slot", unanchored);
    if (missing_translation) row("missing-translation", missing_translation);
    row("kept", kept);
    return os.str();
  }
};

struct TapConfig {
  bool check_source_tokenization = true;
  bool require_whitespace_target = true;
  bool pos_trimming = true;
  std::set<std::string> exempt_labels = {"DATE_TIME"};
  PostprocessOptions postprocess;
  // Per-language overrides of the postprocess options, keyed by the
  // translation's language code.
  std::map<std::string, PostprocessOptions> postprocess_by_language;
  AlignMode align_mode = AlignMode::model1;

  const PostprocessOptions& postprocess_for(const std::string& language) const {
    auto it = postprocess_by_language.find(language);
    return it == postprocess_by_language.end() ? postprocess : it->second;
  }
};

struct TapResult {
  std::vector<Example> silver;
  FilterReport report;
};

// Full pipeline over a batch: source-tokenization check -> whitespace filter
// -> align -> project -> POS trim -> slot-set re-check. Per-example failures
// are counted, never fatal; every input ends up either in `silver` or in the
// report.
inline TapResult run_tap(const std::vector<Example>& sources,
                         const std::map<std::string, Utterance>& translations,
                         const AlignmentModel& model, const PosTagger& tagger,
                         const TapConfig& config = {}) {
  TapResult result;
  result.report.input = sources.size();
  WhitespaceTokenizer whitespace;
  for (const Example& source : sources) {
    if (!source.parse) {
      ++result.report.unanchored;
      continue;
    }
    auto it = translations.find(source.id);
    if (it == translations.end()) {
      ++result.report.missing_translation;
      continue;
    }

    std::vector<std::string> source_tokens =
        source.utterance.tokens ? *source.utterance.tokens
                                : whitespace.tokenize(source.utterance.raw);
    if (config.check_source_tokenization &&
        whitespace.tokenize(source.utterance.raw) != source_tokens) {
      ++result.report
            .rejected[RejectionReason::source_tokenization_mismatch];
      continue;
    }

    const PostprocessOptions& postprocess =
        config.postprocess_for(it->second.language);
    std::string target_raw = target_postprocess(it->second.raw, postprocess);
    std::vector<std::string> target_tokens =
        it->second.tokens ? target_postprocess(*it->second.tokens, postprocess)
                          : whitespace.tokenize(target_raw);
    if (config.require_whitespace_target &&
        !whitespace_tokenization_filter(target_raw, target_tokens)) {
      ++result.report
            .rejected[RejectionReason::non_whitespace_target_tokenization];
      continue;
    }

    AlignmentLinks links =
        viterbi_align(model, source_tokens, target_tokens, config.align_mode);
    ProjectionOutcome outcome;
    try {
      outcome =
          project_parse(*source.parse, source_tokens, target_tokens, links);
    } catch (const UnanchoredSlot&) {
      ++result.report.unanchored;
      continue;
    }
    if (outcome.rejected()) {
      ++result.report.rejected[*outcome.rejection];
      continue;
    }

    AnchoredParse projected = std::move(*outcome.projected);
    if (config.pos_trimming) {
      PosTaggedUtterance tagged =
          tagger.tag(target_tokens, it->second.language);
      projected = pos_trim(projected, tagged, config.exempt_labels);
      if (detail::nonempty_slot_labels(projected.tree) !=
          detail::nonempty_slot_labels(*source.parse)) {
        ++result.report.rejected[RejectionReason::slot_set_mismatch];
        continue;
      }
    }

    Example silver;
    silver.id = source.id;
    silver.utterance.raw = target_raw;
    silver.utterance.tokens = target_tokens;
    silver.utterance.language = it->second.language;
    silver.parse = std::move(projected.tree);
    silver.split = source.split;
    silver.provenance = Provenance::silver_tap;
    result.silver.push_back(std::move(silver));
    ++result.report.kept;
  }
  return result;
}

}  // namespace xsp
