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

// Evaluation: Exact Match, Intent Accuracy and micro Slot F1. Predicted
// trees are grounded back to BIO tags before chunk scoring: slots that can
// be unambiguously located in the token sequence by full or partial string
// matching are tagged directly, the rest are aligned character-wise with
// Needleman-Wunsch and tokens join a slot by majority character vote.

#pragma once

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "xsp/bio.hpp"
#include "xsp/needleman_wunsch.hpp"
#include "xsp/parse_tree.hpp"
#include "xsp/unicode.hpp"

namespace xsp {

// 1 iff the trees serialize identically after token normalization; ordered
// structural comparison.
inline int exact_match(const ParseTree& pred, const ParseTree& gold,
                       NormForm form = NormForm::nfc, bool lowercase = false) {
  return serialize(normalize_tree(pred, form, lowercase)) ==
                 serialize(normalize_tree(gold, form, lowercase))
             ? 1
             : 0;
}

// 1 iff the root intent labels are equal.
inline int intent_accuracy(const ParseTree& pred, const ParseTree& gold) {
  return pred.root.label == gold.root.label ? 1 : 0;
}

// ---------------------------------------------------------------------------
// Grounding a tree back to a BIO tagging of its utterance

struct GroundingOptions {
  NormForm form = NormForm::nfc;
  bool lowercase = false;  // grounding preserves case by default
  NwScoring scoring{1.0, -1.0, -1.0};
  double vote_threshold = 0.5;  // a token joins when vote > threshold * len
};

namespace detail {

struct CharSeq {
  std::u32string chars;
  std::vector<std::size_t> token_of;  // per char; npos for separators
};

inline CharSeq build_char_seq(const std::vector<std::u32string>& tokens,
                              const std::vector<std::size_t>& token_ids) {
  CharSeq seq;
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    if (k) {
      seq.chars.push_back(U' ');
      seq.token_of.push_back(std::string::npos);
    }
    for (char32_t c : tokens[k]) {
      seq.chars.push_back(c);
      seq.token_of.push_back(token_ids[k]);
    }
  }
  return seq;
}

// Occurrences of `needle` as a contiguous token subsequence.
inline std::vector<std::size_t> token_occurrences(
    const std::vector<std::u32string>& haystack,
    const std::vector<std::u32string>& needle) {
  std::vector<std::size_t> hits;
  if (needle.empty() || needle.size() > haystack.size()) return hits;
  for (std::size_t start = 0; start + needle.size() <= haystack.size();
       ++start) {
    bool ok = true;
    for (std::size_t k = 0; k < needle.size() && ok; ++k)
      ok = haystack[start + k] == needle[k];
    if (ok) hits.push_back(start);
  }
  return hits;
}

}  // namespace detail

// Grounds a (flattened) tree onto its token sequence. Slots that ground to
// zero tokens contribute no chunk; `ungrounded`, when given, counts them.
inline BioSequence ground_tree_to_bio(const ParseTree& tree,
                                      const std::vector<std::string>& tokens,
                                      GroundingOptions options = {},
                                      std::size_t* ungrounded = nullptr) {
  BioSequence out;
  out.tokens = tokens;
  out.tags.assign(tokens.size(), "O");
  out.intent = tree.root.label;

  std::vector<const SlotNode*> leaves = leaf_slots(tree);
  std::vector<const SlotNode*> slots;
  for (const SlotNode* s : leaves)
    if (!s->tokens.empty()) slots.push_back(s);
  if (slots.empty()) return out;

  auto norm = [&](const std::string& s) {
    return unicode::decode_utf8(
        normalize_text(s, options.form, options.lowercase));
  };
  std::vector<std::u32string> norm_tokens;
  norm_tokens.reserve(tokens.size());
  for (const std::string& t : tokens) norm_tokens.push_back(norm(t));

  // token index -> slot index, npos = unclaimed.
  std::vector<std::size_t> claim(tokens.size(), std::string::npos);
  std::vector<const SlotNode*> pending;
  std::vector<std::size_t> pending_index;

  // Pass 1: unique full (token-aligned) or partial (substring) matches.
  for (std::size_t k = 0; k < slots.size(); ++k) {
    std::vector<std::u32string> value;
    for (const std::string& t : slots[k]->tokens) value.push_back(norm(t));

    std::vector<std::size_t> full =
        detail::token_occurrences(norm_tokens, value);
    if (full.size() == 1) {
      std::size_t start = full[0];
      bool free = true;
      for (std::size_t i = 0; i < value.size() && free; ++i)
        free = claim[start + i] == std::string::npos;
      if (free) {
        for (std::size_t i = 0; i < value.size(); ++i) claim[start + i] = k;
        continue;
      }
    }
    if (full.empty()) {
      // Partial match: unique substring of the space-joined token sequence,
      // crossing token boundaries; claims the covering tokens.
      std::vector<std::size_t> ids(tokens.size());
      for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
      detail::CharSeq seq = detail::build_char_seq(norm_tokens, ids);
      std::u32string value_str;
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i) value_str.push_back(U' ');
        value_str += value[i];
      }
      std::size_t first = seq.chars.find(value_str);
      if (first != std::u32string::npos &&
          seq.chars.find(value_str, first + 1) == std::u32string::npos) {
        std::set<std::size_t> covering;
        for (std::size_t c = first; c < first + value_str.size(); ++c)
          if (seq.token_of[c] != std::string::npos)
            covering.insert(seq.token_of[c]);
        bool free = true;
        for (std::size_t tok : covering)
          if (claim[tok] != std::string::npos) free = false;
        if (free && !covering.empty()) {
          for (std::size_t tok : covering) claim[tok] = k;
          continue;
        }
      }
    }
    pending.push_back(slots[k]);
    pending_index.push_back(k);
  }

  // Pass 2: character-level alignment of each remaining slot against the
  // still-unclaimed token stretch; majority character vote per token.
  for (std::size_t p = 0; p < pending.size(); ++p) {
    std::vector<std::u32string> stretch_tokens;
    std::vector<std::size_t> stretch_ids;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (claim[i] != std::string::npos) continue;
      stretch_tokens.push_back(norm_tokens[i]);
      stretch_ids.push_back(i);
    }
    std::size_t joined = 0;
    if (!stretch_tokens.empty()) {
      detail::CharSeq seq = detail::build_char_seq(stretch_tokens, stretch_ids);
      std::u32string value_str;
      for (std::size_t i = 0; i < pending[p]->tokens.size(); ++i) {
        if (i) value_str.push_back(U' ');
        value_str += norm(pending[p]->tokens[i]);
      }
      NwResult nw = needleman_wunsch(value_str, seq.chars, options.scoring);
      std::map<std::size_t, std::size_t> votes;
      for (const auto& [ai, bi] : nw.pairs) {
        std::size_t tok = seq.token_of[bi];
        if (tok != std::string::npos) ++votes[tok];
      }
      for (const auto& [tok, vote] : votes) {
        if (static_cast<double>(vote) >
            options.vote_threshold *
                static_cast<double>(norm_tokens[tok].size())) {
          claim[tok] = pending_index[p];
          ++joined;
        }
      }
    }
    if (joined == 0 && ungrounded) ++*ungrounded;
  }

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (claim[i] == std::string::npos) continue;
    const std::string& label = slots[claim[i]]->label;
    bool begin = i == 0 || claim[i - 1] != claim[i];
    out.tags[i] = (begin ? "B-" : "I-") + label;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Micro slot precision / recall / F1

class LengthMismatch : public std::runtime_error {
 public:
  explicit LengthMismatch(std::size_t index)
      : std::runtime_error("token count mismatch at pair " +
                           std::to_string(index)) {}
};

struct SlotScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t gold_chunks = 0;
  std::size_t pred_chunks = 0;
  std::size_t correct = 0;
  bool no_chunks = false;  // degenerate: no gold and no predicted chunks
  std::size_t skipped_pairs = 0;

  void finalize() {
    precision = pred_chunks ? static_cast<double>(correct) /
                                  static_cast<double>(pred_chunks)
                            : 0.0;
    recall = gold_chunks ? static_cast<double>(correct) /
                               static_cast<double>(gold_chunks)
                         : 0.0;
    f1 = (precision + recall) > 0.0
             ? 2.0 * precision * recall / (precision + recall)
             : 0.0;
    no_chunks = gold_chunks == 0 && pred_chunks == 0;
  }
};

// A predicted chunk is correct iff (label, start, end) all match a gold
// chunk; micro-averaged over the corpus.
inline SlotScores slot_f1(const std::vector<BioSequence>& golds,
                          const std::vector<BioSequence>& preds,
                          bool lenient = true) {
  SlotScores scores;
  std::size_t n = std::min(golds.size(), preds.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (golds[i].tokens.size() != preds[i].tokens.size()) {
      if (!lenient) throw LengthMismatch(i);
      ++scores.skipped_pairs;
      continue;
    }
    std::vector<Chunk> gold = extract_chunks(golds[i].tags);
    std::vector<Chunk> pred = extract_chunks(preds[i].tags);
    scores.gold_chunks += gold.size();
    scores.pred_chunks += pred.size();
    std::set<Chunk> gold_set(gold.begin(), gold.end());
    for (const Chunk& c : pred)
      if (gold_set.count(c)) ++scores.correct;
  }
  scores.finalize();
  return scores;
}

// ---------------------------------------------------------------------------
// Corpus-level reports

struct Metrics {
  double exact_match = 0.0;
  double intent_accuracy = 0.0;
  double slot_precision = 0.0;
  double slot_recall = 0.0;
  double slot_f1 = 0.0;
  std::size_t support = 0;
  std::size_t ungrounded = 0;  // slots that grounded to zero tokens
  bool no_chunks = false;
};

struct MetricsReport {
  std::map<std::string, Metrics> per_language;
  Metrics average;  // unweighted mean over average_languages
  std::vector<std::string> average_languages;
};

struct EvalPair {
  ParseTree gold;
  ParseTree pred;
  std::vector<std::string> tokens;
  std::string language;
};

inline MetricsReport evaluate(const std::vector<EvalPair>& pairs,
                              const std::vector<std::string>& average_subset =
                                  {},
                              GroundingOptions grounding = {}) {
  struct Accum {
    std::size_t n = 0;
    std::size_t em = 0;
    std::size_t ia = 0;
    std::size_t ungrounded = 0;
    std::vector<BioSequence> golds, preds;
  };
  std::map<std::string, Accum> by_language;
  for (const EvalPair& pair : pairs) {
    Accum& acc = by_language[pair.language];
    ++acc.n;
    acc.em += exact_match(pair.pred, pair.gold, grounding.form,
                          grounding.lowercase);
    acc.ia += intent_accuracy(pair.pred, pair.gold);
    acc.golds.push_back(ground_tree_to_bio(pair.gold, pair.tokens, grounding,
                                           &acc.ungrounded));
    acc.preds.push_back(ground_tree_to_bio(pair.pred, pair.tokens, grounding,
                                           &acc.ungrounded));
  }
  MetricsReport report;
  for (auto& [language, acc] : by_language) {
    Metrics m;
    m.support = acc.n;
    m.exact_match = acc.n ? static_cast<double>(acc.em) / acc.n : 0.0;
    m.intent_accuracy = acc.n ? static_cast<double>(acc.ia) / acc.n : 0.0;
    SlotScores scores = slot_f1(acc.golds, acc.preds);
    m.slot_precision = scores.precision;
    m.slot_recall = scores.recall;
    m.slot_f1 = scores.f1;
    m.no_chunks = scores.no_chunks;
    m.ungrounded = acc.ungrounded;
    report.per_language.emplace(language, m);
  }
  if (average_subset.empty()) {
    for (const auto& [language, m] : report.per_language)
      report.average_languages.push_back(language);
  } else {
    report.average_languages = average_subset;
  }
  Metrics avg;
  std::size_t langs = 0;
  for (const std::string& language : report.average_languages) {
    auto it = report.per_language.find(language);
    if (it == report.per_language.end()) continue;
    ++langs;
    avg.exact_match += it->second.exact_match;
    avg.intent_accuracy += it->second.intent_accuracy;
    avg.slot_precision += it->second.slot_precision;
    avg.slot_recall += it->second.slot_recall;
    avg.slot_f1 += it->second.slot_f1;
    avg.support += it->second.support;
  }
  if (langs > 0) {
    double d = static_cast<double>(langs);
    avg.exact_match /= d;
    avg.intent_accuracy /= d;
    avg.slot_precision /= d;
    avg.slot_recall /= d;
    avg.slot_f1 /= d;
  }
  report.average = avg;
  return report;
}

// ---------------------------------------------------------------------------
// Aggregation over runs

struct AggregateReport {
  MetricsReport mean;
  MetricsReport stddev;  // sample standard deviation per metric
  std::size_t runs = 0;
};

namespace detail {

template <typename Get>
void mean_std(const std::vector<MetricsReport>& runs, const std::string& lang,
              bool use_average, Get get, double& mean, double& stddev) {
  std::vector<double> values;
  for (const MetricsReport& r : runs) {
    if (use_average) {
      values.push_back(get(r.average));
    } else {
      auto it = r.per_language.find(lang);
      values.push_back(it == r.per_language.end() ? 0.0 : get(it->second));
    }
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  mean = values.empty() ? 0.0 : sum / static_cast<double>(values.size());
  if (values.size() < 2) {
    stddev = 0.0;
    return;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
}

inline void aggregate_metric(const std::vector<MetricsReport>& runs,
                             const std::string& lang, bool use_average,
                             Metrics& mean, Metrics& stddev) {
  detail::mean_std(runs, lang, use_average,
                   [](const Metrics& m) { return m.exact_match; },
                   mean.exact_match, stddev.exact_match);
  detail::mean_std(runs, lang, use_average,
                   [](const Metrics& m) { return m.intent_accuracy; },
                   mean.intent_accuracy, stddev.intent_accuracy);
  detail::mean_std(runs, lang, use_average,
                   [](const Metrics& m) { return m.slot_precision; },
                   mean.slot_precision, stddev.slot_precision);
  detail::mean_std(runs, lang, use_average,
                   [](const Metrics& m) { return m.slot_recall; },
                   mean.slot_recall, stddev.slot_recall);
  detail::mean_std(runs, lang, use_average,
                   [](const Metrics& m) { return m.slot_f1; }, mean.slot_f1,
                   stddev.slot_f1);
}

}  // namespace detail

// Across runs: mean and sample standard deviation per metric; within each
// run, the unweighted language average is recomputed over `subset` when
// given.
inline AggregateReport aggregate(std::vector<MetricsReport> runs,
                                 const std::vector<std::string>& subset = {}) {
  AggregateReport agg;
  agg.runs = runs.size();
  if (runs.empty()) return agg;
  if (!subset.empty()) {
    for (MetricsReport& r : runs) {
      Metrics avg;
      std::size_t langs = 0;
      for (const std::string& language : subset) {
        auto it = r.per_language.find(language);
        if (it == r.per_language.end()) continue;
        ++langs;
        avg.exact_match += it->second.exact_match;
        avg.intent_accuracy += it->second.intent_accuracy;
        avg.slot_precision += it->second.slot_precision;
        avg.slot_recall += it->second.slot_recall;
        avg.slot_f1 += it->second.slot_f1;
        avg.support += it->second.support;
      }
      if (langs > 0) {
        double d = static_cast<double>(langs);
        avg.exact_match /= d;
        avg.intent_accuracy /= d;
        avg.slot_precision /= d;
        avg.slot_recall /= d;
        avg.slot_f1 /= d;
      }
      r.average = avg;
      r.average_languages = subset;
    }
  }
  agg.mean.average_languages = runs.front().average_languages;
  agg.stddev.average_languages = runs.front().average_languages;
  for (const auto& [language, m] : runs.front().per_language) {
    Metrics mean, stddev;
    detail::aggregate_metric(runs, language, false, mean, stddev);
    mean.support = m.support;
    agg.mean.per_language.emplace(language, mean);
    agg.stddev.per_language.emplace(language, stddev);
  }
  detail::aggregate_metric(runs, "", true, agg.mean.average,
                           agg.stddev.average);
  agg.mean.average.support = runs.front().average.support;
  return agg;
}

// ---------------------------------------------------------------------------
// Formatting

inline std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * fraction);
  return buf;
}

inline std::string format_table(const MetricsReport& report) {
  std::ostringstream os;
  os << "language       EM  Intent   SlotP   SlotR  SlotF1  support\n";
  auto row = [&](const std::string& name, const Metrics& m) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-10s %6.2f  %6.2f  %6.2f  %6.2f  %6.2f  %7zu",
                  name.c_str(), 100.0 * m.exact_match,
                  100.0 * m.intent_accuracy, 100.0 * m.slot_precision,
                  100.0 * m.slot_recall, 100.0 * m.slot_f1, m.support);
    os << buf;
    if (m.no_chunks) os << "  [no-chunks]";
    if (m.ungrounded) os << "  [ungrounded " << m.ungrounded << "]";
    os << '\n';
  };
  for (const auto& [language, m] : report.per_language)
    row(language.empty() ? "?" : language, m);
  row("Avg", report.average);
  return os.str();
}

inline std::string format_table(const AggregateReport& agg) {
  std::ostringstream os;
  os << "language       EM           Intent       SlotF1       (" << agg.runs
     << " runs, mean +/- std)\n";
  auto row = [&](const std::string& name, const Metrics& mean,
                 const Metrics& sd) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "%-10s %5.1f +/- %-4.1f %5.1f +/- %-4.1f %5.1f +/- %-4.1f",
                  name.c_str(), 100.0 * mean.exact_match,
                  100.0 * sd.exact_match, 100.0 * mean.intent_accuracy,
                  100.0 * sd.intent_accuracy, 100.0 * mean.slot_f1,
                  100.0 * sd.slot_f1);
    os << buf << '\n';
  };
  for (const auto& [language, m] : agg.mean.per_language) {
    auto it = agg.stddev.per_language.find(language);
    row(language.empty() ? "?" : language, m,
        it == agg.stddev.per_language.end() ? Metrics{} : it->second);
  }
  row("Avg", agg.mean.average, agg.stddev.average);
  return os.str();
}

inline nlohmann::ordered_json to_json(const Metrics& m) {
  nlohmann::ordered_json j;
  j["exact_match"] = m.exact_match;
  j["intent_accuracy"] = m.intent_accuracy;
  j["slot_precision"] = m.slot_precision;
  j["slot_recall"] = m.slot_recall;
  j["slot_f1"] = m.slot_f1;
  j["support"] = m.support;
  if (m.ungrounded) j["ungrounded"] = m.ungrounded;
  if (m.no_chunks) j["no_chunks"] = true;
  return j;
}

inline nlohmann::ordered_json to_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["per_language"] = nlohmann::ordered_json::object();
  for (const auto& [language, m] : report.per_language)
    j["per_language"][language] = to_json(m);
  j["average"] = to_json(report.average);
  j["average_languages"] = report.average_languages;
  return j;
}

inline nlohmann::ordered_json to_json(const AggregateReport& agg) {
  nlohmann::ordered_json j;
  j["runs"] = agg.runs;
  j["mean"] = to_json(agg.mean);
  j["stddev"] = to_json(agg.stddev);
  return j;
}

}  // namespace xsp
