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

// Translate-and-Fill machinery: build filler training/inference instances,
// run a pluggable filler backend, classify its outputs (malformed /
// signature mismatch / hallucination), assemble silver data, and report
// error statistics.
//
// A filler instance input is `utterance | signature`. The filler itself is a
// backend behind an interface: the shipped projection filler is a test
// double (it fills slots through word-alignment links); real model outputs
// enter the pipeline through the file-replay backend.

#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "xsp/alignment.hpp"
#include "xsp/corpus.hpp"
#include "xsp/parse_tree.hpp"
#include "xsp/tap.hpp"

namespace xsp {

// Default instance template separator; configurable per pipeline. A custom
// separator must not occur inside serialized signatures.
inline constexpr std::string_view kFillerSeparator = " | ";

class FillerUnavailable : public std::runtime_error {
 public:
  explicit FillerUnavailable(const std::string& what)
      : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Instances

struct FillerInstance {
  std::string input;                  // utterance SEP serialized signature
  std::optional<std::string> target;  // serialized full parse (training only)
  std::string source_id;
  std::string language;
};

namespace detail {

// Pipes inside utterances would be ambiguous against the separator, so they
// are escaped on instance construction and unescaped on splitting.
inline std::string escape_utterance(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == '\\' || c == '|') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

inline std::string unescape_utterance(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\\' && i + 1 < text.size()) ++i;
    out.push_back(text[i]);
  }
  return out;
}

}  // namespace detail

struct SplitInstanceInput {
  std::string utterance;       // unescaped
  std::string signature_text;  // bracketed form
};

// Splits at the last separator occurrence; serialized signatures never
// contain the separator.
inline std::optional<SplitInstanceInput> split_filler_input(
    std::string_view input, std::string_view separator = kFillerSeparator) {
  std::size_t pos = input.rfind(separator);
  if (pos == std::string_view::npos) return std::nullopt;
  return SplitInstanceInput{
      detail::unescape_utterance(input.substr(0, pos)),
      std::string(input.substr(pos + separator.size()))};
}

// Training instance: utterance plus its parse signature on the input side,
// the full parse as the target.
inline FillerInstance build_filler_train(
    const Example& example, std::string_view separator = kFillerSeparator) {
  if (!example.parse)
    throw std::invalid_argument("example has no parse: " + example.id);
  FillerInstance inst;
  inst.input = detail::escape_utterance(example.utterance.raw);
  inst.input += separator;
  inst.input += serialize(extract_signature(*example.parse));
  inst.target = serialize(*example.parse);
  inst.source_id = example.id;
  inst.language = example.utterance.language;
  return inst;
}

// Inference instance: the translation replaces the utterance, the signature
// stays; no target.
inline FillerInstance build_filler_infer(
    const Utterance& translation, const Example& source_example,
    std::string_view separator = kFillerSeparator) {
  if (!source_example.parse)
    throw std::invalid_argument("example has no parse: " + source_example.id);
  FillerInstance inst;
  inst.input = detail::escape_utterance(translation.raw);
  inst.input += separator;
  inst.input += serialize(extract_signature(*source_example.parse));
  inst.source_id = source_example.id;
  inst.language = translation.language;
  return inst;
}

inline FillerInstance build_filler_infer(
    const std::map<std::string, Utterance>& translations,
    const Example& source_example,
    std::string_view separator = kFillerSeparator) {
  auto it = translations.find(source_example.id);
  if (it == translations.end()) throw MissingTranslation(source_example.id);
  return build_filler_infer(it->second, source_example, separator);
}

// ---------------------------------------------------------------------------
// Filler backends

struct Filler {
  virtual ~Filler() = default;

  // Batch of input strings -> batch of output strings, order-preserving.
  virtual std::vector<std::string> fill_batch(
      const std::vector<std::string>& inputs) = 0;

  // Instance-level entry point; backends that need instance metadata
  // override this.
  virtual std::vector<std::string> fill(
      const std::vector<FillerInstance>& instances) {
    std::vector<std::string> inputs;
    inputs.reserve(instances.size());
    for (const FillerInstance& inst : instances) inputs.push_back(inst.input);
    return fill_batch(inputs);
  }
};

// Raw filler output for one instance.
inline std::string fill(const FillerInstance& instance, Filler& filler) {
  return filler.fill({instance}).at(0);
}

// Returns the input signature unchanged (empty slots).
class EchoFiller final : public Filler {
 public:
  explicit EchoFiller(std::string separator = std::string(kFillerSeparator))
      : separator_(std::move(separator)) {}

  std::vector<std::string> fill_batch(
      const std::vector<std::string>& inputs) override {
    std::vector<std::string> out;
    out.reserve(inputs.size());
    for (const std::string& input : inputs) {
      auto split = split_filler_input(input, separator_);
      out.push_back(split ? split->signature_text : input);
    }
    return out;
  }

 private:
  std::string separator_;
};

// Replays precomputed outputs (one per line, in instance order) from a file;
// this is how real model outputs enter the pipeline.
class ReplayFiller final : public Filler {
 public:
  explicit ReplayFiller(std::vector<std::string> outputs)
      : outputs_(std::move(outputs)) {}

  static ReplayFiller from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FillerUnavailable("cannot open replay file: " + path);
    std::vector<std::string> lines;
    std::string s;
    while (std::getline(in, s)) {
      if (!s.empty() && s.back() == '\r') s.pop_back();
      lines.push_back(s);
    }
    return ReplayFiller(std::move(lines));
  }

  std::vector<std::string> fill_batch(
      const std::vector<std::string>& inputs) override {
    std::vector<std::string> out;
    out.reserve(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (next_ >= outputs_.size())
        throw FillerUnavailable("replay file exhausted");
      out.push_back(outputs_[next_++]);
    }
    return out;
  }

 private:
  std::vector<std::string> outputs_;
  std::size_t next_ = 0;
};

// Projection test double: fills each empty slot of the signature with the
// contiguous closure of the target tokens aligned into the slot's source
// span. Inherits the aligner's behavior, defects included.
class ReferenceProjectionFiller final : public Filler {
 public:
  struct Context {
    std::vector<std::string> source_tokens;
    ParseTree source_parse;
  };

  ReferenceProjectionFiller(std::map<std::string, Context> contexts,
                            AlignmentModel model, AlignMode mode,
                            std::string separator = std::string(
                                kFillerSeparator))
      : contexts_(std::move(contexts)),
        model_(std::move(model)),
        mode_(mode),
        separator_(std::move(separator)) {}

  static ReferenceProjectionFiller from_examples(
      const std::vector<Example>& sources, AlignmentModel model,
      AlignMode mode,
      std::string separator = std::string(kFillerSeparator)) {
    std::map<std::string, Context> contexts;
    WhitespaceTokenizer tokenizer;
    for (const Example& ex : sources) {
      if (!ex.parse) continue;
      Context ctx;
      ctx.source_tokens = ex.utterance.tokens
                              ? *ex.utterance.tokens
                              : tokenizer.tokenize(ex.utterance.raw);
      ctx.source_parse = *ex.parse;
      contexts.emplace(ex.id, std::move(ctx));
    }
    return ReferenceProjectionFiller(std::move(contexts), std::move(model),
                                     mode, std::move(separator));
  }

  std::vector<std::string> fill_batch(
      const std::vector<std::string>&) override {
    throw FillerUnavailable(
        "reference filler needs instance metadata; use fill()");
  }

  std::vector<std::string> fill(
      const std::vector<FillerInstance>& instances) override {
    std::vector<std::string> out;
    out.reserve(instances.size());
    for (const FillerInstance& inst : instances)
      out.push_back(fill_one(inst));
    return out;
  }

 private:
  std::string fill_one(const FillerInstance& inst) const {
    auto it = contexts_.find(inst.source_id);
    if (it == contexts_.end())
      throw FillerUnavailable("no source context for id: " + inst.source_id);
    auto split = split_filler_input(inst.input, separator_);
    if (!split) throw FillerUnavailable("bad instance input");
    const Context& ctx = it->second;
    std::vector<std::string> target_tokens =
        split_whitespace(split->utterance);
    AlignmentLinks links =
        viterbi_align(model_, ctx.source_tokens, target_tokens, mode_);

    std::vector<long> target_to_source(target_tokens.size(), -1);
    for (const auto& [s, t] : links.links)
      if (t < target_to_source.size())
        target_to_source[t] = static_cast<long>(s);

    ParseTree filled = ctx.source_parse;
    std::vector<TokenRange> ranges;
    try {
      ranges = anchor_slots(ctx.source_parse, ctx.source_tokens);
    } catch (const UnanchoredSlot&) {
      // Cannot locate the source spans; reproduce the signature instead.
      return split->signature_text;
    }
    std::vector<SlotNode*> leaves = leaf_slots(filled);
    for (std::size_t k = 0; k < leaves.size(); ++k) {
      if (ranges[k].empty()) continue;
      std::size_t tmin = target_tokens.size(), tmax = 0;
      bool any = false;
      for (std::size_t t = 0; t < target_tokens.size(); ++t) {
        long s = target_to_source[t];
        if (s >= 0 && static_cast<std::size_t>(s) >= ranges[k].begin &&
            static_cast<std::size_t>(s) < ranges[k].end) {
          tmin = std::min(tmin, t);
          tmax = std::max(tmax, t);
          any = true;
        }
      }
      leaves[k]->tokens.clear();
      if (any)
        leaves[k]->tokens.assign(target_tokens.begin() + tmin,
                                 target_tokens.begin() + tmax + 1);
    }
    return serialize(filled);
  }

  std::map<std::string, Context> contexts_;
  AlignmentModel model_;
  AlignMode mode_;
  std::string separator_;
};

// ---------------------------------------------------------------------------
// Output validation

struct FillerVerdict {
  enum class Class { ok, malformed, signature_mismatch, hallucination };
  Class cls = Class::ok;
  std::vector<std::string> details;  // offending labels / spans
};

inline std::string to_string(FillerVerdict::Class c) {
  switch (c) {
    case FillerVerdict::Class::ok: return "ok";
    case FillerVerdict::Class::malformed: return "malformed";
    case FillerVerdict::Class::signature_mismatch: return "signature-mismatch";
    case FillerVerdict::Class::hallucination: return "hallucination";
  }
  return "?";
}

inline std::optional<FillerVerdict::Class> verdict_class_from_string(
    const std::string& s) {
  if (s == "ok") return FillerVerdict::Class::ok;
  if (s == "malformed") return FillerVerdict::Class::malformed;
  if (s == "signature-mismatch") return FillerVerdict::Class::signature_mismatch;
  if (s == "hallucination") return FillerVerdict::Class::hallucination;
  return std::nullopt;
}

struct ValidateOptions {
  // Hallucination checking normalizes to NFC; case folding is configurable.
  bool case_insensitive = false;
  std::string separator = std::string(kFillerSeparator);
};

// Classifies a filler output in fixed order: malformed (not parseable), then
// signature mismatch (order-insensitive), then hallucination (a slot value
// does not occur as a contiguous substring of the utterance).
inline FillerVerdict validate_filler_output(const std::string& output,
                                            const FillerInstance& instance,
                                            ValidateOptions options = {}) {
  auto split = split_filler_input(instance.input, options.separator);
  if (!split) throw std::invalid_argument("instance input has no separator");

  FillerVerdict verdict;
  ParseTree output_tree;
  try {
    output_tree = parse(output);
  } catch (const MalformedParse& e) {
    verdict.cls = FillerVerdict::Class::malformed;
    verdict.details.push_back(e.what());
    return verdict;
  }

  Signature expected{parse(split->signature_text)};
  Signature actual = extract_signature(output_tree);
  if (!signatures_equal(actual, expected, /*ignore_order=*/true)) {
    verdict.cls = FillerVerdict::Class::signature_mismatch;
    verdict.details.push_back("expected " + serialize(expected));
    verdict.details.push_back("got " + serialize(actual));
    return verdict;
  }

  std::string utterance_norm = normalize_text(
      split->utterance, NormForm::nfc, options.case_insensitive);
  for (const SlotNode* slot : leaf_slots(output_tree)) {
    if (slot->tokens.empty()) continue;
    std::string span = normalize_text(join(slot->tokens), NormForm::nfc,
                                      options.case_insensitive);
    if (utterance_norm.find(span) == std::string::npos) {
      verdict.cls = FillerVerdict::Class::hallucination;
      verdict.details.push_back(slot->label + ": " + join(slot->tokens));
    }
  }
  return verdict;
}

// ---------------------------------------------------------------------------
// Silver assembly

enum class AssemblePolicy { keep_all_parseable, strict };

struct AssembleOutcome {
  enum class Drop { none, malformed, verdict, slot_set };
  std::optional<Example> example;
  Drop drop = Drop::none;

  bool emitted() const { return example.has_value(); }
};

// keep-all-parseable emits every non-malformed output; strict only verdict
// ok. Outputs whose parse still has empty slots are degenerate training
// examples and are dropped under both policies.
inline AssembleOutcome assemble_silver(const Utterance& translation,
                                       const std::string& output,
                                       const FillerVerdict& verdict,
                                       AssemblePolicy policy,
                                       const std::string& source_id,
                                       Split split = Split::train) {
  AssembleOutcome outcome;
  if (verdict.cls == FillerVerdict::Class::malformed) {
    outcome.drop = AssembleOutcome::Drop::malformed;
    return outcome;
  }
  if (policy == AssemblePolicy::strict &&
      verdict.cls != FillerVerdict::Class::ok) {
    outcome.drop = AssembleOutcome::Drop::verdict;
    return outcome;
  }
  ParseTree tree = parse(output);
  for (const SlotNode* slot : leaf_slots(tree)) {
    if (slot->tokens.empty()) {
      outcome.drop = AssembleOutcome::Drop::slot_set;
      return outcome;
    }
  }
  Example ex;
  ex.id = source_id;
  ex.utterance = translation;
  ex.parse = std::move(tree);
  ex.split = split;
  ex.provenance = Provenance::silver_taf;
  outcome.example = std::move(ex);
  return outcome;
}

// ---------------------------------------------------------------------------
// Error reporting

struct ErrorReport {
  struct LangRow {
    std::size_t total = 0;
    std::size_t errors = 0;
    double percent() const {
      return total == 0 ? 0.0 : 100.0 * static_cast<double>(errors) /
                                    static_cast<double>(total);
    }
  };
  std::map<std::string, LangRow> per_language;
  std::size_t total = 0;
  std::size_t errors = 0;
  std::map<FillerVerdict::Class, std::size_t> by_class;

  double percent() const {
    return total == 0 ? 0.0 : 100.0 * static_cast<double>(errors) /
                                  static_cast<double>(total);
  }

  std::string format_table() const {
    std::ostringstream os;
    char buf[64];
    os << "language   errors\n";
    for (const auto& [lang, row] : per_language) {
      std::snprintf(buf, sizeof buf, "%-10s %6zu (%.2f%%)",
                    lang.empty() ? "?" : lang.c_str(), row.errors,
                    row.percent());
      os << buf << '\n';
    }
    std::snprintf(buf, sizeof buf, "%-10s %6zu (%.2f%%)", "total", errors,
                  percent());
    os << buf << '\n';
    if (errors > 0) {
      os << "breakdown of errors by class\n";
      for (auto cls : {FillerVerdict::Class::malformed,
                       FillerVerdict::Class::signature_mismatch,
                       FillerVerdict::Class::hallucination}) {
        auto it = by_class.find(cls);
        std::size_t n = it == by_class.end() ? 0 : it->second;
        std::snprintf(buf, sizeof buf, "  %-20s %6zu (%.2f%%)",
                      to_string(cls).c_str(), n,
                      100.0 * static_cast<double>(n) /
                          static_cast<double>(errors));
        os << buf << '\n';
      }
    }
    return os.str();
  }
};

// Per-language error counts and percentages plus the global class breakdown.
inline ErrorReport error_report(
    const std::vector<std::pair<std::string, FillerVerdict>>& verdicts) {
  ErrorReport report;
  for (const auto& [language, verdict] : verdicts) {
    auto& row = report.per_language[language];
    ++row.total;
    ++report.total;
    if (verdict.cls != FillerVerdict::Class::ok) {
      ++row.errors;
      ++report.errors;
      ++report.by_class[verdict.cls];
    }
  }
  return report;
}

}  // namespace xsp
