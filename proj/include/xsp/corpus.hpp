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

// Dataset records and file formats.
//
// Three formats are supported:
//   canonical  one JSON record per line, fixed field order
//              (id, locale, split, utterance, tokens, parse, provenance);
//              the only write format.
//   conll-bio  blank-line-separated blocks; `# intent = <label>` header
//              lines; `token<TAB>tag` body lines.
//   mtop-tsv   tab-separated with a configurable column map.
//
// Readers are streaming (constant per-record state) and run in strict mode
// (abort on the first bad record) or lenient mode (skip and count).

#pragma once

#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "xsp/bio.hpp"
#include "xsp/parse_tree.hpp"

namespace xsp {

// ---------------------------------------------------------------------------
// Small text helpers used throughout the pipelines.

inline std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && detail::is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !detail::is_space(text[i])) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

inline std::string join(const std::vector<std::string>& parts,
                        std::string_view sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

struct Tokenizer {
  virtual ~Tokenizer() = default;
  virtual std::vector<std::string> tokenize(std::string_view text) const = 0;
};

struct WhitespaceTokenizer final : Tokenizer {
  std::vector<std::string> tokenize(std::string_view text) const override {
    return split_whitespace(text);
  }
};

// ---------------------------------------------------------------------------
// Records

struct Utterance {
  std::string raw;
  std::optional<std::vector<std::string>> tokens;
  std::string language;
  bool retokenized = false;  // external tokenizer changed segmentation
};

enum class Split { train, validation, test };
enum class Provenance { gold, silver_taf, silver_tap };

inline std::string to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
  }
  return "train";
}

inline std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::gold: return "gold";
    case Provenance::silver_taf: return "silver-taf";
    case Provenance::silver_tap: return "silver-tap";
  }
  return "gold";
}

inline std::optional<Split> split_from_string(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "validation" || s == "dev" || s == "eval") return Split::validation;
  if (s == "test") return Split::test;
  return std::nullopt;
}

inline std::optional<Provenance> provenance_from_string(const std::string& s) {
  if (s == "gold") return Provenance::gold;
  if (s == "silver-taf") return Provenance::silver_taf;
  if (s == "silver-tap") return Provenance::silver_tap;
  return std::nullopt;
}

struct Example {
  std::string id;
  Utterance utterance;
  std::optional<ParseTree> parse;
  Split split = Split::train;
  Provenance provenance = Provenance::gold;
  bool unanchored = false;
  // Original casing of labels upper-cased on ingestion, keyed by the
  // upper-cased form.
  std::map<std::string, std::string> label_case;
};

class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// ---------------------------------------------------------------------------
// Canonical format

inline nlohmann::ordered_json example_to_json(const Example& ex) {
  nlohmann::ordered_json j;
  j["id"] = ex.id;
  j["locale"] = ex.utterance.language;
  j["split"] = to_string(ex.split);
  j["utterance"] = ex.utterance.raw;
  if (ex.utterance.tokens) j["tokens"] = *ex.utterance.tokens;
  if (ex.parse) j["parse"] = serialize(*ex.parse);
  j["provenance"] = to_string(ex.provenance);
  if (ex.utterance.retokenized) j["retokenized"] = true;
  if (ex.unanchored) j["unanchored"] = true;
  if (!ex.label_case.empty()) j["label_case"] = ex.label_case;
  return j;
}

inline Example example_from_json(const nlohmann::ordered_json& j,
                                 std::size_t line) {
  Example ex;
  try {
    ex.id = j.at("id").get<std::string>();
    ex.utterance.language = j.value("locale", std::string());
    ex.utterance.raw = j.value("utterance", std::string());
    if (j.contains("tokens"))
      ex.utterance.tokens = j.at("tokens").get<std::vector<std::string>>();
    if (j.contains("parse"))
      ex.parse = parse(j.at("parse").get<std::string>());
    if (auto s = split_from_string(j.value("split", std::string("train"))))
      ex.split = *s;
    if (auto p =
            provenance_from_string(j.value("provenance", std::string("gold"))))
      ex.provenance = *p;
    ex.utterance.retokenized = j.value("retokenized", false);
    ex.unanchored = j.value("unanchored", false);
    if (j.contains("label_case"))
      ex.label_case =
          j.at("label_case").get<std::map<std::string, std::string>>();
  } catch (const MalformedParse& e) {
    throw FormatError(std::string("bad parse field: ") + e.what(), line);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad record: ") + e.what(), line);
  }
  return ex;
}

inline void write_canonical(std::ostream& os, const Example& ex) {
  os << example_to_json(ex).dump() << '\n';
}

inline void write_dataset(std::ostream& os, const std::vector<Example>& xs) {
  for (const Example& ex : xs) write_canonical(os, ex);
}

// ---------------------------------------------------------------------------
// Reading

enum class DatasetFormat { canonical, conll_bio, mtop_tsv };

inline std::optional<DatasetFormat> format_from_string(const std::string& s) {
  if (s == "canonical") return DatasetFormat::canonical;
  if (s == "conll-bio") return DatasetFormat::conll_bio;
  if (s == "mtop-tsv") return DatasetFormat::mtop_tsv;
  return std::nullopt;
}

// Column map for MTOP-style TSV files; indices are 0-based, -1 = absent.
struct MtopColumns {
  int id = 0;
  int utterance = 1;
  int parse = 2;
  int locale = 3;
  int tokens = -1;
  // `space`: tokens column is space-separated; `json`: a JSON object with a
  // "tokens" array (the layout the MTOP release uses).
  enum class TokensEncoding { space, json };
  TokensEncoding tokens_encoding = TokensEncoding::space;
};

struct ReadOptions {
  bool strict = true;
  MtopColumns mtop;
  std::string default_language;
  std::optional<Split> split_override;
};

// Streaming dataset reader; `next` yields records in file order. In lenient
// mode bad records are skipped and counted.
class DatasetReader {
 public:
  DatasetReader(std::istream& in, DatasetFormat format,
                ReadOptions options = {})
      : in_(in), format_(format), options_(std::move(options)) {}

  // Returns false at end of input.
  bool next(Example& out) {
    while (true) {
      try {
        switch (format_) {
          case DatasetFormat::canonical:
            if (!next_canonical(out)) return false;
            break;
          case DatasetFormat::conll_bio:
            if (!next_conll(out)) return false;
            break;
          case DatasetFormat::mtop_tsv:
            if (!next_mtop(out)) return false;
            break;
        }
        if (options_.split_override) out.split = *options_.split_override;
        return true;
      } catch (const FormatError&) {
        if (options_.strict) throw;
        ++skipped_;
      }
    }
  }

  std::size_t skipped() const { return skipped_; }
  std::size_t line() const { return line_; }

 private:
  bool getline(std::string& s) {
    if (!std::getline(in_, s)) return false;
    ++line_;
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return true;
  }

  bool next_canonical(Example& out) {
    std::string s;
    while (getline(s)) {
      if (s.empty()) continue;
      nlohmann::ordered_json j =
          nlohmann::ordered_json::parse(s, nullptr, false);
      if (j.is_discarded()) throw FormatError("invalid JSON record", line_);
      out = example_from_json(j, line_);
      return true;
    }
    return false;
  }

  bool next_conll(Example& out) {
    BioSequence seq;
    std::string id;
    std::string locale = options_.default_language;
    std::size_t block_line = 0;
    std::string s;
    bool in_block = false;
    while (getline(s)) {
      if (s.empty()) {
        if (in_block) break;
        continue;
      }
      if (!in_block) {
        in_block = true;
        block_line = line_;
      }
      if (s[0] == '#') {
        parse_conll_comment(s, id, locale, seq.intent);
        continue;
      }
      std::size_t tab = s.find('\t');
      if (tab == std::string::npos)
        throw FormatError("expected token<TAB>tag", line_);
      std::string token = s.substr(0, tab);
      std::string tag = s.substr(tab + 1);
      if (token.empty() || !valid_bio_tag(tag))
        throw FormatError("bad BIO line", line_);
      seq.tokens.push_back(std::move(token));
      seq.tags.push_back(std::move(tag));
    }
    if (!in_block) return false;
    if (seq.intent.empty())
      throw FormatError("block without `# intent = ...` header", block_line);
    out = Example{};
    ++block_index_;
    out.id = id.empty() ? "b" + std::to_string(block_index_) : id;
    out.utterance.raw = join(seq.tokens);
    out.utterance.tokens = seq.tokens;
    out.utterance.language = locale;
    out.parse = bio_to_tree(seq);
    record_label_case(out, seq);
    return true;
  }

  void parse_conll_comment(const std::string& s, std::string& id,
                           std::string& locale, std::string& intent) {
    auto field = [&](std::string_view key) -> std::optional<std::string> {
      std::string prefix = "# " + std::string(key) + " = ";
      if (s.rfind(prefix, 0) == 0) return s.substr(prefix.size());
      return std::nullopt;
    };
    if (auto v = field("intent")) intent = *v;
    if (auto v = field("id")) id = *v;
    if (auto v = field("locale")) locale = *v;
  }

  void record_label_case(Example& out, const BioSequence& seq) {
    auto note = [&](const std::string& original) {
      std::string upper = ascii_upper(original);
      if (upper != original) out.label_case[upper] = original;
    };
    note(seq.intent);
    for (const Chunk& c : extract_chunks(seq.tags)) note(c.label);
  }

  bool next_mtop(Example& out) {
    std::string s;
    while (getline(s)) {
      if (s.empty()) continue;
      std::vector<std::string> cols;
      std::size_t start = 0;
      while (true) {
        std::size_t tab = s.find('\t', start);
        if (tab == std::string::npos) {
          cols.push_back(s.substr(start));
          break;
        }
        cols.push_back(s.substr(start, tab - start));
        start = tab + 1;
      }
      const MtopColumns& m = options_.mtop;
      auto col = [&](int idx, std::string_view name) -> const std::string& {
        if (idx < 0 || static_cast<std::size_t>(idx) >= cols.size())
          throw FormatError("missing column '" + std::string(name) + "'",
                            line_);
        return cols[idx];
      };
      out = Example{};
      out.id = col(m.id, "id");
      out.utterance.raw = col(m.utterance, "utterance");
      if (m.locale >= 0 && static_cast<std::size_t>(m.locale) < cols.size())
        out.utterance.language = cols[m.locale];
      else
        out.utterance.language = options_.default_language;
      const std::string& parse_col = col(m.parse, "parse");
      if (!parse_col.empty()) {
        try {
          out.parse = parse(parse_col);
        } catch (const MalformedParse& e) {
          throw FormatError(std::string("bad parse column: ") + e.what(),
                            line_);
        }
      }
      if (m.tokens >= 0) {
        const std::string& tok_col = col(m.tokens, "tokens");
        if (m.tokens_encoding == MtopColumns::TokensEncoding::json) {
          nlohmann::json j = nlohmann::json::parse(tok_col, nullptr, false);
          if (j.is_discarded() || !j.contains("tokens"))
            throw FormatError("bad tokens column", line_);
          out.utterance.tokens =
              j.at("tokens").get<std::vector<std::string>>();
        } else {
          out.utterance.tokens = split_whitespace(tok_col);
        }
      }
      return true;
    }
    return false;
  }

  std::istream& in_;
  DatasetFormat format_;
  ReadOptions options_;
  std::size_t line_ = 0;
  std::size_t skipped_ = 0;
  std::size_t block_index_ = 0;
};

inline std::vector<Example> read_all(std::istream& in, DatasetFormat format,
                                     ReadOptions options = {}) {
  DatasetReader reader(in, format, std::move(options));
  std::vector<Example> out;
  Example ex;
  while (reader.next(ex)) out.push_back(ex);
  return out;
}

inline std::vector<Example> read_file(const std::string& path,
                                      DatasetFormat format,
                                      ReadOptions options = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_all(in, format, std::move(options));
}

// ---------------------------------------------------------------------------
// Tokenization match statistics

struct TokenizationStats {
  struct PerLanguage {
    std::size_t joined = 0;
    std::size_t matched = 0;
    double percent() const {
      return joined == 0 ? 0.0 : 100.0 * static_cast<double>(matched) /
                                     static_cast<double>(joined);
    }
  };
  std::map<std::string, PerLanguage> per_language;
  std::size_t unjoined = 0;  // ids present in only one dataset
};

class JoinError : public std::runtime_error {
 public:
  explicit JoinError(const std::string& id)
      : std::runtime_error("id present in only one dataset: " + id) {}
};

// Percentage of id-joined instances whose token lists are exactly equal,
// per language (language taken from dataset A).
inline TokenizationStats tokenization_match_stats(
    const std::vector<Example>& a, const std::vector<Example>& b,
    bool strict = false) {
  struct Entry {
    const Example* example;
    bool joined = false;
  };
  std::map<std::string, Entry> index;
  for (const Example& ex : b) index.emplace(ex.id, Entry{&ex});
  TokenizationStats stats;
  for (const Example& ex : a) {
    auto it = index.find(ex.id);
    if (it == index.end()) {
      if (strict) throw JoinError(ex.id);
      ++stats.unjoined;
      continue;
    }
    it->second.joined = true;
    auto& lang = stats.per_language[ex.utterance.language];
    ++lang.joined;
    if (ex.utterance.tokens && it->second.example->utterance.tokens &&
        *ex.utterance.tokens == *it->second.example->utterance.tokens)
      ++lang.matched;
  }
  for (const auto& [id, entry] : index) {
    if (entry.joined) continue;
    if (strict) throw JoinError(id);
    ++stats.unjoined;
  }
  return stats;
}

}  // namespace xsp
