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

// Coarse part-of-speech tagging behind a pluggable interface. The reference
// implementation is a lexicon tagger over closed word lists of prepositions
// and determiners per language, which is all the slot-boundary trimming
// needs.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xsp/unicode.hpp"

namespace xsp {

enum class PosTag { adp, det, punct, other };

inline std::string to_string(PosTag tag) {
  switch (tag) {
    case PosTag::adp: return "ADP";
    case PosTag::det: return "DET";
    case PosTag::punct: return "PUNCT";
    case PosTag::other: return "OTHER";
  }
  return "OTHER";
}

inline std::optional<PosTag> pos_from_string(const std::string& s) {
  if (s == "ADP") return PosTag::adp;
  if (s == "DET") return PosTag::det;
  if (s == "PUNCT") return PosTag::punct;
  if (s == "OTHER") return PosTag::other;
  return std::nullopt;
}

struct PosTaggedUtterance {
  std::vector<std::string> tokens;
  std::vector<PosTag> tags;
};

struct PosTagger {
  virtual ~PosTagger() = default;
  virtual PosTaggedUtterance tag(const std::vector<std::string>& tokens,
                                 const std::string& language) const = 0;
};

// Lexicon tagger: per-language word lists; tokens made only of punctuation
// characters tag PUNCT; everything else OTHER. Lookups are case-insensitive
// after NFC.
class LexiconPosTagger final : public PosTagger {
 public:
  void add(const std::string& language, const std::string& word, PosTag tag) {
    lexicon_[primary_tag(language)][normalize_text(word, NormForm::nfc, true)] =
        tag;
  }

  PosTaggedUtterance tag(const std::vector<std::string>& tokens,
                         const std::string& language) const override {
    PosTaggedUtterance out;
    out.tokens = tokens;
    out.tags.reserve(tokens.size());
    const std::map<std::string, PosTag>* words = nullptr;
    auto it = lexicon_.find(primary_tag(language));
    if (it != lexicon_.end()) words = &it->second;
    for (const std::string& token : tokens) {
      if (is_punct(token)) {
        out.tags.push_back(PosTag::punct);
        continue;
      }
      if (words) {
        auto w = words->find(normalize_text(token, NormForm::nfc, true));
        if (w != words->end()) {
          out.tags.push_back(w->second);
          continue;
        }
      }
      out.tags.push_back(PosTag::other);
    }
    return out;
  }

  // Word lists for the languages the fixtures use.
  static LexiconPosTagger with_default_lexicon() {
    LexiconPosTagger t;
    auto add_all = [&](const char* lang, PosTag tag,
                       std::initializer_list<const char*> words) {
      for (const char* w : words) t.add(lang, w, tag);
    };
    add_all("en", PosTag::adp,
            {"to", "for", "from", "at", "in", "on", "of", "with", "by"});
    add_all("en", PosTag::det, {"the", "a", "an", "this", "that"});
    add_all("fr", PosTag::adp,
            {"à", "au", "aux", "de", "du", "des", "en", "pour", "sur",
             "dans", "par", "chez", "avec"});
    add_all("fr", PosTag::det, {"le", "la", "les", "un", "une", "l'"});
    add_all("es", PosTag::adp,
            {"a", "de", "en", "para", "por", "con", "sobre", "al", "del"});
    add_all("es", PosTag::det, {"el", "la", "los", "las", "un", "una"});
    add_all("de", PosTag::adp,
            {"zu", "von", "mit", "auf", "in", "an", "für", "aus", "bei"});
    add_all("de", PosTag::det,
            {"der", "die", "das", "ein", "eine", "dem", "den"});
    add_all("it", PosTag::adp,
            {"a", "di", "da", "in", "su", "per", "con", "al", "del"});
    add_all("it", PosTag::det, {"il", "lo", "la", "i", "gli", "le", "un",
                                "una"});
    return t;
  }

 private:
  static std::string primary_tag(const std::string& language) {
    std::size_t dash = language.find_first_of("-_");
    std::string primary =
        dash == std::string::npos ? language : language.substr(0, dash);
    return normalize_text(primary, NormForm::nfc, true);
  }

  static bool is_punct(const std::string& token) {
    if (token.empty()) return false;
    for (char32_t cp : unicode::decode_utf8(token)) {
      bool punct = (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
                   (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E) ||
                   cp == 0x00A1 || cp == 0x00BF || (cp >= 0x2000 && cp <= 0x206F);
      if (!punct) return false;
    }
    return true;
  }

  std::map<std::string, std::map<std::string, PosTag>> lexicon_;
};

}  // namespace xsp
