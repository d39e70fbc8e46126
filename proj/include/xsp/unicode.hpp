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

// Canonical Unicode normalization (NFC/NFD) and full lowercase mapping.
//
// Tables are generated offline from the Unicode character database (see
// scripts/gen_unicode_tables.py); Hangul syllables are handled
// algorithmically. UTF-8 decoding is permissive: malformed byte sequences
// decode to U+FFFD instead of raising.

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace xsp {
namespace unicode {
namespace detail {

struct IndexedEntry {
  std::uint32_t cp;
  std::uint32_t offset;
  std::uint8_t len;
};

struct CccEntry {
  std::uint32_t cp;
  std::uint8_t ccc;
};

struct CompEntry {
  std::uint64_t key;
  std::uint32_t composed;
};

#include "detail/unicode_data.inc"

constexpr std::uint32_t kHangulSBase = 0xAC00;
constexpr std::uint32_t kHangulLBase = 0x1100;
constexpr std::uint32_t kHangulVBase = 0x1161;
constexpr std::uint32_t kHangulTBase = 0x11A7;
constexpr std::uint32_t kHangulLCount = 19;
constexpr std::uint32_t kHangulVCount = 21;
constexpr std::uint32_t kHangulTCount = 28;
constexpr std::uint32_t kHangulNCount = kHangulVCount * kHangulTCount;
constexpr std::uint32_t kHangulSCount = kHangulLCount * kHangulNCount;

inline const IndexedEntry* find_indexed(const IndexedEntry* begin,
                                        const IndexedEntry* end,
                                        char32_t cp) {
  auto it = std::lower_bound(begin, end, static_cast<std::uint32_t>(cp),
                             [](const IndexedEntry& e, std::uint32_t v) {
                               return e.cp < v;
                             });
  if (it != end && it->cp == static_cast<std::uint32_t>(cp)) return it;
  return nullptr;
}

}  // namespace detail

inline int combining_class(char32_t cp) {
  const auto* begin = std::begin(detail::kCcc);
  const auto* end = std::end(detail::kCcc);
  auto it = std::lower_bound(begin, end, static_cast<std::uint32_t>(cp),
                             [](const detail::CccEntry& e, std::uint32_t v) {
                               return e.cp < v;
                             });
  if (it != end && it->cp == static_cast<std::uint32_t>(cp)) return it->ccc;
  return 0;
}

// ---------------------------------------------------------------------------
// UTF-8

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp <= 0x7F) {
    out.push_back(static_cast<char>(cp));
  } else if (cp <= 0x7FF) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp <= 0xFFFF) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char b0 = static_cast<unsigned char>(text[i]);
    char32_t cp = 0xFFFD;
    std::size_t n = 1;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      n = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      n = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      n = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + n > text.size()) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    bool ok = true;
    for (std::size_t k = 1; k < n; ++k) {
      unsigned char bk = static_cast<unsigned char>(text[i + k]);
      if ((bk & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (bk & 0x3F);
    }
    if (!ok || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += n;
  }
  return out;
}

inline std::string encode_utf8(const std::u32string& cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

// ---------------------------------------------------------------------------
// Normalization

inline void decompose_into(char32_t cp, std::u32string& out) {
  using namespace detail;
  if (cp >= kHangulSBase && cp < kHangulSBase + kHangulSCount) {
    std::uint32_t s = cp - kHangulSBase;
    out.push_back(kHangulLBase + s / kHangulNCount);
    out.push_back(kHangulVBase + (s % kHangulNCount) / kHangulTCount);
    std::uint32_t t = s % kHangulTCount;
    if (t != 0) out.push_back(kHangulTBase + t);
    return;
  }
  if (const auto* e =
          find_indexed(std::begin(kDecomp), std::end(kDecomp), cp)) {
    for (std::uint8_t k = 0; k < e->len; ++k)
      out.push_back(kDecompData[e->offset + k]);
    return;
  }
  out.push_back(cp);
}

// Stable-sorts nonzero-ccc runs into canonical order.
inline void canonical_reorder(std::u32string& cps) {
  for (std::size_t i = 1; i < cps.size(); ++i) {
    int cc = combining_class(cps[i]);
    if (cc == 0) continue;
    std::size_t j = i;
    while (j > 0) {
      int prev = combining_class(cps[j - 1]);
      if (prev == 0 || prev <= cc) break;
      std::swap(cps[j - 1], cps[j]);
      --j;
    }
  }
}

inline bool compose_pair(char32_t a, char32_t b, char32_t& out) {
  using namespace detail;
  // Hangul L+V and LV+T.
  if (a >= kHangulLBase && a < kHangulLBase + kHangulLCount &&
      b >= kHangulVBase && b < kHangulVBase + kHangulVCount) {
    out = kHangulSBase +
          ((a - kHangulLBase) * kHangulVCount + (b - kHangulVBase)) *
              kHangulTCount;
    return true;
  }
  if (a >= kHangulSBase && a < kHangulSBase + kHangulSCount &&
      (a - kHangulSBase) % kHangulTCount == 0 && b > kHangulTBase &&
      b < kHangulTBase + kHangulTCount) {
    out = a + (b - kHangulTBase);
    return true;
  }
  std::uint64_t key = (static_cast<std::uint64_t>(a) << 21) |
                      static_cast<std::uint64_t>(b);
  const auto* begin = std::begin(kCompPair);
  const auto* end = std::end(kCompPair);
  auto it = std::lower_bound(begin, end, key,
                             [](const CompEntry& e, std::uint64_t v) {
                               return e.key < v;
                             });
  if (it != end && it->key == key) {
    out = it->composed;
    return true;
  }
  return false;
}

inline std::u32string nfd(const std::u32string& cps) {
  std::u32string out;
  out.reserve(cps.size() + cps.size() / 4);
  for (char32_t cp : cps) decompose_into(cp, out);
  canonical_reorder(out);
  return out;
}

inline std::u32string nfc(const std::u32string& cps) {
  std::u32string buf = nfd(cps);
  if (buf.empty()) return buf;
  std::u32string out;
  out.reserve(buf.size());
  out.push_back(buf[0]);
  std::size_t starter = combining_class(buf[0]) == 0 ? 0 : std::u32string::npos;
  int last_cc = combining_class(buf[0]);
  for (std::size_t i = 1; i < buf.size(); ++i) {
    char32_t c = buf[i];
    int cc = combining_class(c);
    if (starter != std::u32string::npos &&
        (out.size() - 1 == starter || last_cc < cc)) {
      char32_t composed;
      if (compose_pair(out[starter], c, composed)) {
        out[starter] = composed;
        continue;
      }
    }
    if (cc == 0) starter = out.size();
    out.push_back(c);
    last_cc = cc;
  }
  return out;
}

inline std::u32string to_lower(const std::u32string& cps) {
  using namespace detail;
  std::u32string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) {
    if (const auto* e = find_indexed(std::begin(kLower), std::end(kLower), cp)) {
      for (std::uint8_t k = 0; k < e->len; ++k)
        out.push_back(kLowerData[e->offset + k]);
    } else {
      out.push_back(cp);
    }
  }
  return out;
}

inline std::string nfc(std::string_view text) {
  return encode_utf8(nfc(decode_utf8(text)));
}

inline std::string nfd(std::string_view text) {
  return encode_utf8(nfd(decode_utf8(text)));
}

inline std::string to_lower(std::string_view text) {
  return encode_utf8(to_lower(decode_utf8(text)));
}

}  // namespace unicode

enum class NormForm { none, nfc, nfd };

// Canonical text normalization used across the toolkit: normal form first,
// then (optionally) full lowercase, then the normal form again so the result
// stays normalized. Idempotent.
inline std::string normalize_text(std::string_view text,
                                  NormForm form = NormForm::nfc,
                                  bool lowercase = false) {
  std::u32string cps = unicode::decode_utf8(text);
  switch (form) {
    case NormForm::nfc: cps = unicode::nfc(cps); break;
    case NormForm::nfd: cps = unicode::nfd(cps); break;
    case NormForm::none: break;
  }
  if (lowercase) {
    cps = unicode::to_lower(cps);
    if (form == NormForm::nfc) cps = unicode::nfc(cps);
    if (form == NormForm::nfd) cps = unicode::nfd(cps);
  }
  return unicode::encode_utf8(cps);
}

}  // namespace xsp
