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

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "xsp/unicode.hpp"

namespace {

struct Case {
  std::u32string input, nfc, nfd, lower;
};

std::u32string from_hex(const std::string& field) {
  std::u32string out;
  if (field == "-") return out;
  std::istringstream is(field);
  std::string tok;
  while (is >> tok)
    out.push_back(static_cast<char32_t>(std::stoul(tok, nullptr, 16)));
  return out;
}

std::vector<Case> load_cases() {
  std::ifstream in(std::string(XSP_FIXTURES_DIR) + "/unicode_cases.tsv");
  REQUIRE(in.good());
  std::vector<Case> cases;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    REQUIRE(fields.size() == 4);
    cases.push_back({from_hex(fields[0]), from_hex(fields[1]),
                     from_hex(fields[2]), from_hex(fields[3])});
  }
  REQUIRE(cases.size() > 300);
  return cases;
}

}  // namespace

TEST_CASE("nfc/nfd/lowercase match the reference fixture") {
  for (const Case& c : load_cases()) {
    CHECK(xsp::unicode::nfc(c.input) == c.nfc);
    CHECK(xsp::unicode::nfd(c.input) == c.nfd);
    std::string text = xsp::unicode::encode_utf8(c.input);
    CHECK(xsp::normalize_text(text, xsp::NormForm::nfc, true) ==
          xsp::unicode::encode_utf8(c.lower));
  }
}

TEST_CASE("normalization is idempotent") {
  for (const Case& c : load_cases()) {
    std::string text = xsp::unicode::encode_utf8(c.input);
    std::string once = xsp::normalize_text(text, xsp::NormForm::nfc, false);
    CHECK(xsp::normalize_text(once, xsp::NormForm::nfc, false) == once);
    std::string low = xsp::normalize_text(text, xsp::NormForm::nfc, true);
    CHECK(xsp::normalize_text(low, xsp::NormForm::nfc, true) == low);
  }
}

TEST_CASE("utf8 round-trips") {
  for (const Case& c : load_cases()) {
    std::string text = xsp::unicode::encode_utf8(c.input);
    CHECK(xsp::unicode::decode_utf8(text) == c.input);
  }
}

TEST_CASE("already-normalized text is a fixed point") {
  CHECK(xsp::normalize_text("8 am") == "8 am");
}

TEST_CASE("decomposed accents compose under nfc") {
  // e + combining acute -> precomposed form
  CHECK(xsp::normalize_text("e\xCC\x81") == "\xC3\xA9");
}

TEST_CASE("lowercasing applies the standard mapping") {
  CHECK(xsp::normalize_text("Jouez \xC3\xA0 Elvis", xsp::NormForm::nfc, true) ==
        "jouez \xC3\xA0 elvis");
  CHECK(xsp::normalize_text("MADRID", xsp::NormForm::nfc, true) == "madrid");
}

TEST_CASE("malformed utf8 decodes to replacement characters") {
  std::u32string cps = xsp::unicode::decode_utf8("a\xFF\xC3(");
  REQUIRE(cps.size() == 4);
  CHECK(cps[0] == U'a');
  CHECK(cps[1] == 0xFFFD);
  CHECK(cps[2] == 0xFFFD);
  CHECK(cps[3] == U'(');
}
