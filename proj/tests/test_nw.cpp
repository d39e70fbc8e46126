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

#include <random>
#include <string>

#include "oracles.hpp"
#include "xsp/needleman_wunsch.hpp"

TEST_CASE("identical sequences align on the diagonal") {
  std::string a = "abc";
  xsp::NwResult r = xsp::needleman_wunsch(a, a);
  CHECK(r.score == 3.0);
  REQUIRE(r.pairs.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(r.pairs[i].first == i);
    CHECK(r.pairs[i].second == i);
  }
}

TEST_CASE("one gap one match") {
  std::string a = "ab", b = "b";
  xsp::NwResult r = xsp::needleman_wunsch(a, b);
  CHECK(r.score == 0.0);
  REQUIRE(r.pairs.size() == 1);
  CHECK(r.pairs[0] == std::pair<std::size_t, std::size_t>{1, 0});
}

TEST_CASE("empty sequences produce all-gap alignments") {
  std::string empty, b = "xyz";
  xsp::NwResult r = xsp::needleman_wunsch(empty, b);
  CHECK(r.score == -3.0);
  CHECK(r.pairs.empty());
  xsp::NwResult rr = xsp::needleman_wunsch(empty, empty);
  CHECK(rr.score == 0.0);
}

TEST_CASE("optimal score matches exhaustive enumeration") {
  std::mt19937 rng(31);
  std::uniform_int_distribution<int> len(0, 8);
  std::uniform_int_distribution<int> ch(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    std::string a, b;
    int n = len(rng), m = len(rng);
    for (int i = 0; i < n; ++i) a.push_back(static_cast<char>('a' + ch(rng)));
    for (int i = 0; i < m; ++i) b.push_back(static_cast<char>('a' + ch(rng)));
    double expected = oracles::brute_force_nw_score(a, b);
    xsp::NwResult r = xsp::needleman_wunsch(a, b);
    CHECK(r.score == expected);
  }
}

TEST_CASE("score is symmetric under swapping inputs") {
  std::mt19937 rng(37);
  std::uniform_int_distribution<int> len(0, 10);
  std::uniform_int_distribution<int> ch(0, 2);
  for (int trial = 0; trial < 100; ++trial) {
    std::string a, b;
    int n = len(rng), m = len(rng);
    for (int i = 0; i < n; ++i) a.push_back(static_cast<char>('a' + ch(rng)));
    for (int i = 0; i < m; ++i) b.push_back(static_cast<char>('a' + ch(rng)));
    CHECK(xsp::needleman_wunsch(a, b).score ==
          xsp::needleman_wunsch(b, a).score);
  }
}

TEST_CASE("traceback prefers diagonal over gaps on ties") {
  // "ab" vs "ab" with mismatch == gap: diagonal-first traceback keeps both
  // pairs even where gap routes tie.
  xsp::NwScoring scoring{1.0, -1.0, -1.0};
  xsp::NwResult r = xsp::needleman_wunsch(std::string("ax"),
                                          std::string("ay"), scoring);
  CHECK(r.score == 0.0);
  REQUIRE(r.pairs.size() == 2);
}
