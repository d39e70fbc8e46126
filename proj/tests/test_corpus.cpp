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
#include <sstream>

#include "oracles.hpp"
#include "xsp/corpus.hpp"

using xsp::BioSequence;
using xsp::DatasetFormat;
using xsp::Example;
using xsp::FormatError;

TEST_CASE("bio_to_tree chunks BIO tags") {
  BioSequence seq;
  seq.tokens = {"flights", "from", "denver", "to", "boston"};
  seq.tags = {"O", "O", "B-fromloc", "O", "B-toloc"};
  seq.intent = "atis_flight";
  CHECK(xsp::serialize(xsp::bio_to_tree(seq)) ==
        "[IN:ATIS_FLIGHT [SL:FROMLOC denver ] [SL:TOLOC boston ] ]");
}

TEST_CASE("bio_to_tree with all O tags yields a bare intent") {
  BioSequence seq;
  seq.tokens = {"hello", "there"};
  seq.tags = {"O", "O"};
  seq.intent = "X";
  CHECK(xsp::serialize(xsp::bio_to_tree(seq)) == "[IN:X ]");
}

TEST_CASE("maximal chunks combine B and I tags") {
  BioSequence seq;
  seq.tokens = {"x", "y", "z"};
  seq.tags = {"B-a", "I-a", "I-a"};
  seq.intent = "T";
  CHECK(xsp::serialize(xsp::bio_to_tree(seq)) == "[IN:T [SL:A x y z ] ]");
}

TEST_CASE("stray I tags start a new chunk") {
  std::vector<std::string> tags = {"I-a", "I-b", "I-b", "O", "I-a"};
  std::vector<xsp::Chunk> chunks = xsp::extract_chunks(tags);
  REQUIRE(chunks.size() == 3);
  CHECK(chunks[0] == xsp::Chunk{"a", 0, 1});
  CHECK(chunks[1] == xsp::Chunk{"b", 1, 3});
  CHECK(chunks[2] == xsp::Chunk{"a", 4, 5});
}

TEST_CASE("tree flattening recovers the chunks of the tag sequence") {
  std::mt19937 rng(23);
  std::vector<std::string> labels = {"a", "b", "c"};
  std::uniform_int_distribution<int> len(1, 12);
  std::uniform_int_distribution<int> kind(0, 4);
  std::uniform_int_distribution<std::size_t> pick(0, labels.size() - 1);
  for (int trial = 0; trial < 200; ++trial) {
    BioSequence seq;
    int n = len(rng);
    for (int i = 0; i < n; ++i) {
      seq.tokens.push_back("w" + std::to_string(i));
      int k = kind(rng);
      if (k == 0)
        seq.tags.push_back("O");
      else if (k <= 2)
        seq.tags.push_back("B-" + labels[pick(rng)]);
      else
        seq.tags.push_back("I-" + labels[pick(rng)]);
    }
    seq.intent = "T";
    xsp::ParseTree tree = xsp::bio_to_tree(seq);
    std::vector<xsp::Chunk> chunks = xsp::extract_chunks(seq.tags);
    REQUIRE(tree.root.slots.size() == chunks.size());
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      CHECK(tree.root.slots[i].label == xsp::ascii_upper(chunks[i].label));
      std::vector<std::string> expected(
          seq.tokens.begin() + chunks[i].begin,
          seq.tokens.begin() + chunks[i].end);
      CHECK(tree.root.slots[i].tokens == expected);
    }
  }
}

TEST_CASE("canonical format round-trips byte-exactly") {
  std::vector<Example> xs;
  Example a;
  a.id = "ex1";
  a.utterance.raw = "set an 8 am alarm";
  a.utterance.tokens = std::vector<std::string>{"set", "an", "8", "am",
                                                "alarm"};
  a.utterance.language = "en";
  a.parse = xsp::parse("[IN:CREATE_ALARM [SL:DATE_TIME 8 am ] ]");
  xs.push_back(a);
  Example b;
  b.id = "ex2";
  b.utterance.raw = "jouez \xC3\xA0 elvis";
  b.utterance.language = "fr";
  b.split = xsp::Split::test;
  b.provenance = xsp::Provenance::silver_taf;
  xs.push_back(b);

  std::ostringstream out;
  xsp::write_dataset(out, xs);
  std::istringstream in(out.str());
  std::vector<Example> back = xsp::read_all(in, DatasetFormat::canonical);
  REQUIRE(back.size() == 2);
  std::ostringstream out2;
  xsp::write_dataset(out2, back);
  CHECK(out.str() == out2.str());
  CHECK(back[0].parse.has_value());
  CHECK(xsp::serialize(*back[0].parse) ==
        "[IN:CREATE_ALARM [SL:DATE_TIME 8 am ] ]");
  CHECK_FALSE(back[1].parse.has_value());
  CHECK(back[1].split == xsp::Split::test);
}

TEST_CASE("conll blocks read tokens, tags and the intent header") {
  std::string text =
      "# id = f1\n"
      "# intent = atis_flight\n"
      "flights\tO\n"
      "from\tO\n"
      "denver\tB-fromloc\n"
      "\n"
      "# intent = atis_airfare\n"
      "cheap\tO\n"
      "fares\tO\n";
  std::istringstream in(text);
  std::vector<Example> xs = xsp::read_all(in, DatasetFormat::conll_bio,
                                          {.default_language = "en"});
  REQUIRE(xs.size() == 2);
  CHECK(xs[0].id == "f1");
  CHECK(xs[0].utterance.language == "en");
  CHECK(xsp::serialize(*xs[0].parse) ==
        "[IN:ATIS_FLIGHT [SL:FROMLOC denver ] ]");
  CHECK(xs[0].label_case.at("ATIS_FLIGHT") == "atis_flight");
  CHECK(xs[1].id == "b2");
  CHECK(xsp::serialize(*xs[1].parse) == "[IN:ATIS_AIRFARE ]");
}

TEST_CASE("conll block without intent header is a FormatError") {
  std::istringstream in("w\tO\n\n");
  CHECK_THROWS_AS(xsp::read_all(in, DatasetFormat::conll_bio), FormatError);
}

TEST_CASE("mtop tsv respects the column map") {
  std::string text =
      "id1\ten\tset an 8 am alarm\t[IN:CREATE_ALARM [SL:DATE_TIME 8 am ] "
      "]\t{\"tokens\":[\"set\",\"an\",\"8\",\"am\",\"alarm\"]}\n";
  xsp::ReadOptions options;
  options.mtop.id = 0;
  options.mtop.locale = 1;
  options.mtop.utterance = 2;
  options.mtop.parse = 3;
  options.mtop.tokens = 4;
  options.mtop.tokens_encoding = xsp::MtopColumns::TokensEncoding::json;
  std::istringstream in(text);
  std::vector<Example> xs =
      xsp::read_all(in, DatasetFormat::mtop_tsv, options);
  REQUIRE(xs.size() == 1);
  CHECK(xs[0].id == "id1");
  CHECK(xs[0].utterance.language == "en");
  REQUIRE(xs[0].utterance.tokens.has_value());
  CHECK(xs[0].utterance.tokens->size() == 5);
  CHECK(xsp::serialize(*xs[0].parse) ==
        "[IN:CREATE_ALARM [SL:DATE_TIME 8 am ] ]");
}

TEST_CASE("wrong mtop column map raises FormatError in strict mode") {
  std::string text = "id1\tonly two\n";
  std::istringstream in(text);
  CHECK_THROWS_AS(xsp::read_all(in, DatasetFormat::mtop_tsv), FormatError);
}

TEST_CASE("malformed parse column: strict throws, lenient skips and counts") {
  std::string good =
      R"({"id":"a","locale":"en","split":"train","utterance":"x","parse":"[IN:A ]","provenance":"gold"})";
  std::string bad =
      R"({"id":"b","locale":"en","split":"train","utterance":"y","parse":"[IN:A","provenance":"gold"})";
  {
    std::istringstream in(good + "\n" + bad + "\n");
    CHECK_THROWS_AS(xsp::read_all(in, DatasetFormat::canonical), FormatError);
  }
  {
    std::istringstream in(good + "\n" + bad + "\n");
    xsp::DatasetReader reader(in, DatasetFormat::canonical, {.strict = false});
    Example ex;
    std::size_t n = 0;
    while (reader.next(ex)) ++n;
    CHECK(n == 1);
    CHECK(reader.skipped() == 1);
  }
}

TEST_CASE("tokenization stats: identical datasets match 100 percent") {
  std::vector<Example> xs;
  for (int i = 0; i < 5; ++i) {
    Example e;
    e.id = "x" + std::to_string(i);
    e.utterance.language = i % 2 ? "en" : "de";
    e.utterance.tokens = std::vector<std::string>{"a", "b"};
    xs.push_back(e);
  }
  xsp::TokenizationStats stats = xsp::tokenization_match_stats(xs, xs);
  for (const auto& [lang, row] : stats.per_language)
    CHECK(row.percent() == 100.0);
}

TEST_CASE("tokenization stats counts exact token matches per language") {
  std::vector<Example> a, b;
  for (int i = 0; i < 10; ++i) {
    Example ea, eb;
    ea.id = eb.id = "x" + std::to_string(i);
    ea.utterance.language = eb.utterance.language = "fr";
    ea.utterance.tokens = std::vector<std::string>{"w" + std::to_string(i)};
    // First 4 ids agree, the rest differ.
    eb.utterance.tokens = std::vector<std::string>{
        (i < 4 ? "w" + std::to_string(i) : "z" + std::to_string(i))};
    a.push_back(ea);
    b.push_back(eb);
  }
  xsp::TokenizationStats stats = xsp::tokenization_match_stats(a, b);
  CHECK(stats.per_language.at("fr").percent() == 40.0);
}

TEST_CASE("unjoined ids are counted in lenient mode, fatal in strict") {
  std::vector<Example> a(1), b;
  a[0].id = "only-in-a";
  xsp::TokenizationStats stats = xsp::tokenization_match_stats(a, b);
  CHECK(stats.unjoined == 1);
  CHECK_THROWS_AS(xsp::tokenization_match_stats(a, b, true), xsp::JoinError);
}
