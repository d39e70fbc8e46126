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

// End-to-end tests of the command-line tool over the toy fixture.

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "xsp/alignment.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = XSP_CLI_PATH;
const std::string kFixtures = XSP_FIXTURES_DIR;

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() /
          ("xsp_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  std::string path(const std::string& name) const {
    return (dir / name).string();
  }
};

int run(const std::string& args, const std::string& stdout_path = "") {
  std::string cmd = kCli + " " + args;
  if (!stdout_path.empty()) cmd += " > " + stdout_path + " 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("validate accepts the toy dataset and rejects bad parses") {
  Scratch scratch;
  std::string log = scratch.path("validate.log");
  CHECK(run("validate " + kFixtures + "/toy_train_en.jsonl", log) == 0);
  CHECK(slurp(log).find("0 errors") != std::string::npos);

  std::string bad = scratch.path("bad.jsonl");
  write_file(bad,
             R"({"id":"a","locale":"en","split":"train","utterance":"x",)"
             R"("parse":"[IN:A ]","provenance":"gold"})"
             "\n"
             R"({"id":"b","locale":"en","split":"train","utterance":"y",)"
             R"("parse":"[IN:B","provenance":"gold"})"
             "\n");
  CHECK(run("validate " + bad, log) == 1);
  std::string out = slurp(log);
  CHECK(out.find("1 errors") != std::string::npos);
  CHECK(out.find("line 2") != std::string::npos);
}

TEST_CASE("missing files exit with the config/I-O code") {
  Scratch scratch;
  CHECK(run("validate /nonexistent/nope.jsonl",
            scratch.path("x.log")) == 2);
}

TEST_CASE("align-train then align-apply produce identity-ish links") {
  Scratch scratch;
  std::string model = scratch.path("toy.model");
  CHECK(run("align-train --corpus " + kFixtures +
                "/toy_parallel.tsv --output " + model,
            scratch.path("train.log")) == 0);
  std::string links = scratch.path("links.txt");
  CHECK(run("align-apply --model " + model + " --corpus " + kFixtures +
                "/toy_parallel.tsv --output " + links + " --mode hmm",
            scratch.path("apply.log")) == 0);
  std::string first_line;
  {
    std::ifstream in(links);
    std::getline(in, first_line);
  }
  CHECK(first_line == "0-0 1-1 2-2 3-3 4-4");
}

TEST_CASE("tap produces silver data deterministically") {
  Scratch scratch;
  std::string model = scratch.path("toy.model");
  REQUIRE(run("align-train --corpus " + kFixtures +
                  "/toy_parallel.tsv --output " + model,
              scratch.path("train.log")) == 0);
  std::string silver1 = scratch.path("silver1.jsonl");
  std::string silver2 = scratch.path("silver2.jsonl");
  std::string tap_args = "tap --sources " + kFixtures +
                         "/toy_train_en.jsonl --translations " + kFixtures +
                         "/toy_translations_xx.jsonl --model " + model +
                         " --mode hmm --output ";
  REQUIRE(run(tap_args + silver1 + " --report-out " +
                  scratch.path("report.json"),
              scratch.path("tap1.log")) == 0);
  REQUIRE(run(tap_args + silver2, scratch.path("tap2.log")) == 0);
  CHECK(slurp(silver1) == slurp(silver2));
  // Spot-check the first silver record against the expected substitution.
  std::string expected_first = slurp(kFixtures + "/toy_gold_silver_xx.jsonl");
  std::string got = slurp(silver1);
  CHECK(got.substr(0, got.find('\n')) ==
        expected_first.substr(0, expected_first.find('\n')));
  std::string report = slurp(scratch.path("report.json"));
  CHECK(report.find("\"kept\": 20") != std::string::npos);
}

TEST_CASE("taf pipeline: build, fill, validate, assemble") {
  Scratch scratch;
  std::string model = scratch.path("toy.model");
  REQUIRE(run("align-train --corpus " + kFixtures +
                  "/toy_parallel.tsv --output " + model,
              scratch.path("train.log")) == 0);

  std::string instances = scratch.path("instances.jsonl");
  REQUIRE(run("taf-build --dataset " + kFixtures +
                  "/toy_train_en.jsonl --output " + instances,
              scratch.path("build.log")) == 0);
  std::string first;
  {
    std::ifstream in(instances);
    std::getline(in, first);
  }
  CHECK(first.find("play some elvis for me | [IN:PLAY_MUSIC "
                   "[SL:MUSIC_ARTIST_NAME ] ]") != std::string::npos);

  std::string outputs = scratch.path("outputs.jsonl");
  REQUIRE(run("taf-fill --dataset " + kFixtures +
                  "/toy_train_en.jsonl --translations " + kFixtures +
                  "/toy_translations_xx.jsonl --backend reference --model " +
                  model + " --mode hmm --output " + outputs,
              scratch.path("fill.log")) == 0);

  std::string verdicts = scratch.path("verdicts.jsonl");
  REQUIRE(run("taf-validate --outputs " + outputs + " --output " + verdicts +
                  " --report-out " + scratch.path("verdicts.json"),
              scratch.path("validate.log")) == 0);
  CHECK(slurp(verdicts).find("\"class\":\"ok\"") != std::string::npos);

  std::string silver = scratch.path("taf_silver.jsonl");
  REQUIRE(run("taf-assemble --outputs " + outputs + " --verdicts " +
                  verdicts + " --dataset " + kFixtures +
                  "/toy_train_en.jsonl --output " + silver,
              scratch.path("assemble.log")) == 0);
  std::string assembled = slurp(silver);
  CHECK(assembled.find("\"provenance\":\"silver-taf\"") != std::string::npos);
  CHECK(assembled.find("[SL:MUSIC_ARTIST_NAME sivle ]") != std::string::npos);

  REQUIRE(run("analyze-errors --verdicts " + verdicts,
              scratch.path("analyze.log")) == 0);
  CHECK(slurp(scratch.path("analyze.log")).find("total") !=
        std::string::npos);
}

TEST_CASE("echo backend and replay backend work through the CLI") {
  Scratch scratch;
  std::string outputs = scratch.path("echo_outputs.jsonl");
  REQUIRE(run("taf-fill --dataset " + kFixtures +
                  "/toy_train_en.jsonl --translations " + kFixtures +
                  "/toy_translations_xx.jsonl --backend echo --output " +
                  outputs,
              scratch.path("fill.log")) == 0);
  CHECK(slurp(outputs).find("\"output\":\"[IN:PLAY_MUSIC "
                            "[SL:MUSIC_ARTIST_NAME ] ]\"") !=
        std::string::npos);

  // Replay: echo outputs back through a plain-text file.
  std::string replay_file = scratch.path("replay.txt");
  {
    std::ofstream out(replay_file);
    for (int i = 0; i < 20; ++i) out << "[IN:PLAY_MUSIC ]\n";
  }
  std::string outputs2 = scratch.path("replay_outputs.jsonl");
  REQUIRE(run("taf-fill --dataset " + kFixtures +
                  "/toy_train_en.jsonl --translations " + kFixtures +
                  "/toy_translations_xx.jsonl --backend replay:" +
                  replay_file + " --output " + outputs2,
              scratch.path("fill2.log")) == 0);
  CHECK(slurp(outputs2).find("\"output\":\"[IN:PLAY_MUSIC ]\"") !=
        std::string::npos);
}

TEST_CASE("eval scores gold against itself at 100") {
  Scratch scratch;
  std::string log = scratch.path("eval.log");
  REQUIRE(run("eval --gold " + kFixtures + "/toy_train_en.jsonl --pred " +
                  kFixtures + "/toy_train_en.jsonl --report-out " +
                  scratch.path("metrics.json"),
              log) == 0);
  std::string out = slurp(log);
  CHECK(out.find("100.00") != std::string::npos);
  std::string metrics = slurp(scratch.path("metrics.json"));
  CHECK(metrics.find("\"exact_match\": 1.0") != std::string::npos);
}

TEST_CASE("stats-tokenization reports per-language match rates") {
  Scratch scratch;
  std::string log = scratch.path("stats.log");
  REQUIRE(run("stats-tokenization --a " + kFixtures +
                  "/toy_train_en.jsonl --b " + kFixtures +
                  "/toy_train_en.jsonl",
              log) == 0);
  CHECK(slurp(log).find("100.00") != std::string::npos);
}

TEST_CASE("dry-run prints the resolved config and writes nothing") {
  Scratch scratch;
  std::string out = scratch.path("dry.log");
  std::string target = scratch.path("never_written.jsonl");
  REQUIRE(run("--dry-run taf-build --dataset " + kFixtures +
                  "/toy_train_en.jsonl --output " + target,
              out) == 0);
  CHECK(slurp(out).find("\"command\": \"taf-build\"") != std::string::npos);
  CHECK_FALSE(fs::exists(target));
}

TEST_CASE("config file values apply and flags override them") {
  Scratch scratch;
  std::string config = scratch.path("config.json");
  write_file(config, R"({"align-train": {"ibm1_iterations": 2,)"
                     R"( "hmm_iterations": 0}})");
  std::string out = scratch.path("dry.log");
  REQUIRE(run("--config " + config + " --dry-run align-train --corpus c "
              "--output o",
              out) == 0);
  std::string text = slurp(out);
  CHECK(text.find("\"ibm1_iterations\": 2") != std::string::npos);
  REQUIRE(run("--config " + config + " --dry-run align-train --corpus c "
              "--output o --ibm1-iterations 7",
              out) == 0);
  CHECK(slurp(out).find("\"ibm1_iterations\": 7") != std::string::npos);
}

TEST_CASE("tap via the CLI reproduces the trimmed fixture value") {
  Scratch scratch;
  // Hand-built lexicon where the French preposition aligns into the artist
  // span; saved through the model format and replayed through the CLI.
  xsp::AlignmentModel model;
  model.source_vocab.add(xsp::kNullWord);
  for (const char* w : {"Play", "some", "Elvis", "for", "me"})
    model.source_vocab.add(w);
  for (const char* w : {"Jouez", "\xC3\xA0", "Elvis", "pour", "moi"})
    model.target_vocab.add(w);
  model.lexical.assign(model.source_vocab.size(),
                       std::vector<double>(model.target_vocab.size(), 0.001));
  auto set = [&](const char* s, const char* t, double p) {
    model.lexical[model.source_vocab.find(s)][model.target_vocab.find(t)] = p;
  };
  set("Play", "Jouez", 0.8);
  set("Elvis", "\xC3\xA0", 0.5);
  set("Elvis", "Elvis", 0.9);
  set("for", "pour", 0.8);
  set("me", "moi", 0.8);
  std::string model_path = scratch.path("elvis.model");
  {
    std::ofstream out(model_path);
    xsp::save_model(out, model);
  }
  write_file(scratch.path("sources.jsonl"),
             R"({"id":"elvis","locale":"en","split":"train",)"
             R"("utterance":"Play some Elvis for me",)"
             R"("tokens":["Play","some","Elvis","for","me"],)"
             R"("parse":"[IN:PLAY_MUSIC [SL:MUSIC_ARTIST_NAME Elvis ] ]",)"
             R"("provenance":"gold"})"
             "\n");
  write_file(scratch.path("translations.jsonl"),
             R"({"id":"elvis","locale":"fr","split":"train",)"
             "\"utterance\":\"Jouez \xC3\xA0 Elvis pour moi\","
             "\"tokens\":[\"Jouez\",\"\xC3\xA0\",\"Elvis\",\"pour\",\"moi\"],"
             R"("provenance":"gold"})"
             "\n");
  std::string silver = scratch.path("silver.jsonl");
  REQUIRE(run("tap --sources " + scratch.path("sources.jsonl") +
                  " --translations " + scratch.path("translations.jsonl") +
                  " --model " + model_path + " --mode model1 --output " +
                  silver,
              scratch.path("tap.log")) == 0);
  CHECK(slurp(silver).find("[SL:MUSIC_ARTIST_NAME Elvis ]") !=
        std::string::npos);
  // Without trimming, the preposition stays in the span.
  std::string raw = scratch.path("silver_raw.jsonl");
  REQUIRE(run("tap --sources " + scratch.path("sources.jsonl") +
                  " --translations " + scratch.path("translations.jsonl") +
                  " --model " + model_path +
                  " --mode model1 --no-pos-trim --output " + raw,
              scratch.path("tap2.log")) == 0);
  CHECK(slurp(raw).find("[SL:MUSIC_ARTIST_NAME \xC3\xA0 Elvis ]") !=
        std::string::npos);
}

TEST_CASE("mtop import with a wrong column map reports the line") {
  Scratch scratch;
  write_file(scratch.path("bad.tsv"), "id1\tonly two columns\n");
  std::string log = scratch.path("mtop.log");
  CHECK(run("validate " + scratch.path("bad.tsv") + " --format mtop-tsv",
            log) == 1);
  CHECK(slurp(log).find("line 1") != std::string::npos);
}

TEST_CASE("seeded shuffling is reproducible and changes only the order") {
  Scratch scratch;
  std::string model = scratch.path("toy.model");
  REQUIRE(run("align-train --corpus " + kFixtures +
                  "/toy_parallel.tsv --output " + model,
              scratch.path("train.log")) == 0);
  std::string base = "tap --sources " + kFixtures +
                     "/toy_train_en.jsonl --translations " + kFixtures +
                     "/toy_translations_xx.jsonl --model " + model +
                     " --mode hmm ";
  std::string s1 = scratch.path("s1.jsonl");
  std::string s2 = scratch.path("s2.jsonl");
  std::string s3 = scratch.path("s3.jsonl");
  REQUIRE(run(base + "--shuffle --seed 9 --output " + s1,
              scratch.path("t1.log")) == 0);
  REQUIRE(run(base + "--shuffle --seed 9 --output " + s2,
              scratch.path("t2.log")) == 0);
  REQUIRE(run(base + "--output " + s3, scratch.path("t3.log")) == 0);
  CHECK(slurp(s1) == slurp(s2));
  // Same multiset of lines as the unshuffled run.
  auto lines = [](const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) out.push_back(line);
    std::sort(out.begin(), out.end());
    return out;
  };
  CHECK(lines(slurp(s1)) == lines(slurp(s3)));
  CHECK(slurp(s1) != slurp(s3));
}
