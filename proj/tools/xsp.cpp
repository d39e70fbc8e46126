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

// Command-line front end. Subcommands wire the library into batch pipelines
// over line-oriented files; outputs are byte-deterministic for identical
// (config, inputs).
//
// Exit codes: 0 success, 1 validation failures, 2 config or I/O errors.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "xsp/alignment.hpp"
#include "xsp/corpus.hpp"
#include "xsp/eval.hpp"
#include "xsp/parse_tree.hpp"
#include "xsp/pos.hpp"
#include "xsp/taf.hpp"
#include "xsp/tap.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;

struct CliError : std::runtime_error {
  explicit CliError(const std::string& what) : std::runtime_error(what) {}
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError("cannot open for reading: " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CliError("cannot open for writing: " + path);
  return out;
}

// ---------------------------------------------------------------------------
// Config file support: a JSON object per subcommand; command-line flags
// override config keys.

struct ConfigFile {
  ordered_json root = ordered_json::object();

  static ConfigFile load(const std::string& path) {
    ConfigFile cfg;
    if (path.empty()) return cfg;
    std::ifstream in = open_in(path);
    cfg.root = ordered_json::parse(in, nullptr, false);
    if (cfg.root.is_discarded())
      throw CliError("config file is not valid JSON: " + path);
    return cfg;
  }

  ordered_json section(const std::string& name) const {
    if (root.contains(name) && root.at(name).is_object())
      return root.at(name);
    return ordered_json::object();
  }
};

template <typename T>
void apply_config(const ordered_json& section, const CLI::Option* opt,
                  const std::string& key, T& value) {
  if (opt != nullptr && opt->count() > 0) return;  // flag wins
  if (!section.contains(key)) return;
  value = section.at(key).get<T>();
}

ordered_json resolved_config(
    const std::string& command,
    const std::vector<std::pair<std::string, ordered_json>>& keys) {
  ordered_json j;
  j["command"] = command;
  for (const auto& [k, v] : keys) j[k] = v;
  return j;
}

xsp::DatasetFormat parse_format(const std::string& name) {
  auto f = xsp::format_from_string(name);
  if (!f) throw CliError("unknown dataset format: " + name);
  return *f;
}

xsp::ReadOptions read_options_from(const ordered_json& section,
                                   const std::string& format) {
  xsp::ReadOptions opts;
  if (section.contains("strict")) opts.strict = section.at("strict");
  if (section.contains("default_language"))
    opts.default_language = section.at("default_language");
  if (format == "mtop-tsv" && section.contains("mtop_columns")) {
    const auto& m = section.at("mtop_columns");
    opts.mtop.id = m.value("id", 0);
    opts.mtop.utterance = m.value("utterance", 1);
    opts.mtop.parse = m.value("parse", 2);
    opts.mtop.locale = m.value("locale", 3);
    opts.mtop.tokens = m.value("tokens", -1);
    if (m.value("tokens_encoding", std::string("space")) == "json")
      opts.mtop.tokens_encoding = xsp::MtopColumns::TokensEncoding::json;
  }
  if (section.contains("split")) {
    if (auto s = xsp::split_from_string(section.at("split")))
      opts.split_override = *s;
  }
  return opts;
}

// Translations are canonical records without parses, keyed by id.
std::map<std::string, xsp::Utterance> load_translations(
    const std::string& path) {
  std::ifstream in = open_in(path);
  std::map<std::string, xsp::Utterance> out;
  for (const xsp::Example& ex :
       xsp::read_all(in, xsp::DatasetFormat::canonical))
    out[ex.id] = ex.utterance;
  return out;
}

xsp::ParallelCorpus load_parallel(const std::string& path) {
  std::ifstream in = open_in(path);
  xsp::ParallelCorpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw CliError("parallel corpus line " + std::to_string(lineno) +
                     " has no tab separator");
    xsp::SentencePair pair;
    pair.source = xsp::split_whitespace(line.substr(0, tab));
    pair.target = xsp::split_whitespace(line.substr(tab + 1));
    corpus.pairs.push_back(std::move(pair));
  }
  return corpus;
}

xsp::LexiconPosTagger load_pos_tagger(const std::string& path) {
  if (path.empty()) return xsp::LexiconPosTagger::with_default_lexicon();
  std::ifstream in = open_in(path);
  xsp::LexiconPosTagger tagger;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream is(line);
    std::string lang, word, tag;
    if (!(is >> lang >> word >> tag))
      throw CliError("bad POS lexicon line " + std::to_string(lineno));
    auto t = xsp::pos_from_string(tag);
    if (!t) throw CliError("bad POS tag on line " + std::to_string(lineno));
    tagger.add(lang, word, *t);
  }
  return tagger;
}

void write_report(const std::string& path, const ordered_json& j) {
  if (path.empty()) return;
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

xsp::AlignMode parse_mode(const std::string& name) {
  if (name == "model1") return xsp::AlignMode::model1;
  if (name == "hmm") return xsp::AlignMode::hmm;
  throw CliError("unknown alignment mode: " + name);
}

// Filler instance/output records: one JSON object per line.
ordered_json instance_to_json(const xsp::FillerInstance& inst) {
  ordered_json j;
  j["id"] = inst.source_id;
  j["language"] = inst.language;
  j["input"] = inst.input;
  if (inst.target) j["target"] = *inst.target;
  return j;
}

xsp::FillerInstance instance_from_json(const ordered_json& j) {
  xsp::FillerInstance inst;
  inst.source_id = j.value("id", std::string());
  inst.language = j.value("language", std::string());
  inst.input = j.at("input").get<std::string>();
  if (j.contains("target")) inst.target = j.at("target").get<std::string>();
  return inst;
}

std::vector<ordered_json> read_jsonl(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<ordered_json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw CliError(path + ": invalid JSON on line " +
                     std::to_string(lineno));
    out.push_back(std::move(j));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subcommand implementations

int cmd_validate(const std::string& dataset, const std::string& format_name,
                 const ordered_json& section) {
  xsp::ReadOptions opts = read_options_from(section, format_name);
  opts.strict = true;  // report every record failure with its line
  std::ifstream in = open_in(dataset);
  xsp::DatasetReader reader(in, parse_format(format_name), opts);
  std::size_t records = 0, errors = 0;
  std::set<std::string> seen_ids;
  xsp::Example ex;
  while (true) {
    try {
      if (!reader.next(ex)) break;
    } catch (const xsp::FormatError& e) {
      std::cout << "error: " << e.what() << '\n';
      ++errors;
      continue;
    }
    ++records;
    if (!seen_ids.insert(ex.id).second) {
      std::cout << "error: duplicate id '" << ex.id << "' (record "
                << records << ")\n";
      ++errors;
    }
    if (ex.parse) {
      for (const std::string& problem : xsp::validate(*ex.parse)) {
        std::cout << "error: id '" << ex.id << "': " << problem << '\n';
        ++errors;
      }
    }
    if (ex.utterance.tokens && !ex.utterance.retokenized) {
      std::string joined = xsp::join(*ex.utterance.tokens);
      std::string normalized =
          xsp::join(xsp::split_whitespace(ex.utterance.raw));
      if (joined != normalized) {
        std::cout << "error: id '" << ex.id
                  << "': tokens disagree with utterance and record is not "
                     "flagged retokenized\n";
        ++errors;
      }
    }
    if (ex.parse && ex.utterance.tokens && !ex.unanchored) {
      std::set<std::string> token_set(ex.utterance.tokens->begin(),
                                      ex.utterance.tokens->end());
      for (const xsp::SlotNode* slot : xsp::leaf_slots(*ex.parse)) {
        for (const std::string& tok : slot->tokens) {
          if (!token_set.count(tok)) {
            std::cout << "error: id '" << ex.id << "': slot token '" << tok
                      << "' not in token list and record is not flagged "
                         "unanchored\n";
            ++errors;
          }
        }
      }
    }
  }
  std::cout << records << " records, " << errors << " errors\n";
  return errors > 0 ? kExitValidation : kExitOk;
}

int cmd_align_train(const std::string& corpus_path, const std::string& output,
                    std::size_t ibm1_iterations, std::size_t hmm_iterations,
                    int window, double null_transition, bool no_hmm) {
  xsp::ParallelCorpus corpus = load_parallel(corpus_path);
  std::vector<double> ll;
  xsp::AlignmentModel model = xsp::train_ibm1(corpus, ibm1_iterations, &ll);
  std::cout << "lexical model: " << ibm1_iterations << " iterations, "
            << "log-likelihood " << ll.front() << " -> " << ll.back() << '\n';
  if (!no_hmm && hmm_iterations > 0) {
    std::vector<double> hll;
    xsp::HmmOptions options;
    options.window = window;
    options.null_transition = null_transition;
    model = xsp::train_hmm(corpus, hmm_iterations, model, options, &hll);
    std::cout << "hmm model: " << hmm_iterations << " iterations, "
              << "log-likelihood " << hll.front() << " -> " << hll.back()
              << '\n';
  }
  std::ofstream out = open_out(output);
  xsp::save_model(out, model);
  return kExitOk;
}

int cmd_align_apply(const std::string& model_path,
                    const std::string& corpus_path, const std::string& output,
                    const std::string& mode_name) {
  std::ifstream min = open_in(model_path);
  xsp::AlignmentModel model = xsp::load_model(min);
  xsp::AlignMode mode = parse_mode(mode_name);
  if (mode == xsp::AlignMode::hmm && !model.has_hmm)
    throw CliError("model has no HMM parameters; use --mode model1");
  xsp::ParallelCorpus corpus = load_parallel(corpus_path);
  std::ofstream out = open_out(output);
  for (const xsp::SentencePair& pair : corpus.pairs) {
    xsp::AlignmentLinks links =
        xsp::viterbi_align(model, pair.source, pair.target, mode);
    for (std::size_t i = 0; i < links.links.size(); ++i) {
      if (i) out << ' ';
      out << links.links[i].first << '-' << links.links[i].second;
    }
    out << '\n';
  }
  return kExitOk;
}

int cmd_tap(const std::string& sources_path, const std::string& format_name,
            const std::string& translations_path,
            const std::string& model_path, const std::string& output,
            const std::string& report_out, const std::string& pos_lexicon,
            const xsp::TapConfig& config, const ordered_json& section,
            unsigned shuffle_seed, bool shuffle) {
  std::ifstream sin = open_in(sources_path);
  std::vector<xsp::Example> sources =
      xsp::read_all(sin, parse_format(format_name),
                    read_options_from(section, format_name));
  std::map<std::string, xsp::Utterance> translations =
      load_translations(translations_path);
  std::ifstream min = open_in(model_path);
  xsp::AlignmentModel model = xsp::load_model(min);
  if (config.align_mode == xsp::AlignMode::hmm && !model.has_hmm)
    throw CliError("model has no HMM parameters; use --mode model1");
  xsp::LexiconPosTagger tagger = load_pos_tagger(pos_lexicon);

  xsp::TapResult result =
      xsp::run_tap(sources, translations, model, tagger, config);
  if (shuffle) {
    std::mt19937 rng(shuffle_seed);
    std::shuffle(result.silver.begin(), result.silver.end(), rng);
  }
  std::ofstream out = open_out(output);
  xsp::write_dataset(out, result.silver);
  std::cout << result.report.format_table();

  ordered_json jr;
  jr["input"] = result.report.input;
  jr["kept"] = result.report.kept;
  for (const auto& [reason, count] : result.report.rejected)
    jr["rejected"][xsp::to_string(reason)] = count;
  jr["unanchored"] = result.report.unanchored;
  jr["missing_translation"] = result.report.missing_translation;
  write_report(report_out, jr);
  return kExitOk;
}

int cmd_taf_build(const std::string& dataset_path,
                  const std::string& format_name, const std::string& output,
                  const std::string& separator, const ordered_json& section) {
  std::ifstream in = open_in(dataset_path);
  std::vector<xsp::Example> examples =
      xsp::read_all(in, parse_format(format_name),
                    read_options_from(section, format_name));
  std::ofstream out = open_out(output);
  std::size_t built = 0, skipped = 0;
  for (const xsp::Example& ex : examples) {
    if (!ex.parse) {
      ++skipped;
      continue;
    }
    out << instance_to_json(xsp::build_filler_train(ex, separator)).dump()
        << '\n';
    ++built;
  }
  std::cout << built << " instances";
  if (skipped) std::cout << " (" << skipped << " records without parses)";
  std::cout << '\n';
  return kExitOk;
}

int cmd_taf_fill(const std::string& dataset_path,
                 const std::string& format_name,
                 const std::string& translations_path,
                 const std::string& backend, const std::string& model_path,
                 const std::string& mode_name, const std::string& output,
                 const std::string& separator, const ordered_json& section) {
  std::ifstream in = open_in(dataset_path);
  std::vector<xsp::Example> examples =
      xsp::read_all(in, parse_format(format_name),
                    read_options_from(section, format_name));
  std::map<std::string, xsp::Utterance> translations =
      load_translations(translations_path);

  std::vector<xsp::FillerInstance> instances;
  std::size_t missing = 0;
  for (const xsp::Example& ex : examples) {
    if (!ex.parse) continue;
    try {
      instances.push_back(
          xsp::build_filler_infer(translations, ex, separator));
    } catch (const xsp::MissingTranslation&) {
      ++missing;
    }
  }

  std::unique_ptr<xsp::Filler> filler;
  if (backend == "echo") {
    filler = std::make_unique<xsp::EchoFiller>(separator);
  } else if (backend.rfind("replay:", 0) == 0) {
    filler = std::make_unique<xsp::ReplayFiller>(
        xsp::ReplayFiller::from_file(backend.substr(7)));
  } else if (backend == "reference") {
    if (model_path.empty())
      throw CliError("backend 'reference' needs --model");
    std::ifstream min = open_in(model_path);
    xsp::AlignmentModel model = xsp::load_model(min);
    filler = std::make_unique<xsp::ReferenceProjectionFiller>(
        xsp::ReferenceProjectionFiller::from_examples(
            examples, model, parse_mode(mode_name), separator));
  } else {
    throw CliError("unknown backend: " + backend +
                   " (expected reference, replay:<file> or echo)");
  }

  std::vector<std::string> outputs = filler->fill(instances);
  std::ofstream out = open_out(output);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    ordered_json j = instance_to_json(instances[i]);
    j.erase("target");
    j["output"] = outputs[i];
    out << j.dump() << '\n';
  }
  std::cout << instances.size() << " outputs";
  if (missing) std::cout << " (" << missing << " missing translations)";
  std::cout << '\n';
  return kExitOk;
}

int cmd_taf_validate(const std::string& outputs_path,
                     const std::string& output, bool case_insensitive,
                     const std::string& separator,
                     const std::string& report_out) {
  std::vector<ordered_json> records = read_jsonl(outputs_path);
  std::ofstream out = open_out(output);
  std::vector<std::pair<std::string, xsp::FillerVerdict>> verdicts;
  for (const ordered_json& rec : records) {
    xsp::FillerInstance inst = instance_from_json(rec);
    std::string produced = rec.at("output").get<std::string>();
    xsp::FillerVerdict v = xsp::validate_filler_output(
        produced, inst,
        {.case_insensitive = case_insensitive, .separator = separator});
    verdicts.emplace_back(inst.language, v);
    ordered_json j;
    j["id"] = inst.source_id;
    j["language"] = inst.language;
    j["class"] = xsp::to_string(v.cls);
    if (!v.details.empty()) j["details"] = v.details;
    out << j.dump() << '\n';
  }
  xsp::ErrorReport report = xsp::error_report(verdicts);
  std::cout << report.format_table();
  write_report(report_out, [&] {
    ordered_json j;
    j["total"] = report.total;
    j["errors"] = report.errors;
    for (const auto& [lang, row] : report.per_language) {
      j["per_language"][lang]["total"] = row.total;
      j["per_language"][lang]["errors"] = row.errors;
    }
    for (const auto& [cls, n] : report.by_class)
      j["by_class"][xsp::to_string(cls)] = n;
    return j;
  }());
  return kExitOk;
}

int cmd_taf_assemble(const std::string& outputs_path,
                     const std::string& verdicts_path,
                     const std::string& dataset_path,
                     const std::string& format_name,
                     const std::string& policy_name, const std::string& output,
                     const std::string& separator,
                     const std::string& report_out,
                     const ordered_json& section) {
  xsp::AssemblePolicy policy;
  if (policy_name == "keep-all-parseable")
    policy = xsp::AssemblePolicy::keep_all_parseable;
  else if (policy_name == "strict")
    policy = xsp::AssemblePolicy::strict;
  else
    throw CliError("unknown policy: " + policy_name);

  std::map<std::string, xsp::Split> splits;
  if (!dataset_path.empty()) {
    std::ifstream din = open_in(dataset_path);
    for (const xsp::Example& ex :
         xsp::read_all(din, parse_format(format_name),
                       read_options_from(section, format_name)))
      splits[ex.id] = ex.split;
  }

  std::map<std::string, xsp::FillerVerdict::Class> verdict_by_key;
  if (!verdicts_path.empty()) {
    for (const ordered_json& rec : read_jsonl(verdicts_path)) {
      auto cls = xsp::verdict_class_from_string(
          rec.at("class").get<std::string>());
      if (!cls) throw CliError("bad verdict class in " + verdicts_path);
      verdict_by_key[rec.at("id").get<std::string>() + "\t" +
                     rec.value("language", std::string())] = *cls;
    }
  }

  std::vector<ordered_json> records = read_jsonl(outputs_path);
  std::ofstream out = open_out(output);
  std::size_t emitted = 0, dropped_malformed = 0, dropped_verdict = 0,
              dropped_slot_set = 0;
  for (const ordered_json& rec : records) {
    xsp::FillerInstance inst = instance_from_json(rec);
    std::string produced = rec.at("output").get<std::string>();
    xsp::FillerVerdict verdict;
    auto key = inst.source_id + "\t" + inst.language;
    if (auto it = verdict_by_key.find(key); it != verdict_by_key.end()) {
      verdict.cls = it->second;
    } else {
      verdict = xsp::validate_filler_output(produced, inst,
                                            {.separator = separator});
    }
    auto split_it = splits.find(inst.source_id);
    xsp::Split split =
        split_it == splits.end() ? xsp::Split::train : split_it->second;
    auto parts = xsp::split_filler_input(inst.input, separator);
    xsp::Utterance translation;
    if (parts) {
      translation.raw = parts->utterance;
      translation.tokens = xsp::split_whitespace(parts->utterance);
    }
    translation.language = inst.language;
    xsp::AssembleOutcome outcome = xsp::assemble_silver(
        translation, produced, verdict, policy, inst.source_id, split);
    switch (outcome.drop) {
      case xsp::AssembleOutcome::Drop::none:
        break;
      case xsp::AssembleOutcome::Drop::malformed:
        ++dropped_malformed;
        break;
      case xsp::AssembleOutcome::Drop::verdict:
        ++dropped_verdict;
        break;
      case xsp::AssembleOutcome::Drop::slot_set:
        ++dropped_slot_set;
        break;
    }
    if (outcome.emitted()) {
      xsp::write_canonical(out, *outcome.example);
      ++emitted;
    }
  }
  std::cout << "assembled " << emitted << " of " << records.size()
            << " (malformed " << dropped_malformed << ", verdict "
            << dropped_verdict << ", empty-slot " << dropped_slot_set
            << ")\n";
  ordered_json jr;
  jr["input"] = records.size();
  jr["emitted"] = emitted;
  jr["dropped_malformed"] = dropped_malformed;
  jr["dropped_verdict"] = dropped_verdict;
  jr["dropped_slot_set"] = dropped_slot_set;
  write_report(report_out, jr);
  return kExitOk;
}

int cmd_eval(const std::string& gold_path, const std::string& format_name,
             const std::vector<std::string>& pred_paths,
             const std::vector<std::string>& languages, bool ground_lowercase,
             const std::string& report_out, const ordered_json& section) {
  std::ifstream gin = open_in(gold_path);
  std::vector<xsp::Example> golds =
      xsp::read_all(gin, parse_format(format_name),
                    read_options_from(section, format_name));
  std::map<std::string, const xsp::Example*> gold_by_id;
  for (const xsp::Example& ex : golds) gold_by_id[ex.id] = &ex;
  xsp::WhitespaceTokenizer tokenizer;

  std::vector<xsp::MetricsReport> runs;
  for (const std::string& pred_path : pred_paths) {
    std::ifstream pin = open_in(pred_path);
    std::vector<xsp::Example> preds =
        xsp::read_all(pin, xsp::DatasetFormat::canonical);
    std::vector<xsp::EvalPair> pairs;
    for (const xsp::Example& pred : preds) {
      auto it = gold_by_id.find(pred.id);
      if (it == gold_by_id.end() || !it->second->parse || !pred.parse)
        continue;
      xsp::EvalPair pair;
      pair.gold = *it->second->parse;
      pair.pred = *pred.parse;
      pair.tokens = it->second->utterance.tokens
                        ? *it->second->utterance.tokens
                        : tokenizer.tokenize(it->second->utterance.raw);
      pair.language = it->second->utterance.language;
      pairs.push_back(std::move(pair));
    }
    xsp::GroundingOptions grounding;
    grounding.lowercase = ground_lowercase;
    runs.push_back(xsp::evaluate(pairs, languages, grounding));
  }

  if (runs.size() == 1) {
    std::cout << xsp::format_table(runs[0]);
    write_report(report_out, xsp::to_json(runs[0]));
  } else {
    xsp::AggregateReport agg = xsp::aggregate(runs, languages);
    std::cout << xsp::format_table(agg);
    write_report(report_out, xsp::to_json(agg));
  }
  return kExitOk;
}

int cmd_stats_tokenization(const std::string& a_path,
                           const std::string& b_path,
                           const std::string& report_out) {
  std::ifstream ain = open_in(a_path);
  std::ifstream bin = open_in(b_path);
  std::vector<xsp::Example> a =
      xsp::read_all(ain, xsp::DatasetFormat::canonical);
  std::vector<xsp::Example> b =
      xsp::read_all(bin, xsp::DatasetFormat::canonical);
  xsp::TokenizationStats stats = xsp::tokenization_match_stats(a, b);
  std::cout << "language   match%\n";
  ordered_json jr;
  for (const auto& [lang, row] : stats.per_language) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-10s %6.2f", lang.c_str(),
                  row.percent());
    std::cout << buf << '\n';
    jr[lang] = row.percent();
  }
  if (stats.unjoined)
    std::cout << stats.unjoined << " record(s) present on one side only\n";
  write_report(report_out, jr);
  return kExitOk;
}

int cmd_analyze_errors(const std::string& verdicts_path,
                       const std::string& report_out) {
  std::vector<std::pair<std::string, xsp::FillerVerdict>> verdicts;
  for (const ordered_json& rec : read_jsonl(verdicts_path)) {
    xsp::FillerVerdict v;
    auto cls =
        xsp::verdict_class_from_string(rec.at("class").get<std::string>());
    if (!cls) throw CliError("bad verdict class in " + verdicts_path);
    v.cls = *cls;
    verdicts.emplace_back(rec.value("language", std::string()), v);
  }
  xsp::ErrorReport report = xsp::error_report(verdicts);
  std::cout << report.format_table();
  ordered_json jr;
  jr["total"] = report.total;
  jr["errors"] = report.errors;
  for (const auto& [lang, row] : report.per_language) {
    jr["per_language"][lang]["total"] = row.total;
    jr["per_language"][lang]["errors"] = row.errors;
  }
  for (const auto& [cls, n] : report.by_class)
    jr["by_class"][xsp::to_string(cls)] = n;
  write_report(report_out, jr);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cross-lingual semantic parsing data toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  bool dry_run = false;
  app.add_option("--config", config_path, "JSON config file");
  app.add_flag("--dry-run", dry_run,
               "print the resolved configuration and exit");

  // validate
  auto* validate = app.add_subcommand("validate", "check a dataset file");
  std::string v_dataset, v_format = "canonical";
  validate->add_option("dataset", v_dataset)->required();
  auto* v_format_opt = validate->add_option("--format", v_format);

  // align-train
  auto* align_train =
      app.add_subcommand("align-train", "train alignment models");
  std::string at_corpus, at_output;
  std::size_t at_ibm1 = 5, at_hmm = 5;
  int at_window = 5;
  double at_null = 0.2;
  bool at_no_hmm = false;
  align_train->add_option("--corpus", at_corpus)->required();
  align_train->add_option("--output", at_output)->required();
  auto* at_i1 = align_train->add_option("--ibm1-iterations", at_ibm1);
  auto* at_ih = align_train->add_option("--hmm-iterations", at_hmm);
  auto* at_w = align_train->add_option("--window", at_window);
  auto* at_n = align_train->add_option("--null-transition", at_null);
  align_train->add_flag("--no-hmm", at_no_hmm);

  // align-apply
  auto* align_apply =
      app.add_subcommand("align-apply", "decode alignment links");
  std::string aa_model, aa_corpus, aa_output, aa_mode = "hmm";
  align_apply->add_option("--model", aa_model)->required();
  align_apply->add_option("--corpus", aa_corpus)->required();
  align_apply->add_option("--output", aa_output)->required();
  auto* aa_mode_opt = align_apply->add_option("--mode", aa_mode);

  // tap
  auto* tap = app.add_subcommand("tap", "translate-align-project pipeline");
  std::string t_sources, t_format = "canonical", t_translations, t_model,
              t_output, t_report, t_pos_lexicon, t_mode = "hmm";
  std::vector<std::string> t_exempt = {"DATE_TIME"};
  bool t_no_pos = false, t_no_ws = false, t_no_srccheck = false,
       t_lowercase = false, t_turkish = false, t_shuffle = false;
  unsigned t_seed = 0;
  tap->add_option("--sources", t_sources)->required();
  auto* t_format_opt = tap->add_option("--format", t_format);
  tap->add_option("--translations", t_translations)->required();
  tap->add_option("--model", t_model)->required();
  tap->add_option("--output", t_output)->required();
  tap->add_option("--report-out", t_report);
  tap->add_option("--pos-lexicon", t_pos_lexicon);
  auto* t_mode_opt = tap->add_option("--mode", t_mode);
  auto* t_exempt_opt =
      tap->add_option("--exempt", t_exempt)->delimiter(',');
  tap->add_flag("--no-pos-trim", t_no_pos);
  tap->add_flag("--no-whitespace-filter", t_no_ws);
  tap->add_flag("--no-source-check", t_no_srccheck);
  tap->add_flag("--lowercase", t_lowercase);
  tap->add_flag("--turkish-ascii", t_turkish);
  tap->add_flag("--shuffle", t_shuffle);
  tap->add_option("--seed", t_seed);

  // taf-build
  auto* taf_build =
      app.add_subcommand("taf-build", "build filler training instances");
  std::string tb_dataset, tb_format = "canonical", tb_output;
  std::string tb_separator = " | ";
  taf_build->add_option("--dataset", tb_dataset)->required();
  auto* tb_format_opt = taf_build->add_option("--format", tb_format);
  taf_build->add_option("--output", tb_output)->required();
  auto* tb_sep_opt = taf_build->add_option("--separator", tb_separator);

  // taf-fill
  auto* taf_fill = app.add_subcommand("taf-fill", "run a filler backend");
  std::string tf_dataset, tf_format = "canonical", tf_translations,
              tf_backend = "reference", tf_model, tf_mode = "hmm", tf_output;
  std::string tf_separator = " | ";
  taf_fill->add_option("--dataset", tf_dataset)->required();
  auto* tf_format_opt = taf_fill->add_option("--format", tf_format);
  taf_fill->add_option("--translations", tf_translations)->required();
  auto* tf_backend_opt = taf_fill->add_option("--backend", tf_backend);
  taf_fill->add_option("--model", tf_model);
  auto* tf_mode_opt = taf_fill->add_option("--mode", tf_mode);
  taf_fill->add_option("--output", tf_output)->required();
  auto* tf_sep_opt = taf_fill->add_option("--separator", tf_separator);

  // taf-validate
  auto* taf_validate =
      app.add_subcommand("taf-validate", "classify filler outputs");
  std::string tv_outputs, tv_output, tv_report;
  std::string tv_separator = " | ";
  bool tv_ci = false;
  taf_validate->add_option("--outputs", tv_outputs)->required();
  taf_validate->add_option("--output", tv_output)->required();
  taf_validate->add_option("--report-out", tv_report);
  taf_validate->add_flag("--case-insensitive", tv_ci);
  auto* tv_sep_opt = taf_validate->add_option("--separator", tv_separator);

  // taf-assemble
  auto* taf_assemble =
      app.add_subcommand("taf-assemble", "assemble silver data");
  std::string ta_outputs, ta_verdicts, ta_dataset, ta_format = "canonical",
              ta_policy = "keep-all-parseable", ta_output, ta_report;
  std::string ta_separator = " | ";
  taf_assemble->add_option("--outputs", ta_outputs)->required();
  taf_assemble->add_option("--verdicts", ta_verdicts);
  taf_assemble->add_option("--dataset", ta_dataset);
  auto* ta_format_opt = taf_assemble->add_option("--format", ta_format);
  auto* ta_policy_opt = taf_assemble->add_option("--policy", ta_policy);
  taf_assemble->add_option("--output", ta_output)->required();
  taf_assemble->add_option("--report-out", ta_report);
  auto* ta_sep_opt = taf_assemble->add_option("--separator", ta_separator);

  // eval
  auto* eval = app.add_subcommand("eval", "score predictions against gold");
  std::string e_gold, e_format = "canonical", e_report;
  std::vector<std::string> e_preds, e_languages;
  bool e_ground_lowercase = false;
  eval->add_option("--gold", e_gold)->required();
  auto* e_format_opt = eval->add_option("--format", e_format);
  eval->add_option("--pred", e_preds)->required()->expected(-1);
  auto* e_lang_opt =
      eval->add_option("--languages", e_languages)->delimiter(',');
  eval->add_option("--report-out", e_report);
  eval->add_flag("--ground-lowercase", e_ground_lowercase);

  // stats-tokenization
  auto* stats = app.add_subcommand("stats-tokenization",
                                   "token match percentage per language");
  std::string s_a, s_b, s_report;
  stats->add_option("--a", s_a)->required();
  stats->add_option("--b", s_b)->required();
  stats->add_option("--report-out", s_report);

  // analyze-errors
  auto* analyze =
      app.add_subcommand("analyze-errors", "summarize verdict files");
  std::string an_verdicts, an_report;
  analyze->add_option("--verdicts", an_verdicts)->required();
  analyze->add_option("--report-out", an_report);

  CLI11_PARSE(app, argc, argv);

  try {
    ConfigFile config = ConfigFile::load(config_path);

    if (validate->parsed()) {
      ordered_json section = config.section("validate");
      apply_config(section, v_format_opt, "format", v_format);
      if (dry_run) {
        std::cout << resolved_config("validate", {{"dataset", v_dataset},
                                                  {"format", v_format}})
                         .dump(2)
                  << '\n';
        return kExitOk;
      }
      return cmd_validate(v_dataset, v_format, section);
    }
    if (align_train->parsed()) {
      ordered_json section = config.section("align-train");
      apply_config(section, at_i1, "ibm1_iterations", at_ibm1);
      apply_config(section, at_ih, "hmm_iterations", at_hmm);
      apply_config(section, at_w, "window", at_window);
      apply_config(section, at_n, "null_transition", at_null);
      if (dry_run) {
        std::cout << resolved_config(
                         "align-train",
                         {{"corpus", at_corpus},
                          {"output", at_output},
                          {"ibm1_iterations", at_ibm1},
                          {"hmm_iterations", at_no_hmm ? 0 : at_hmm},
                          {"window", at_window},
                          {"null_transition", at_null}})
                         .dump(2)
                  << '\n';
        return kExitOk;
      }
      return cmd_align_train(at_corpus, at_output, at_ibm1, at_hmm, at_window,
                             at_null, at_no_hmm);
    }
    if (align_apply->parsed()) {
      ordered_json section = config.section("align-apply");
      apply_config(section, aa_mode_opt, "mode", aa_mode);
      if (dry_run) {
        std::cout << resolved_config("align-apply", {{"model", aa_model},
                                                     {"corpus", aa_corpus},
                                                     {"output", aa_output},
                                                     {"mode", aa_mode}})
                         .dump(2)
                  << '\n';
        return kExitOk;
      }
      return cmd_align_apply(aa_model, aa_corpus, aa_output, aa_mode);
    }
    if (tap->parsed()) {
      ordered_json section = config.section("tap");
      apply_config(section, t_format_opt, "format", t_format);
      apply_config(section, t_mode_opt, "mode", t_mode);
      apply_config(section, t_exempt_opt, "exempt_labels", t_exempt);
      xsp::TapConfig tc;
      tc.check_source_tokenization = !t_no_srccheck;
      tc.require_whitespace_target = !t_no_ws;
      tc.pos_trimming = !t_no_pos;
      tc.exempt_labels =
          std::set<std::string>(t_exempt.begin(), t_exempt.end());
      tc.postprocess.lowercase = t_lowercase;
      tc.postprocess.turkish_ascii = t_turkish;
      tc.align_mode = parse_mode(t_mode);
      if (section.contains("lowercase") && !t_lowercase)
        tc.postprocess.lowercase = section.at("lowercase");
      if (section.contains("turkish_ascii") && !t_turkish)
        tc.postprocess.turkish_ascii = section.at("turkish_ascii");
      if (section.contains("postprocess_by_language")) {
        for (const auto& [lang, opts] :
             section.at("postprocess_by_language").items()) {
          xsp::PostprocessOptions po;
          po.lowercase = opts.value("lowercase", false);
          po.turkish_ascii = opts.value("turkish_ascii", false);
          tc.postprocess_by_language[lang] = po;
        }
      }
      if (dry_run) {
        std::cout
            << resolved_config(
                   "tap",
                   {{"sources", t_sources},
                    {"format", t_format},
                    {"translations", t_translations},
                    {"model", t_model},
                    {"output", t_output},
                    {"mode", t_mode},
                    {"exempt_labels", t_exempt},
                    {"check_source_tokenization",
                     tc.check_source_tokenization},
                    {"require_whitespace_target", tc.require_whitespace_target},
                    {"pos_trimming", tc.pos_trimming},
                    {"lowercase", tc.postprocess.lowercase},
                    {"turkish_ascii", tc.postprocess.turkish_ascii},
                    {"shuffle", t_shuffle},
                    {"seed", t_seed}})
                   .dump(2)
            << '\n';
        return kExitOk;
      }
      return cmd_tap(t_sources, t_format, t_translations, t_model, t_output,
                     t_report, t_pos_lexicon, tc, section, t_seed, t_shuffle);
    }
    if (taf_build->parsed()) {
      ordered_json section = config.section("taf-build");
      apply_config(section, tb_format_opt, "format", tb_format);
      apply_config(section, tb_sep_opt, "separator", tb_separator);
      if (dry_run) {
        std::cout << resolved_config("taf-build",
                                     {{"dataset", tb_dataset},
                                      {"format", tb_format},
                                      {"output", tb_output},
                                      {"separator", tb_separator}})
                         .dump(2)
                  << '\n';
        return kExitOk;
      }
      return cmd_taf_build(tb_dataset, tb_format, tb_output, tb_separator,
                           section);
    }
    if (taf_fill->parsed()) {
      ordered_json section = config.section("taf-fill");
      apply_config(section, tf_format_opt, "format", tf_format);
      apply_config(section, tf_backend_opt, "backend", tf_backend);
      apply_config(section, tf_mode_opt, "mode", tf_mode);
      apply_config(section, tf_sep_opt, "separator", tf_separator);
      if (dry_run) {
        std::cout << resolved_config("taf-fill",
                                     {{"dataset", tf_dataset},
                                      {"format", tf_format},
                                      {"translations", tf_translations},
                                      {"backend", tf_backend},
                                      {"model", tf_model},
                                      {"mode", tf_mode},
                                      {"output", tf_output},
                                      {"separator", tf_separator}})
                         .dump(2)
                  << '\n';
        return kExitOk;
      }
      return cmd_taf_fill(tf_dataset, tf_format, tf_translations, tf_backend,
                          tf_model, tf_mode, tf_output, tf_separator,
                          section);
    }
    if (taf_validate->parsed()) {
      ordered_json section = config.section("taf-validate");
      apply_config(section, tv_sep_opt, "separator", tv_separator);
      if (dry_run) {
        std::cout << resolved_config("taf-validate",
                                     {{"outputs", tv_outputs},
                                      {"output", tv_output},
                                      {"case_insensitive", tv_ci},
                                      {"separator", tv_separator}})
                         .dump(2)
                  << '\n';
        return kExitOk;
      }
      return cmd_taf_validate(tv_outputs, tv_output, tv_ci, tv_separator,
                              tv_report);
    }
    if (taf_assemble->parsed()) {
      ordered_json section = config.section("taf-assemble");
      apply_config(section, ta_format_opt, "format", ta_format);
      apply_config(section, ta_policy_opt, "policy", ta_policy);
      apply_config(section, ta_sep_opt, "separator", ta_separator);
      if (dry_run) {
        std::cout << resolved_config("taf-assemble",
                                     {{"outputs", ta_outputs},
                                      {"verdicts", ta_verdicts},
                                      {"dataset", ta_dataset},
                                      {"policy", ta_policy},
                                      {"output", ta_output},
                                      {"separator", ta_separator}})
                         .dump(2)
                  << '\n';
        return kExitOk;
      }
      return cmd_taf_assemble(ta_outputs, ta_verdicts, ta_dataset, ta_format,
                              ta_policy, ta_output, ta_separator, ta_report,
                              section);
    }
    if (eval->parsed()) {
      ordered_json section = config.section("eval");
      apply_config(section, e_format_opt, "format", e_format);
      apply_config(section, e_lang_opt, "languages", e_languages);
      if (dry_run) {
        std::cout << resolved_config("eval", {{"gold", e_gold},
                                              {"format", e_format},
                                              {"pred", e_preds},
                                              {"languages", e_languages}})
                         .dump(2)
                  << '\n';
        return kExitOk;
      }
      return cmd_eval(e_gold, e_format, e_preds, e_languages,
                      e_ground_lowercase, e_report, section);
    }
    if (stats->parsed()) {
      if (dry_run) {
        std::cout << resolved_config("stats-tokenization",
                                     {{"a", s_a}, {"b", s_b}})
                         .dump(2)
                  << '\n';
        return kExitOk;
      }
      return cmd_stats_tokenization(s_a, s_b, s_report);
    }
    if (analyze->parsed()) {
      if (dry_run) {
        std::cout << resolved_config("analyze-errors",
                                     {{"verdicts", an_verdicts}})
                         .dump(2)
                  << '\n';
        return kExitOk;
      }
      return cmd_analyze_errors(an_verdicts, an_report);
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const xsp::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
