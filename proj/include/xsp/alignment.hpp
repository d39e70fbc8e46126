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

// Statistical word alignment: lexical translation model trained with EM
// (uniform alignment prior, NULL word prepended to the source) and an HMM
// alignment model with a bucketed jump distribution and per-position NULL
// shadow states, trained with scaled forward-backward.
//
// Everything is deterministic given corpus order: vocabularies are built in
// first-seen order, expected counts are accumulated in fixed sentence order,
// and all tie-breaking prefers the lowest index.

#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace xsp {

class EmptyCorpus : public std::runtime_error {
 public:
  explicit EmptyCorpus(const std::string& what) : std::runtime_error(what) {}
};

class DegenerateInit : public std::runtime_error {
 public:
  explicit DegenerateInit(const std::string& what)
      : std::runtime_error(what) {}
};

struct SentencePair {
  std::vector<std::string> source;
  std::vector<std::string> target;
};

struct ParallelCorpus {
  std::vector<SentencePair> pairs;
};

inline constexpr const char* kNullWord = "<NULL>";
inline constexpr double kDecodeSmoothing = 1e-12;

// First-seen-order vocabulary.
class Vocab {
 public:
  int add(const std::string& word) {
    auto it = index_.find(word);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(words_.size());
    words_.push_back(word);
    index_.emplace(word, id);
    return id;
  }

  int find(const std::string& word) const {
    auto it = index_.find(word);
    return it == index_.end() ? -1 : it->second;
  }

  const std::string& word(int id) const { return words_[id]; }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

struct AlignmentModel {
  Vocab source_vocab;  // index 0 is the NULL word
  Vocab target_vocab;
  // lexical[s][t] = t(target word | source word); rows sum to 1.
  std::vector<std::vector<double>> lexical;

  bool has_hmm = false;
  int window = 5;
  double null_transition = 0.2;
  // jump[d + window] = p(jump = d), d in [-window, window]; sums to 1.
  std::vector<double> jump;

  double lex(int s, int t) const { return lexical[s][t]; }
  double lex_smoothed(int s, int t) const {
    double p = (s >= 0 && t >= 0) ? lexical[s][t] : 0.0;
    return p + kDecodeSmoothing;
  }
  double jump_prob(long d) const {
    if (d < -window) d = -window;
    if (d > window) d = window;
    return jump[static_cast<std::size_t>(d + window)];
  }
};

struct AlignmentLinks {
  // (source index, target index); a target index absent from all links is
  // NULL-aligned. Each target index appears at most once.
  std::vector<std::pair<std::size_t, std::size_t>> links;

  friend bool operator==(const AlignmentLinks& a, const AlignmentLinks& b) {
    return a.links == b.links;
  }
};

enum class AlignMode { model1, hmm };

namespace detail {

struct EncodedCorpus {
  std::vector<std::vector<int>> source;  // without NULL
  std::vector<std::vector<int>> target;
};

inline EncodedCorpus encode_corpus(const ParallelCorpus& corpus,
                                   AlignmentModel& model) {
  if (corpus.pairs.empty()) throw EmptyCorpus("empty parallel corpus");
  model.source_vocab.add(kNullWord);
  EncodedCorpus enc;
  for (const SentencePair& pair : corpus.pairs) {
    if (pair.source.empty() || pair.target.empty())
      throw EmptyCorpus("empty sentence in parallel corpus");
    std::vector<int> src, tgt;
    src.reserve(pair.source.size());
    tgt.reserve(pair.target.size());
    for (const std::string& w : pair.source)
      src.push_back(model.source_vocab.add(w));
    for (const std::string& w : pair.target)
      tgt.push_back(model.target_vocab.add(w));
    enc.source.push_back(std::move(src));
    enc.target.push_back(std::move(tgt));
  }
  return enc;
}

// Likelihood computation requires every corpus word in the model vocabulary.
inline EncodedCorpus encode_with(const ParallelCorpus& corpus,
                                 const AlignmentModel& model) {
  if (corpus.pairs.empty()) throw EmptyCorpus("empty parallel corpus");
  EncodedCorpus enc;
  auto lookup = [](const Vocab& vocab, const std::string& w) {
    int id = vocab.find(w);
    if (id < 0)
      throw std::invalid_argument("word not in model vocabulary: " + w);
    return id;
  };
  for (const SentencePair& pair : corpus.pairs) {
    if (pair.source.empty() || pair.target.empty())
      throw EmptyCorpus("empty sentence in parallel corpus");
    std::vector<int> src, tgt;
    for (const std::string& w : pair.source)
      src.push_back(lookup(model.source_vocab, w));
    for (const std::string& w : pair.target)
      tgt.push_back(lookup(model.target_vocab, w));
    enc.source.push_back(std::move(src));
    enc.target.push_back(std::move(tgt));
  }
  return enc;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Lexical model (EM with uniform alignment prior)

inline double ibm1_log_likelihood(const AlignmentModel& model,
                                  const detail::EncodedCorpus& enc) {
  double total = 0.0;
  for (std::size_t p = 0; p < enc.source.size(); ++p) {
    const auto& src = enc.source[p];
    for (int t : enc.target[p]) {
      double sum = model.lexical[0][t];
      for (int s : src) sum += model.lexical[s][t];
      total += std::log(sum) - std::log(static_cast<double>(src.size() + 1));
    }
  }
  return total;
}

inline double ibm1_log_likelihood(const AlignmentModel& model,
                                  const ParallelCorpus& corpus) {
  return ibm1_log_likelihood(model, detail::encode_with(corpus, model));
}

// EM-trained lexical table. Initialization is uniform over the target
// vocabulary; `log_likelihoods`, when given, receives the corpus
// log-likelihood of the initial model and after each iteration.
inline AlignmentModel train_ibm1(const ParallelCorpus& corpus,
                                 std::size_t iterations,
                                 std::vector<double>* log_likelihoods = nullptr) {
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  AlignmentModel model;
  detail::EncodedCorpus enc = detail::encode_corpus(corpus, model);

  const std::size_t s_count = model.source_vocab.size();
  const std::size_t t_count = model.target_vocab.size();
  const double uniform = 1.0 / static_cast<double>(t_count);
  model.lexical.assign(s_count, std::vector<double>(t_count, uniform));

  if (log_likelihoods)
    log_likelihoods->push_back(ibm1_log_likelihood(model, enc));

  std::vector<std::vector<double>> counts;
  for (std::size_t iter = 0; iter < iterations; ++iter) {
    counts.assign(s_count, std::vector<double>(t_count, 0.0));
    for (std::size_t p = 0; p < enc.source.size(); ++p) {
      const auto& src = enc.source[p];
      for (int t : enc.target[p]) {
        double denom = model.lexical[0][t];
        for (int s : src) denom += model.lexical[s][t];
        counts[0][t] += model.lexical[0][t] / denom;
        for (int s : src) counts[s][t] += model.lexical[s][t] / denom;
      }
    }
    for (std::size_t s = 0; s < s_count; ++s) {
      double total = 0.0;
      for (double c : counts[s]) total += c;
      if (total > 0.0)
        for (std::size_t t = 0; t < t_count; ++t)
          model.lexical[s][t] = counts[s][t] / total;
    }
    if (log_likelihoods)
      log_likelihoods->push_back(ibm1_log_likelihood(model, enc));
  }
  return model;
}

// ---------------------------------------------------------------------------
// HMM alignment model

struct HmmOptions {
  int window = 5;
  double null_transition = 0.2;
};

// State layout for a source sentence of length I: states [0, I) are the
// source positions, state I + i is the NULL shadow of position i (it emits
// from the NULL row and remembers i for the next jump).
struct HmmLattice {
  std::size_t num_real = 0;
  std::vector<double> init;                 // 2I
  std::vector<std::vector<double>> trans;   // 2I x 2I
  std::vector<std::vector<double>> emit;    // T x 2I
  std::size_t num_states() const { return 2 * num_real; }
};

namespace detail {

inline HmmLattice build_hmm_lattice(const AlignmentModel& model,
                                    const std::vector<int>& src,
                                    const std::vector<int>& tgt,
                                    bool smoothed) {
  const std::size_t I = src.size();
  const std::size_t T = tgt.size();
  const std::size_t S = 2 * I;
  const double p0 = model.null_transition;
  HmmLattice lat;
  lat.num_real = I;
  lat.init.assign(S, 0.0);
  for (std::size_t i = 0; i < I; ++i) {
    lat.init[i] = (1.0 - p0) / static_cast<double>(I);
    lat.init[I + i] = p0 / static_cast<double>(I);
  }
  lat.trans.assign(S, std::vector<double>(S, 0.0));
  for (std::size_t from = 0; from < S; ++from) {
    std::size_t base = from < I ? from : from - I;
    for (std::size_t i = 0; i < I; ++i) {
      double j = model.jump_prob(static_cast<long>(i) -
                                 static_cast<long>(base));
      if (smoothed) j += kDecodeSmoothing;
      lat.trans[from][i] = (1.0 - p0) * j;
    }
    lat.trans[from][I + base] = p0;
  }
  lat.emit.assign(T, std::vector<double>(S, 0.0));
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < I; ++i) {
      if (smoothed) {
        lat.emit[t][i] = model.lex_smoothed(src[i], tgt[t]);
        lat.emit[t][I + i] = model.lex_smoothed(0, tgt[t]);
      } else {
        lat.emit[t][i] = model.lexical[src[i]][tgt[t]];
        lat.emit[t][I + i] = model.lexical[0][tgt[t]];
      }
    }
  }
  return lat;
}

struct ForwardBackward {
  std::vector<std::vector<double>> alpha, beta;
  std::vector<double> scale;
  double log_likelihood = 0.0;
};

inline ForwardBackward forward_backward(const HmmLattice& lat,
                                        std::size_t T) {
  const std::size_t S = lat.num_states();
  ForwardBackward fb;
  fb.alpha.assign(T, std::vector<double>(S, 0.0));
  fb.beta.assign(T, std::vector<double>(S, 0.0));
  fb.scale.assign(T, 0.0);
  for (std::size_t s = 0; s < S; ++s)
    fb.alpha[0][s] = lat.init[s] * lat.emit[0][s];
  for (std::size_t t = 0; t < T; ++t) {
    if (t > 0) {
      for (std::size_t s2 = 0; s2 < S; ++s2) {
        double sum = 0.0;
        for (std::size_t s1 = 0; s1 < S; ++s1)
          sum += fb.alpha[t - 1][s1] * lat.trans[s1][s2];
        fb.alpha[t][s2] = sum * lat.emit[t][s2];
      }
    }
    double c = 0.0;
    for (std::size_t s = 0; s < S; ++s) c += fb.alpha[t][s];
    if (c <= 0.0)
      throw DegenerateInit("zero-probability observation in HMM training");
    fb.scale[t] = c;
    for (std::size_t s = 0; s < S; ++s) fb.alpha[t][s] /= c;
    fb.log_likelihood += std::log(c);
  }
  for (std::size_t s = 0; s < S; ++s) fb.beta[T - 1][s] = 1.0;
  for (std::size_t t = T - 1; t > 0; --t) {
    for (std::size_t s1 = 0; s1 < S; ++s1) {
      double sum = 0.0;
      for (std::size_t s2 = 0; s2 < S; ++s2)
        sum += lat.trans[s1][s2] * lat.emit[t][s2] * fb.beta[t][s2];
      fb.beta[t - 1][s1] = sum / fb.scale[t];
    }
  }
  return fb;
}

}  // namespace detail

inline double hmm_log_likelihood(const AlignmentModel& model,
                                 const detail::EncodedCorpus& enc) {
  double total = 0.0;
  for (std::size_t p = 0; p < enc.source.size(); ++p) {
    HmmLattice lat = detail::build_hmm_lattice(model, enc.source[p],
                                               enc.target[p], false);
    total += detail::forward_backward(lat, enc.target[p].size())
                 .log_likelihood;
  }
  return total;
}

inline double hmm_log_likelihood(const AlignmentModel& model,
                                 const ParallelCorpus& corpus) {
  return hmm_log_likelihood(model, detail::encode_with(corpus, model));
}

// Forward-backward EM on top of an initial lexical table (typically the
// EM-trained lexical model). Zero entries in the initial table for observed
// pairs would make training degenerate, so the table is floored and
// renormalized once up front; afterwards EM keeps every parameter positive.
inline AlignmentModel train_hmm(const ParallelCorpus& corpus,
                                std::size_t iterations,
                                const AlignmentModel& init,
                                HmmOptions options = {},
                                std::vector<double>* log_likelihoods = nullptr) {
  if (init.lexical.empty())
    throw DegenerateInit("init model has no lexical table");
  AlignmentModel model = init;
  model.has_hmm = true;
  model.window = options.window;
  model.null_transition = options.null_transition;
  const std::size_t buckets = 2 * static_cast<std::size_t>(options.window) + 1;
  model.jump.assign(buckets, 1.0 / static_cast<double>(buckets));

  // Extend vocabularies with corpus words unseen by the init model, floor
  // and renormalize the lexical table.
  detail::EncodedCorpus enc;
  {
    if (corpus.pairs.empty()) throw EmptyCorpus("empty parallel corpus");
    for (const SentencePair& pair : corpus.pairs) {
      if (pair.source.empty() || pair.target.empty())
        throw EmptyCorpus("empty sentence in parallel corpus");
      std::vector<int> src, tgt;
      for (const std::string& w : pair.source)
        src.push_back(model.source_vocab.add(w));
      for (const std::string& w : pair.target)
        tgt.push_back(model.target_vocab.add(w));
      enc.source.push_back(std::move(src));
      enc.target.push_back(std::move(tgt));
    }
    model.lexical.resize(model.source_vocab.size());
    for (auto& row : model.lexical) {
      row.resize(model.target_vocab.size(), 0.0);
      double total = 0.0;
      for (double& p : row) {
        p += kDecodeSmoothing;
        total += p;
      }
      for (double& p : row) p /= total;
    }
  }

  if (log_likelihoods)
    log_likelihoods->push_back(hmm_log_likelihood(model, enc));

  const std::size_t s_count = model.source_vocab.size();
  const std::size_t t_count = model.target_vocab.size();
  for (std::size_t iter = 0; iter < iterations; ++iter) {
    std::vector<std::vector<double>> lex_counts(
        s_count, std::vector<double>(t_count, 0.0));
    std::vector<double> jump_counts(buckets, 0.0);
    for (std::size_t p = 0; p < enc.source.size(); ++p) {
      const auto& src = enc.source[p];
      const auto& tgt = enc.target[p];
      const std::size_t I = src.size();
      const std::size_t T = tgt.size();
      const std::size_t S = 2 * I;
      HmmLattice lat = detail::build_hmm_lattice(model, src, tgt, false);
      detail::ForwardBackward fb = detail::forward_backward(lat, T);
      // State posteriors -> lexical counts.
      for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t s = 0; s < S; ++s) {
          double gamma = fb.alpha[t][s] * fb.beta[t][s];
          if (gamma <= 0.0) continue;
          if (s < I)
            lex_counts[src[s]][tgt[t]] += gamma;
          else
            lex_counts[0][tgt[t]] += gamma;
        }
      }
      // Transition posteriors -> jump counts (real-state arrivals only;
      // the NULL transition probability is a fixed parameter).
      for (std::size_t t = 0; t + 1 < T; ++t) {
        for (std::size_t s1 = 0; s1 < S; ++s1) {
          if (fb.alpha[t][s1] <= 0.0) continue;
          std::size_t base = s1 < I ? s1 : s1 - I;
          for (std::size_t s2 = 0; s2 < I; ++s2) {
            double xi = fb.alpha[t][s1] * lat.trans[s1][s2] *
                        lat.emit[t + 1][s2] * fb.beta[t + 1][s2] /
                        fb.scale[t + 1];
            if (xi <= 0.0) continue;
            long d = static_cast<long>(s2) - static_cast<long>(base);
            if (d < -options.window) d = -options.window;
            if (d > options.window) d = options.window;
            jump_counts[static_cast<std::size_t>(d + options.window)] += xi;
          }
        }
      }
    }
    for (std::size_t s = 0; s < s_count; ++s) {
      double total = 0.0;
      for (double c : lex_counts[s]) total += c;
      if (total > 0.0)
        for (std::size_t t = 0; t < t_count; ++t)
          model.lexical[s][t] = lex_counts[s][t] / total;
    }
    double jump_total = 0.0;
    for (double c : jump_counts) jump_total += c;
    if (jump_total > 0.0)
      for (std::size_t b = 0; b < buckets; ++b)
        model.jump[b] = jump_counts[b] / jump_total;
    if (log_likelihoods)
      log_likelihoods->push_back(hmm_log_likelihood(model, enc));
  }
  return model;
}

// ---------------------------------------------------------------------------
// Decoding

namespace detail {

inline std::vector<int> encode_tokens(const Vocab& vocab,
                                      const std::vector<std::string>& words) {
  std::vector<int> out;
  out.reserve(words.size());
  for (const std::string& w : words) out.push_back(vocab.find(w));
  return out;
}

}  // namespace detail

// Maximum-probability state path; ties prefer the lowest state index (real
// source states come before NULL shadow states).
inline std::vector<std::size_t> hmm_viterbi_path(const HmmLattice& lat,
                                                 std::size_t T,
                                                 double* score = nullptr) {
  const std::size_t S = lat.num_states();
  std::vector<std::vector<double>> delta(T, std::vector<double>(S, 0.0));
  std::vector<std::vector<std::size_t>> psi(T, std::vector<std::size_t>(S, 0));
  for (std::size_t s = 0; s < S; ++s)
    delta[0][s] = lat.init[s] * lat.emit[0][s];
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t s2 = 0; s2 < S; ++s2) {
      double best = -1.0;
      std::size_t arg = 0;
      for (std::size_t s1 = 0; s1 < S; ++s1) {
        double v = delta[t - 1][s1] * lat.trans[s1][s2];
        if (v > best) {
          best = v;
          arg = s1;
        }
      }
      delta[t][s2] = best * lat.emit[t][s2];
      psi[t][s2] = arg;
    }
  }
  double best = -1.0;
  std::size_t arg = 0;
  for (std::size_t s = 0; s < S; ++s) {
    if (delta[T - 1][s] > best) {
      best = delta[T - 1][s];
      arg = s;
    }
  }
  std::vector<std::size_t> path(T);
  path[T - 1] = arg;
  for (std::size_t t = T - 1; t > 0; --t) path[t - 1] = psi[t][path[t]];
  if (score) *score = best;
  return path;
}

// Hard links for a sentence pair. model1 mode links every target word to the
// argmax source word (NULL yields no link); hmm mode decodes the best state
// path. Deterministic: the lowest source index wins ties, NULL first.
inline AlignmentLinks viterbi_align(const AlignmentModel& model,
                                    const std::vector<std::string>& source,
                                    const std::vector<std::string>& target,
                                    AlignMode mode) {
  AlignmentLinks out;
  if (source.empty() || target.empty()) return out;
  std::vector<int> src = detail::encode_tokens(model.source_vocab, source);
  std::vector<int> tgt = detail::encode_tokens(model.target_vocab, target);
  if (mode == AlignMode::model1) {
    for (std::size_t t = 0; t < tgt.size(); ++t) {
      double best = model.lex_smoothed(0, tgt[t]);  // NULL
      long arg = -1;
      for (std::size_t s = 0; s < src.size(); ++s) {
        double v = model.lex_smoothed(src[s], tgt[t]);
        if (v > best) {
          best = v;
          arg = static_cast<long>(s);
        }
      }
      if (arg >= 0)
        out.links.emplace_back(static_cast<std::size_t>(arg), t);
    }
    return out;
  }
  if (!model.has_hmm)
    throw std::invalid_argument("model has no HMM parameters");
  HmmLattice lat = detail::build_hmm_lattice(model, src, tgt, true);
  std::vector<std::size_t> path = hmm_viterbi_path(lat, tgt.size());
  for (std::size_t t = 0; t < path.size(); ++t)
    if (path[t] < lat.num_real) out.links.emplace_back(path[t], t);
  return out;
}

// ---------------------------------------------------------------------------
// Model serialization (versioned text format)

inline void save_model(std::ostream& os, const AlignmentModel& model) {
  os << "xsp-alignment-model v1\n";
  os << "source_vocab " << model.source_vocab.size() << '\n';
  for (const std::string& w : model.source_vocab.words()) os << w << '\n';
  os << "target_vocab " << model.target_vocab.size() << '\n';
  for (const std::string& w : model.target_vocab.words()) os << w << '\n';
  char buf[64];
  std::size_t nonzero = 0;
  for (const auto& row : model.lexical)
    for (double p : row)
      if (p != 0.0) ++nonzero;
  os << "lex " << nonzero << '\n';
  for (std::size_t s = 0; s < model.lexical.size(); ++s) {
    for (std::size_t t = 0; t < model.lexical[s].size(); ++t) {
      if (model.lexical[s][t] == 0.0) continue;
      std::snprintf(buf, sizeof buf, "%.17g", model.lexical[s][t]);
      os << s << ' ' << t << ' ' << buf << '\n';
    }
  }
  os << "hmm " << (model.has_hmm ? 1 : 0) << '\n';
  if (model.has_hmm) {
    os << "window " << model.window << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", model.null_transition);
    os << "null_transition " << buf << '\n';
    os << "jump " << model.jump.size() << '\n';
    for (double p : model.jump) {
      std::snprintf(buf, sizeof buf, "%.17g", p);
      os << buf << '\n';
    }
  }
}

inline AlignmentModel load_model(std::istream& is) {
  auto fail = [](const std::string& what) -> std::runtime_error {
    return std::runtime_error("bad alignment model file: " + what);
  };
  std::string header;
  if (!std::getline(is, header) || header != "xsp-alignment-model v1")
    throw fail("unknown header");
  AlignmentModel model;
  std::string keyword;
  std::size_t n = 0;
  if (!(is >> keyword >> n) || keyword != "source_vocab")
    throw fail("expected source_vocab");
  for (std::size_t i = 0; i < n; ++i) {
    std::string w;
    if (!(is >> w)) throw fail("truncated source vocab");
    model.source_vocab.add(w);
  }
  if (!(is >> keyword >> n) || keyword != "target_vocab")
    throw fail("expected target_vocab");
  for (std::size_t i = 0; i < n; ++i) {
    std::string w;
    if (!(is >> w)) throw fail("truncated target vocab");
    model.target_vocab.add(w);
  }
  model.lexical.assign(model.source_vocab.size(),
                       std::vector<double>(model.target_vocab.size(), 0.0));
  if (!(is >> keyword >> n) || keyword != "lex") throw fail("expected lex");
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t s, t;
    double p;
    if (!(is >> s >> t >> p)) throw fail("truncated lex table");
    if (s >= model.lexical.size() || t >= model.lexical[s].size())
      throw fail("lex index out of range");
    model.lexical[s][t] = p;
  }
  int has_hmm = 0;
  if (!(is >> keyword >> has_hmm) || keyword != "hmm")
    throw fail("expected hmm");
  model.has_hmm = has_hmm != 0;
  if (model.has_hmm) {
    if (!(is >> keyword >> model.window) || keyword != "window")
      throw fail("expected window");
    if (!(is >> keyword >> model.null_transition) ||
        keyword != "null_transition")
      throw fail("expected null_transition");
    if (!(is >> keyword >> n) || keyword != "jump") throw fail("expected jump");
    model.jump.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      if (!(is >> model.jump[i])) throw fail("truncated jump table");
  }
  return model;
}

}  // namespace xsp
