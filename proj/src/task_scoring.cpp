// src/task_scoring.cpp

// Copyright 2026  The corrspace Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "corrspace/task_scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "corrspace/training.hpp"

namespace corrspace {

namespace fs = std::filesystem;

Sentence tokenize(const std::string& line) {
  Sentence out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

SentenceCorpus read_corpus(const fs::path& path, std::string language) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus " + path.string());
  SentenceCorpus c;
  c.language = std::move(language);
  std::string line;
  while (std::getline(in, line)) c.sentences.push_back(tokenize(line));
  return c;
}

void write_corpus(const SentenceCorpus& corpus, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& s : corpus.sentences) {
    for (std::size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << s[i];
    out << "\n";
  }
}

std::size_t edit_distance(const Sentence& a, const Sentence& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double wer(const Sentence& hyp, const Sentence& ref) {
  if (ref.empty()) throw DataError("wer: empty reference");
  return 100.0 * static_cast<double>(edit_distance(hyp, ref)) / static_cast<double>(ref.size());
}

double corpus_wer(const std::vector<Sentence>& hyps, const std::vector<Sentence>& refs) {
  if (hyps.size() != refs.size()) throw DataError("corpus_wer: corpora differ in length");
  std::size_t edits = 0, tokens = 0;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    edits += edit_distance(hyps[i], refs[i]);
    tokens += refs[i].size();
  }
  if (tokens == 0) throw DataError("corpus_wer: empty reference corpus");
  return 100.0 * static_cast<double>(edits) / static_cast<double>(tokens);
}

namespace {

constexpr std::size_t kMaxBleuOrder = 4;

std::map<Sentence, std::size_t> ngram_counts(const Sentence& s, std::size_t n) {
  std::map<Sentence, std::size_t> counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i)
    ++counts[Sentence(s.begin() + static_cast<std::ptrdiff_t>(i),
                      s.begin() + static_cast<std::ptrdiff_t>(i + n))];
  return counts;
}

}  // namespace

double bleu(const std::vector<Sentence>& hyps, const std::vector<Sentence>& refs) {
  if (hyps.empty() || refs.empty()) throw DataError("bleu: empty corpus");
  if (hyps.size() != refs.size()) throw DataError("bleu: corpora differ in length");

  std::array<std::size_t, kMaxBleuOrder> matches{}, totals{};
  std::size_t hyp_len = 0, ref_len = 0;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    hyp_len += hyps[i].size();
    ref_len += refs[i].size();
    for (std::size_t n = 1; n <= kMaxBleuOrder; ++n) {
      const auto h = ngram_counts(hyps[i], n);
      const auto r = ngram_counts(refs[i], n);
      for (const auto& [gram, count] : h) {
        totals[n - 1] += count;
        if (auto it = r.find(gram); it != r.end()) matches[n - 1] += std::min(count, it->second);
      }
    }
  }
  if (ref_len == 0) throw DataError("bleu: empty reference corpus");

  std::size_t order = 0;
  while (order < kMaxBleuOrder && totals[order] > 0) ++order;
  if (order == 0) return 0.0;
  if (matches[0] == 0) return 0.0;

  double log_sum = 0.0;
  for (std::size_t n = 0; n < order; ++n) {
    const double p = (matches[n] == 0 && n > 0)
                         ? 1.0 / static_cast<double>(totals[n] + 1)
                         : static_cast<double>(matches[n]) / static_cast<double>(totals[n]);
    log_sum += std::log(p);
  }
  const double bp = hyp_len < ref_len
                        ? std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len))
                        : 1.0;
  return 100.0 * bp * std::exp(log_sum / static_cast<double>(order));
}

std::string_view to_string(TaskMetric m) { return m == TaskMetric::wer ? "wer" : "bleu"; }

TaskMetric parse_task_metric(std::string_view name) {
  if (name == "wer") return TaskMetric::wer;
  if (name == "bleu") return TaskMetric::bleu;
  throw ConfigError("unknown task metric '" + std::string(name) + "'");
}

std::string_view to_string(ReferenceSet r) {
  switch (r) {
    case ReferenceSet::test: return "test";
    case ReferenceSet::train: return "train";
    case ReferenceSet::train_test: return "train+test";
  }
  return "?";
}

ReferenceSet parse_reference_set(std::string_view name) {
  if (name == "test") return ReferenceSet::test;
  if (name == "train") return ReferenceSet::train;
  if (name == "train+test") return ReferenceSet::train_test;
  throw ConfigError("unknown reference set '" + std::string(name) + "'");
}

namespace {

template <typename T>
const T& at_split(const std::map<Split, T>& m, Split s, const char* what) {
  auto it = m.find(s);
  if (it == m.end())
    throw DataError(std::string("score_retrieval_as_task: no ") + what + " for split " +
                    std::string(to_string(s)));
  return it->second;
}

}  // namespace

TaskScore score_retrieval_as_task(const TaskInputs& in, Split source_split, ReferenceSet refs,
                                  TaskMetric metric) {
  const Matrix& src_rows = at_split(in.source_rows, source_split, "source rows");
  const SentenceCorpus& truth = at_split(in.corpus, source_split, "corpus");
  if (truth.size() != static_cast<std::size_t>(src_rows.rows()))
    throw DataError("score_retrieval_as_task: corpus for split " +
                    std::string(to_string(source_split)) + " has " + std::to_string(truth.size()) +
                    " sentences, view has " + std::to_string(src_rows.rows()) + " rows");

  std::vector<Split> pool_splits;
  if (refs == ReferenceSet::test) pool_splits = {Split::test};
  if (refs == ReferenceSet::train) pool_splits = {Split::train};
  if (refs == ReferenceSet::train_test) pool_splits = {Split::train, Split::test};

  std::vector<const Sentence*> pool_sentences;
  std::vector<Matrix> pool_parts;
  Index pool_rows = 0;
  for (Split s : pool_splits) {
    const Matrix& rows = at_split(in.reference_rows, s, "reference rows");
    const SentenceCorpus& c = at_split(in.corpus, s, "corpus");
    if (c.size() != static_cast<std::size_t>(rows.rows()))
      throw DataError("score_retrieval_as_task: corpus for split " + std::string(to_string(s)) +
                      " is misaligned with the reference view");
    for (const auto& sent : c.sentences) pool_sentences.push_back(&sent);
    pool_parts.push_back(rows);
    pool_rows += rows.rows();
  }
  if (pool_rows == 0) throw DataError("score_retrieval_as_task: empty reference set");
  Matrix pool(pool_rows, pool_parts.front().cols());
  Index at = 0;
  for (const auto& p : pool_parts) {
    pool.middleRows(at, p.rows()) = p;
    at += p.rows();
  }

  const Matrix src_emb = in.embed(in.source_view, src_rows);
  const Matrix ref_emb = in.embed(in.reference_view, pool);
  const auto nearest = nearest_reference(src_emb, ref_emb, in.metric);

  std::vector<Sentence> hyps;
  hyps.reserve(nearest.size());
  for (Index j : nearest) hyps.push_back(*pool_sentences[static_cast<std::size_t>(j)]);

  TaskScore score{refs, metric, 0.0, hyps.size(), pool_sentences.size()};
  score.value = metric == TaskMetric::wer ? corpus_wer(hyps, truth.sentences)
                                          : bleu(hyps, truth.sentences);
  return score;
}

SentenceCorpus nearest_by_edit_distance(const SentenceCorpus& test, const SentenceCorpus& train) {
  if (train.sentences.empty()) throw DataError("nearest_by_edit_distance: empty train corpus");
  if (test.sentences.empty()) throw DataError("nearest_by_edit_distance: empty test corpus");
  SentenceCorpus out;
  out.language = train.language;
  out.sentences.resize(test.size());
  parallel_for(static_cast<Index>(test.size()), [&](Index i) {
    const Sentence& t = test.sentences[static_cast<std::size_t>(i)];
    std::size_t best = 0, best_d = edit_distance(t, train.sentences[0]);
    for (std::size_t j = 1; j < train.size() && best_d > 0; ++j) {
      const std::size_t d = edit_distance(t, train.sentences[j]);
      if (d < best_d) {
        best = j;
        best_d = d;
      }
    }
    out.sentences[static_cast<std::size_t>(i)] = train.sentences[best];
  });
  return out;
}

SentenceCorpus synth_corpus(std::size_t count, std::uint64_t seed, std::size_t vocab,
                            std::size_t min_len, std::size_t max_len) {
  if (vocab < 1 || min_len < 1 || max_len < min_len) throw DataError("synth_corpus: bad parameters");
  auto rng = derive_rng(seed, 7);
  std::uniform_int_distribution<std::size_t> len(min_len, max_len), word(0, vocab - 1);
  SentenceCorpus c;
  c.language = "synthetic";
  c.sentences.resize(count);
  for (auto& s : c.sentences) {
    s.resize(len(rng));
    for (auto& w : s) w = "w" + std::to_string(word(rng));
  }
  return c;
}

}  // namespace corrspace
