// include/corrspace/task_scoring.hpp

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

// Scoring a top-1 retrieval as if it were the output of an ASR or MT system.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "corrspace/common.hpp"
#include "corrspace/retrieval.hpp"

namespace corrspace {

using Sentence = std::vector<std::string>;

struct SentenceCorpus {
  std::vector<Sentence> sentences;
  std::string language;

  std::size_t size() const { return sentences.size(); }
};

/// Whitespace tokenization, casing preserved.
Sentence tokenize(const std::string& line);

/// One pre-tokenized sentence per line.
SentenceCorpus read_corpus(const std::filesystem::path& path, std::string language = "");
void write_corpus(const SentenceCorpus& corpus, const std::filesystem::path& path);

/// Token-level Levenshtein distance with unit costs.
std::size_t edit_distance(const Sentence& a, const Sentence& b);

/// 100 * edits / |ref|. Can exceed 100.
double wer(const Sentence& hyp, const Sentence& ref);

/// Total edits over total reference tokens, as a percentage.
double corpus_wer(const std::vector<Sentence>& hyps, const std::vector<Sentence>& refs);

/// Corpus BLEU in [0, 100], single reference.
///
/// Clipped n-gram matches are pooled over the corpus for n = 1..4. The order
/// is capped at the largest n for which the hypotheses contain at least one
/// n-gram. A zero match count at an order above 1 becomes 1/(total+1). The
/// brevity penalty is exp(1 - ref_len/hyp_len) when hyp_len < ref_len.
double bleu(const std::vector<Sentence>& hyps, const std::vector<Sentence>& refs);

enum class TaskMetric { wer, bleu };
std::string_view to_string(TaskMetric m);
TaskMetric parse_task_metric(std::string_view name);

/// Which split(s) make up the retrieval pool; train+test lists train rows
/// first, then test rows.
enum class ReferenceSet { test, train, train_test };
std::string_view to_string(ReferenceSet r);
ReferenceSet parse_reference_set(std::string_view name);

/// Embeds raw rows of the named view into the shared space (N x k).
using Embedder = std::function<Matrix(const std::string& view, const Matrix& rows)>;

struct TaskInputs {
  Embedder embed;
  std::string source_view;
  std::string reference_view;
  Metric metric = Metric::cosine;
  /// Raw features per split for the two views.
  std::map<Split, Matrix> source_rows;
  std::map<Split, Matrix> reference_rows;
  /// Sentences aligned with the rows of each split.
  std::map<Split, SentenceCorpus> corpus;
};

struct TaskScore {
  ReferenceSet reference_set;
  TaskMetric metric;
  double value = 0.0;
  std::size_t sources = 0;
  std::size_t pool = 0;
};

/// Embeds every source item of `source_split`, retrieves the nearest item of
/// the reference pool, and scores the retrieved sentences against the true
/// sentences of the source items.
TaskScore score_retrieval_as_task(const TaskInputs& in, Split source_split, ReferenceSet refs,
                                  TaskMetric metric);

/// For each test sentence, the train sentence with the smallest edit distance
/// (lowest index on ties).
SentenceCorpus nearest_by_edit_distance(const SentenceCorpus& test, const SentenceCorpus& train);

/// Random token sentences w<id>, one per sample, for synthetic experiments.
SentenceCorpus synth_corpus(std::size_t count, std::uint64_t seed, std::size_t vocab = 500,
                            std::size_t min_len = 5, std::size_t max_len = 15);

}  // namespace corrspace
