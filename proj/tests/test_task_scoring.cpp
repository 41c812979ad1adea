// tests/test_task_scoring.cpp

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


#include <doctest.h>

#include <random>

#include "corrspace/task_scoring.hpp"
#include "support/oracles.hpp"
#include "support/scratch.hpp"

using namespace corrspace;
namespace t = corrspace::testing;

namespace {

Sentence s(const std::string& line) { return tokenize(line); }

double round2(double v) { return std::round(v * 100.0) / 100.0; }

Embedder identity_embedder() {
  return [](const std::string&, const Matrix& rows) { return rows; };
}

// Source and reference views equal per split, with one sentence per row.
TaskInputs planted(Index n_train, Index n_test, std::uint64_t seed) {
  TaskInputs in;
  in.embed = identity_embedder();
  in.source_view = "speech";
  in.reference_view = "text";
  const auto all = synth_corpus(static_cast<std::size_t>(n_train + n_test), seed);
  SentenceCorpus train, test;
  train.sentences.assign(all.sentences.begin(), all.sentences.begin() + n_train);
  test.sentences.assign(all.sentences.begin() + n_train, all.sentences.end());
  in.corpus[Split::train] = train;
  in.corpus[Split::test] = test;
  const Matrix tr = t::gaussian(n_train, 6, seed + 1), te = t::gaussian(n_test, 6, seed + 2);
  in.source_rows[Split::train] = tr;
  in.reference_rows[Split::train] = tr;
  in.source_rows[Split::test] = te;
  in.reference_rows[Split::test] = te;
  return in;
}

}  // namespace

TEST_CASE("wer examples") {
  CHECK(wer(s("a b c"), s("a b c")) == 0.0);
  CHECK(round2(wer(s("a x c d"), s("a b c"))) == 66.67);
  CHECK(wer({}, s("a b c")) == 100.0);
  CHECK(round2(wer(s("a b c d e f g"), s("a b c"))) == 133.33);
  CHECK_THROWS_AS(wer(s("a"), {}), DataError);
}

TEST_CASE("edit distance agrees with the full table and is symmetric") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> len(0, 8), tok(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    Sentence a(static_cast<std::size_t>(len(rng))), b(static_cast<std::size_t>(len(rng)));
    for (auto& x : a) x = std::string(1, static_cast<char>('a' + tok(rng)));
    for (auto& x : b) x = std::string(1, static_cast<char>('a' + tok(rng)));
    CHECK(edit_distance(a, b) == t::table_edit_distance(a, b));
    CHECK(edit_distance(a, b) == edit_distance(b, a));
    if (!a.empty() && !b.empty())
      CHECK(wer(a, b) * static_cast<double>(b.size()) ==
            doctest::Approx(wer(b, a) * static_cast<double>(a.size())));
  }
}

TEST_CASE("corpus wer pools edits over reference tokens") {
  const std::vector<Sentence> hyps{s("a x c d"), s("e f")};
  const std::vector<Sentence> refs{s("a b c"), s("e f g h")};
  // (2 + 2) / (3 + 4)
  CHECK(round2(corpus_wer(hyps, refs)) == 57.14);
  CHECK_THROWS_AS(corpus_wer(hyps, {refs[0]}), DataError);
  CHECK_THROWS_AS(corpus_wer({s("a")}, {Sentence{}}), DataError);
}

TEST_CASE("bleu examples") {
  CHECK(bleu({s("a b c d e")}, {s("a b c d e")}) == doctest::Approx(100.0));
  CHECK(round2(bleu({s("a b c d x f")}, {s("a b c d e f")})) == 53.73);
  CHECK(round2(bleu({s("a b")}, {s("a b c d")})) == 36.79);
  // Orders 2 and 3 have no matches: smoothed to 1/3 and 1/2.
  CHECK(round2(bleu({s("a b c")}, {s("a x c")})) == 48.07);
  // No unigram match.
  CHECK(bleu({s("x y z")}, {s("a b c")}) == 0.0);
  // Clipping: "the the the" against one "the".
  CHECK(round2(bleu({s("the")}, {s("the")})) == 100.0);
  CHECK(round2(bleu({s("the the")}, {s("the cat")})) == round2(100.0 * std::sqrt(0.5 * 0.5)));
  CHECK_THROWS_AS(bleu({}, {}), DataError);
  CHECK_THROWS_AS(bleu({s("a")}, {s("a"), s("b")}), DataError);
}

TEST_CASE("bleu of a corpus with itself is 100") {
  const auto c = synth_corpus(50, 3, 20, 1, 8);
  CHECK(bleu(c.sentences, c.sentences) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(corpus_wer(c.sentences, c.sentences) == 0.0);
}

TEST_CASE("reference set = test with perfect embeddings is exact") {
  const auto in = planted(80, 40, 1);
  const auto w = score_retrieval_as_task(in, Split::test, ReferenceSet::test, TaskMetric::wer);
  const auto b = score_retrieval_as_task(in, Split::test, ReferenceSet::test, TaskMetric::bleu);
  CHECK(w.value == 0.0);
  CHECK(b.value == doctest::Approx(100.0));
  CHECK(w.sources == 40);
  CHECK(w.pool == 40);
}

TEST_CASE("a pool without the test sentences scores worse") {
  const auto in = planted(200, 50, 2);
  const double train =
      score_retrieval_as_task(in, Split::test, ReferenceSet::train, TaskMetric::wer).value;
  const auto both = score_retrieval_as_task(in, Split::test, ReferenceSet::train_test, TaskMetric::wer);
  CHECK(both.pool == 250);
  CHECK(both.value < train);
  CHECK(train > 50.0);
  CHECK(score_retrieval_as_task(in, Split::test, ReferenceSet::train, TaskMetric::bleu).value <
        score_retrieval_as_task(in, Split::test, ReferenceSet::train_test, TaskMetric::bleu).value);
}

TEST_CASE("degenerate model retrieves the first reference for everything") {
  auto in = planted(30, 20, 3);
  in.embed = [](const std::string&, const Matrix& rows) { return Matrix::Ones(rows.rows(), 2); };
  const auto score = score_retrieval_as_task(in, Split::test, ReferenceSet::train, TaskMetric::wer);
  const std::vector<Sentence> hyps(20, in.corpus[Split::train].sentences[0]);
  CHECK(score.value == corpus_wer(hyps, in.corpus[Split::test].sentences));
}

TEST_CASE("misaligned or missing inputs are data errors") {
  auto in = planted(30, 20, 4);
  in.corpus[Split::test].sentences.pop_back();
  CHECK_THROWS_AS(score_retrieval_as_task(in, Split::test, ReferenceSet::train, TaskMetric::wer),
                  DataError);
  in = planted(30, 20, 4);
  in.corpus[Split::train].sentences.pop_back();
  CHECK_THROWS_AS(score_retrieval_as_task(in, Split::test, ReferenceSet::train, TaskMetric::wer),
                  DataError);
  in = planted(30, 20, 4);
  in.reference_rows.erase(Split::train);
  CHECK_THROWS_AS(score_retrieval_as_task(in, Split::test, ReferenceSet::train, TaskMetric::wer),
                  DataError);
  in = planted(30, 20, 4);
  in.reference_rows[Split::train] = Matrix(0, 6);
  in.corpus[Split::train].sentences.clear();
  CHECK_THROWS_AS(score_retrieval_as_task(in, Split::test, ReferenceSet::train, TaskMetric::wer),
                  DataError);
}

TEST_CASE("nearest by edit distance") {
  SentenceCorpus train{{s("a b"), s("x y z")}, "en"};
  SentenceCorpus test{{s("a b c"), s("x y z")}, "en"};
  const auto out = nearest_by_edit_distance(test, train);
  CHECK(out.sentences[0] == s("a b"));
  CHECK(out.sentences[1] == s("x y z"));
  SentenceCorpus tie{{s("p q"), s("r s")}, "en"};
  CHECK(nearest_by_edit_distance({{s("z z")}, "en"}, tie).sentences[0] == s("p q"));
  CHECK_THROWS_AS(nearest_by_edit_distance(test, SentenceCorpus{}), DataError);
}

TEST_CASE("corpus io and names") {
  t::ScratchDir dir("corpus");
  const auto c = synth_corpus(10, 9);
  write_corpus(c, dir / "c.txt");
  const auto back = read_corpus(dir / "c.txt");
  CHECK(back.sentences == c.sentences);
  CHECK_THROWS_AS(read_corpus(dir / "missing.txt"), DataError);
  CHECK(s("  a\tb  c ") == Sentence{"a", "b", "c"});
  CHECK(parse_reference_set("train+test") == ReferenceSet::train_test);
  CHECK(to_string(ReferenceSet::train_test) == "train+test");
  CHECK_THROWS_AS(parse_reference_set("dev"), ConfigError);
  CHECK(parse_task_metric("bleu") == TaskMetric::bleu);
  CHECK_THROWS_AS(parse_task_metric("ter"), ConfigError);
  const auto again = synth_corpus(10, 9);
  CHECK(again.sentences == c.sentences);
  for (const auto& sent : c.sentences) {
    CHECK(sent.size() >= 5);
    CHECK(sent.size() <= 15);
  }
}
