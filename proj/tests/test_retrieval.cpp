// tests/test_retrieval.cpp

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

#include <cmath>
#include <cstdlib>

#include "corrspace/retrieval.hpp"
#include "support/oracles.hpp"

using namespace corrspace;
namespace t = corrspace::testing;

TEST_CASE("self retrieval is perfect") {
  const Matrix x = t::gaussian(50, 4, 1);
  CHECK(recall_at_n(x, x, 1) == 100.0);
  CHECK(recall_at_n(x, x, 1, Metric::euclidean) == 100.0);
}

TEST_CASE("hand-built points with a decoy") {
  Matrix src(3, 2), refs(4, 2);
  src << 0, 0, 10, 0, 20, 0;
  refs << 0, 0.1, 10, 0.1, 25, 0, 19, 0;
  CHECK(recall_at_n(src, refs, 1, Metric::euclidean) == doctest::Approx(66.67).epsilon(1e-4));
  CHECK(recall_at_n(src, refs, 2, Metric::euclidean) == 100.0);
  CHECK(recall_at_n(src, refs, 4, Metric::euclidean) == 100.0);
}

TEST_CASE("agrees with a full-sort oracle, including ties") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    // Coarse quantization forces exact distance ties.
    const Matrix a = (t::gaussian(60, 3, seed) * 1.5).array().round().matrix();
    const Matrix b = (a + t::gaussian(60, 3, seed + 50)).array().round().matrix();
    // Cosine ties on rounded data depend on the order of floating-point
    // operations, so cosine is compared on continuous data only.
    const Matrix ca = t::gaussian(60, 3, seed + 100);
    const Matrix cb = ca + t::gaussian(60, 3, seed + 150);
    for (Index n : {1, 3, 10}) {
      CHECK(recall_at_n(a, b, n, Metric::euclidean) == t::sorted_recall(a, b, n, false));
      CHECK(recall_at_n(ca, cb, n, Metric::cosine) == t::sorted_recall(ca, cb, n, true));
    }
  }
}

TEST_CASE("ties go to the lowest reference index") {
  const Matrix src = t::gaussian(20, 3, 1);
  const Matrix refs = Matrix::Ones(20, 3);
  // Every reference is equidistant: source i is found iff i < n.
  CHECK(recall_at_n(src, refs, 5, Metric::euclidean) == doctest::Approx(25.0));
  const auto nearest = nearest_reference(src, refs, Metric::cosine);
  for (Index j : nearest) CHECK(j == 0);
}

TEST_CASE("n >= N gives 100") {
  const Matrix a = t::gaussian(30, 2, 1), b = t::gaussian(30, 2, 2);
  CHECK(recall_at_n(a, b, 30) == 100.0);
  CHECK(recall_at_n(a, b, 31) == 100.0);
}

TEST_CASE("argument errors") {
  const Matrix a = t::gaussian(5, 2, 1);
  CHECK_THROWS_AS(recall_at_n(Matrix(0, 2), Matrix(0, 2), 1), DataError);
  CHECK_THROWS_AS(recall_at_n(a, a.topRows(4), 1), DataError);
  CHECK_THROWS_AS(recall_at_n(a, t::gaussian(5, 3, 1), 1), DataError);
  CHECK_THROWS_AS(recall_at_n(a, a, 0), DataError);
  CHECK_THROWS_AS(nearest_reference(a, Matrix(0, 2), Metric::cosine), DataError);
  CHECK_THROWS_AS(parse_metric("manhattan"), ConfigError);
  CHECK(parse_metric("euclidean") == Metric::euclidean);
}

TEST_CASE("monotone in n") {
  const Matrix a = t::gaussian(200, 4, 3);
  const Matrix b = a + 1.5 * t::gaussian(200, 4, 4);
  double prev = 0.0;
  for (Index n = 1; n <= 200; n += 7) {
    const double r = recall_at_n(a, b, n);
    CHECK(r >= prev);
    prev = r;
  }
}

TEST_CASE("cosine ignores positive row scaling of sources") {
  const Matrix a = t::gaussian(100, 5, 5);
  const Matrix b = a + t::gaussian(100, 5, 6);
  Vector scale = (t::gaussian(100, 1, 7).array().abs() + 0.1).matrix().col(0);
  const Matrix scaled = scale.asDiagonal() * a;
  for (Index n : {1, 5, 10})
    CHECK(recall_at_n(a, b, n, Metric::cosine) == recall_at_n(scaled, b, n, Metric::cosine));
}

TEST_CASE("euclidean recall is invariant to a common rotation") {
  const Matrix a = t::gaussian(150, 4, 8);
  const Matrix b = a + t::gaussian(150, 4, 9);
  const Matrix q = t::orthogonal(4, 10);
  for (Index n : {1, 10})
    CHECK(recall_at_n(a, b, n, Metric::euclidean) ==
          recall_at_n(a * q, b * q, n, Metric::euclidean));
}

TEST_CASE("distance matrix definitions") {
  Matrix s(2, 2), r(3, 2);
  s << 1, 0, 0, 0;
  r << 2, 0, 0, 3, -1, -1;
  const Matrix c = distance_matrix(s, r, Metric::cosine);
  CHECK(c(0, 0) == doctest::Approx(0.0));
  CHECK(c(0, 1) == doctest::Approx(1.0));
  CHECK(c(0, 2) == doctest::Approx(1.0 + 1.0 / std::sqrt(2.0)));
  CHECK(c(1, 0) == 1.0);  // zero-norm source
  const Matrix e = distance_matrix(s, r, Metric::euclidean);
  CHECK(e(0, 0) == doctest::Approx(1.0));
  CHECK(e(0, 1) == doctest::Approx(10.0));
  CHECK(e(1, 2) == doctest::Approx(2.0));
}

TEST_CASE("random baseline") {
  CHECK(random_baseline(2022, 10) == doctest::Approx(0.4946).epsilon(1e-4));
  CHECK(random_baseline(2361, 10) == doctest::Approx(0.4235).epsilon(1e-4));
  CHECK(random_baseline(7, 7) == 100.0);
  CHECK_THROWS_AS(random_baseline(5, 0), DataError);
  CHECK_THROWS_AS(random_baseline(5, 6), DataError);
}

TEST_CASE("random projections retrieve at the chance rate") {
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed)
    total += recall_at_n(t::gaussian(2022, 4, 1000 + seed), t::gaussian(2022, 4, 5000 + seed), 10);
  const double mean = total / 100;
  CHECK(mean >= 0.3);
  CHECK(mean <= 0.7);
}

TEST_CASE("thread count does not change results") {
  const Matrix a = t::gaussian(300, 3, 1), b = a + t::gaussian(300, 3, 2);
  ::setenv("CORRSPACE_THREADS", "1", 1);
  const double one = recall_at_n(a, b, 5);
  const auto n1 = nearest_reference(a, b, Metric::cosine);
  ::setenv("CORRSPACE_THREADS", "4", 1);
  CHECK(worker_count() == 4);
  CHECK(recall_at_n(a, b, 5) == one);
  CHECK(nearest_reference(a, b, Metric::cosine) == n1);
  ::unsetenv("CORRSPACE_THREADS");
}

TEST_CASE("all ordered pairs") {
  const Matrix x = t::gaussian(40, 3, 1);
  SUBCASE("two views are directional") {
    const Matrix y = x + 0.8 * t::gaussian(40, 3, 2);
    const auto r = evaluate_all_pairs({{"x", x}, {"y", y}}, 1, Metric::euclidean);
    REQUIRE(r.pairs.size() == 2);
    CHECK(r.pairs[0].source == "x");
    CHECK(r.pairs[0].reference == "y");
    CHECK(r.score("x", "y") != r.score("y", "x"));
    CHECK(r.aggregate == std::max(r.score("x", "y"), r.score("y", "x")));
  }
  SUBCASE("four views give twelve scores in source-major order") {
    std::vector<NamedEmbedding> e;
    for (int j = 0; j < 4; ++j)
      e.emplace_back("v" + std::to_string(j), x + 0.5 * t::gaussian(40, 3, 10 + j));
    const auto r = evaluate_all_pairs(e, 10);
    REQUIRE(r.pairs.size() == 12);
    CHECK(r.pairs[0].source == "v0");
    CHECK(r.pairs[0].reference == "v1");
    CHECK(r.pairs[3].source == "v1");
    CHECK(r.pairs[3].reference == "v0");
    double best = 0;
    for (const auto& p : r.pairs) {
      CHECK(p.source != p.reference);
      CHECK(p.recall >= 0.0);
      CHECK(p.recall <= 100.0);
      best = std::max(best, p.recall);
    }
    CHECK(r.aggregate == best);
    CHECK(r.view_order() == std::vector<std::string>{"v0", "v1", "v2", "v3"});
  }
  SUBCASE("identical views") {
    const auto r = evaluate_all_pairs({{"a", x}, {"b", x}, {"c", x}}, 1);
    for (const auto& p : r.pairs) CHECK(p.recall == 100.0);
    CHECK(r.aggregate == 100.0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(evaluate_all_pairs({{"a", x}}, 1), DataError);
    CHECK_THROWS_AS(evaluate_all_pairs({{"a", x}, {"b", x.topRows(10)}}, 1), DataError);
  }
}

TEST_CASE("report json and table") {
  const Matrix x = t::gaussian(30, 3, 1);
  auto r = evaluate_all_pairs({{"speech", x}, {"text", x + 0.3 * t::gaussian(30, 3, 2)}}, 10);
  r.split = "dev";
  r.model_id = "cca";
  const auto j = to_json(r);
  CHECK(j.at("random_baseline").get<double>() == doctest::Approx(100.0 / 3));
  const auto back = report_from_json(j);
  CHECK(back.pairs.size() == 2);
  CHECK(back.score("text", "speech") == r.score("text", "speech"));
  CHECK(back.aggregate == r.aggregate);
  CHECK(back.split == "dev");
  const std::string table = format_table(r);
  CHECK(table.find("Recall@10") != std::string::npos);
  CHECK(table.find("speech") != std::string::npos);
  CHECK(table.find("random baseline") != std::string::npos);
  CHECK(table.find(" -") != std::string::npos);
}
