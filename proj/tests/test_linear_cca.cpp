// tests/test_linear_cca.cpp

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

#include "corrspace/linalg.hpp"
#include "corrspace/linear_cca.hpp"
#include "support/oracles.hpp"
#include "support/scratch.hpp"

using namespace corrspace;
namespace t = corrspace::testing;

namespace {

// Two views sharing a 3-d latent plus noise, N x 6 and N x 5.
std::pair<Matrix, Matrix> correlated_pair(Index n, std::uint64_t seed, double noise = 0.5) {
  const Matrix z = t::gaussian(n, 3, seed);
  Matrix x = z * t::gaussian(3, 6, seed + 1) + noise * t::gaussian(n, 6, seed + 2);
  Matrix y = z * t::gaussian(3, 5, seed + 3) + noise * t::gaussian(n, 5, seed + 4);
  x.rowwise() += t::gaussian(1, 6, seed + 5).row(0);
  return {x, y};
}

void check_whitened(const CcaModel& m, const Matrix& x, const Matrix& y) {
  const Matrix px = project(m, x, Side::x), py = project(m, y, Side::y);
  const Index k = m.k();
  const double n1 = static_cast<double>(x.rows() - 1);
  CHECK((px.transpose() * px / n1 - Matrix::Identity(k, k)).norm() < 1e-6);
  CHECK((py.transpose() * py / n1 - Matrix::Identity(k, k)).norm() < 1e-6);
}

}  // namespace

TEST_CASE("covariance hand cases") {
  Matrix constant(4, 1);
  constant << 3, 3, 3, 3;
  CHECK(covariance(constant, constant, 0.25).cxx(0, 0) == doctest::Approx(0.25));

  Matrix x(2, 1);
  x << 1, -1;
  const auto s = covariance(x, x, 0.0);
  CHECK(s.cxx(0, 0) == doctest::Approx(2.0));

  const Matrix a = t::gaussian(30, 4, 1);
  const auto same = covariance(a, a, 0.5);
  CHECK((same.cxy - (same.cxx - 0.5 * Matrix::Identity(4, 4))).norm() < 1e-12);

  const Matrix b = t::gaussian(30, 3, 2);
  const auto ab = covariance(a, b, 1e-3);
  CHECK((ab.cxx - t::naive_cov(a, a, 1e-3, true)).norm() < 1e-12);
  CHECK((ab.cyy - t::naive_cov(b, b, 1e-3, true)).norm() < 1e-12);
  CHECK((ab.cxy - t::naive_cov(a, b, 0, false)).norm() < 1e-12);
  CHECK(ab.cxx == ab.cxx.transpose());

  CHECK_THROWS_AS(covariance(a.topRows(1), b.topRows(1), 0.0), DataError);
  CHECK_THROWS_AS(covariance(a, b.topRows(20), 0.0), DataError);
}

TEST_CASE("inv_sqrt_spd") {
  CHECK(inv_sqrt_spd(Matrix::Identity(3, 3), 1e-12).isApprox(Matrix::Identity(3, 3)));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 4;
  d(1, 1) = 9;
  const Matrix r = inv_sqrt_spd(d, 1e-12);
  CHECK(r(0, 0) == doctest::Approx(0.5));
  CHECK(r(1, 1) == doctest::Approx(1.0 / 3));
  CHECK(std::abs(r(0, 1)) < 1e-15);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix g = t::gaussian(6, 6, seed);
    const Matrix a = g * g.transpose() + 0.1 * Matrix::Identity(6, 6);
    const Matrix w = inv_sqrt_spd(a, 1e-12);
    CHECK((w * a * w - Matrix::Identity(6, 6)).norm() < 1e-9);
    CHECK(w == w.transpose());
  }

  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 1e-3;
  CHECK_THROWS_AS(inv_sqrt_spd(asym, 1e-12), DataError);

  // Rank-deficient input is floored, not fatal.
  Matrix singular = Matrix::Zero(3, 3);
  singular(0, 0) = 1;
  const Matrix s = inv_sqrt_spd_relative(singular);
  CHECK(s.allFinite());
  CHECK(s(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("identical views have unit correlations") {
  const Matrix x = t::gaussian(100, 3, 7);
  const auto m = fit_cca(x, x, 3);
  for (Index i = 0; i < 3; ++i) CHECK(std::abs(m.correlations(i) - 1.0) < 1e-8);
  check_whitened(m, x, x);
}

TEST_CASE("1-d views reduce to Pearson correlation") {
  Matrix x(4, 1), y(4, 1);
  x << 1, 2, 3, 4;
  y << 1, 2, 3, 5;
  const auto m = fit_cca(x, y, 1, 0.0);
  CHECK(m.correlations(0) == doctest::Approx(0.9827).epsilon(1e-4));
  CHECK(m.correlations(0) == doctest::Approx(std::abs(t::pearson(x.col(0), y.col(0)))));
}

TEST_CASE("2-d views match the direction-grid search") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Matrix z = t::gaussian(200, 2, 40 + seed);
    const Matrix x = z * t::gaussian(2, 2, 50 + seed) + 0.7 * t::gaussian(200, 2, 60 + seed);
    const Matrix y = z * t::gaussian(2, 2, 70 + seed) + 0.7 * t::gaussian(200, 2, 80 + seed);
    const auto m = fit_cca(x, y, 2, 0.0);
    const auto [rho1, rho2] = t::direction_grid_correlations_2d(x, y, 0.1);
    CHECK(std::abs(m.correlations(0) - rho1) < 1e-3);
    CHECK(std::abs(m.correlations(1) - rho2) < 1e-3);
  }
}

TEST_CASE("fit_cca agrees with the generalized eigenproblem") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto [x, y] = correlated_pair(200, 10 * seed);
    const auto m = fit_cca(x, y, 3);
    const Vector oracle = t::generalized_eig_correlations(x, y, 3, kDefaultCcaRegularizer);
    CHECK((m.correlations - oracle).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("model invariants") {
  const auto [x, y] = correlated_pair(300, 3);
  const auto m = fit_cca(x, y, 4);
  CHECK(m.k() == 4);
  CHECK(m.u.rows() == 6);
  CHECK(m.v.rows() == 5);
  for (Index i = 0; i < 4; ++i) {
    CHECK(m.correlations(i) >= 0.0);
    CHECK(m.correlations(i) <= 1.0 + 1e-8);
    if (i > 0) CHECK(m.correlations(i) <= m.correlations(i - 1));
    // sign convention: largest-magnitude entry of each left singular vector
    // is positive; U = Cxx^-1/2 left, so recover the left vectors.
  }
  const auto s = covariance(x, y, m.r);
  const Matrix left = inv_sqrt_spd_relative(s.cxx).inverse() * m.u;
  for (Index i = 0; i < 4; ++i) {
    Index at;
    left.col(i).cwiseAbs().maxCoeff(&at);
    CHECK(left(at, i) > 0);
  }
  check_whitened(m, x, y);
  // The paired objective equals the sum of correlations.
  CHECK(cca_objective(m, x, y) == doctest::Approx(m.correlations.sum()).epsilon(1e-9));
  CHECK_THROWS_AS(fit_cca(x, y, 6), DataError);
  CHECK_THROWS_AS(fit_cca(x, y, 0), DataError);
}

TEST_CASE("projection centers on the train mean") {
  const auto [x, y] = correlated_pair(100, 5);
  const auto m = fit_cca(x, y, 2);
  const Matrix row = m.mean_x.transpose();
  CHECK(project(m, row, Side::x).norm() < 1e-12);
  CHECK_THROWS_AS(project(m, y, Side::x), DataError);
}

TEST_CASE("affine invariance of canonical correlations") {
  for (std::uint64_t trial = 0; trial < 3; ++trial) {
    const auto [x, y] = correlated_pair(400, 100 + trial);
    const Matrix a = t::well_conditioned(6, 200 + trial), b = t::well_conditioned(5, 300 + trial);
    Matrix xt = x * a.transpose();
    xt.rowwise() += t::gaussian(1, 6, 400 + trial).row(0);
    const Matrix yt = y * b.transpose();
    const auto m1 = fit_cca(x, y, 3), m2 = fit_cca(xt, yt, 3);
    CHECK((m1.correlations - m2.correlations).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("swapping views leaves correlations unchanged") {
  const auto [x, y] = correlated_pair(250, 9);
  const auto a = fit_cca(x, y, 3), b = fit_cca(y, x, 3);
  CHECK((a.correlations - b.correlations).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("tiny regularizer is indistinguishable from none") {
  const auto [x, y] = correlated_pair(250, 13);
  const auto a = fit_cca(x, y, 3, 1e-16), b = fit_cca(x, y, 3, 0.0);
  CHECK((a.correlations - b.correlations).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("rank-deficient views do not crash") {
  Matrix x = t::gaussian(50, 4, 1);
  x.col(3) = x.col(0) + x.col(1);
  const Matrix y = t::gaussian(50, 3, 2);
  const auto m = fit_cca(x, y, 2, 0.0);
  CHECK(m.correlations.allFinite());
  CHECK(m.u.allFinite());
}

TEST_CASE("default shared dimension is half the smaller view") {
  CHECK(default_shared_dim(800, 320) == 160);
  CHECK(default_shared_dim(5, 6) == 2);
  CHECK(default_shared_dim(1, 6) == 0);
}

TEST_CASE("cca model save/load") {
  const auto [x, y] = correlated_pair(80, 21);
  auto m = fit_cca(x, y, 2);
  m.view_x = "speech";
  m.view_y = "text";
  t::ScratchDir dir("cca");
  save_cca(m, dir.path());
  for (const char* f : {"U.fmat", "V.fmat", "mean_x.fmat", "mean_y.fmat", "correlations.fmat",
                        "header.json"})
    CHECK(std::filesystem::exists(dir / f));
  const auto back = load_cca(dir.path());
  CHECK(back.view_x == "speech");
  CHECK(back.view_y == "text");
  CHECK(back.k() == 2);
  CHECK((back.u - m.u).norm() <= 1e-6 * m.u.norm());
  CHECK((back.correlations - m.correlations).norm() < 1e-6);
}
