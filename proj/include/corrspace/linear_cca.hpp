// include/corrspace/linear_cca.hpp

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

#pragma once

#include <filesystem>
#include <string>

#include "corrspace/common.hpp"

namespace corrspace {

/// Regularizer added to the auto-covariances when fitting a final model.
inline constexpr double kDefaultCcaRegularizer = 1e-16;

/// floor(min(d_x, d_y) / 2).
Index default_shared_dim(Index dx, Index dy);

struct CovarianceStats {
  Matrix cxx, cyy, cxy;
  Vector mean_x, mean_y;
};

/// Empirical covariances of two row-aligned sample matrices (rows = samples),
/// normalized by N-1. `r` is added to the diagonals of cxx and cyy only.
CovarianceStats covariance(const Eigen::Ref<const Matrix>& x,
                           const Eigen::Ref<const Matrix>& y, double r);

/// Two-view linear CCA model. Projections are (z - mean) * U, (z - mean) * V.
struct CcaModel {
  std::string view_x = "x";
  std::string view_y = "y";
  Vector mean_x, mean_y;
  Matrix u, v;            // d_x x k, d_y x k
  Vector correlations;    // non-increasing
  double r = kDefaultCcaRegularizer;

  Index k() const { return u.cols(); }
};

/// Solves CCA through the SVD of Cxx^-1/2 Cxy Cyy^-1/2 and keeps the top k
/// pairs. Each pair is sign-normalized so the left singular vector's largest
/// magnitude entry is positive.
CcaModel fit_cca(const Eigen::Ref<const Matrix>& x, const Eigen::Ref<const Matrix>& y,
                 Index k, double r = kDefaultCcaRegularizer);

enum class Side { x, y };

Matrix project(const CcaModel& model, const Eigen::Ref<const Matrix>& z, Side side);

/// Sample estimate of E[tr(U^T X Y^T V)] on centered data (N-1 normalized).
double cca_objective(const CcaModel& model, const Eigen::Ref<const Matrix>& x,
                     const Eigen::Ref<const Matrix>& y);

/// Model directory: U.fmat, V.fmat, mean_x.fmat, mean_y.fmat,
/// correlations.fmat, header.json.
void save_cca(const CcaModel& model, const std::filesystem::path& dir);
CcaModel load_cca(const std::filesystem::path& dir);

}  // namespace corrspace
