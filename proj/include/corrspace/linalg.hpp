// include/corrspace/linalg.hpp

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

// Small dense helpers shared by the CCA family. Everything here is templated
// on the Eigen expression so float and double callers both work.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "corrspace/common.hpp"

namespace corrspace {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Relative eigenvalue floor used whenever a covariance is inverted.
inline constexpr double kEigenFloorRatio = 1e-12;

/// Largest absolute entry of A - A^T.
template <typename Derived>
typename Derived::Scalar asymmetry(const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<typename Derived::Scalar>::infinity();
  if (a.size() == 0) return 0;
  return (a - a.transpose()).cwiseAbs().maxCoeff();
}

/// Q diag(max(lambda, floor)^-1/2) Q^T for a symmetric C = Q Lambda Q^T.
///
/// Eigenvalues below `floor` are clamped to it. A non-positive floor falls back
/// to the smallest positive normal number, so the result stays finite.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> inv_sqrt_spd(
    const Eigen::MatrixBase<Derived>& c, typename Derived::Scalar floor) {
  using Scalar = typename Derived::Scalar;
  if (c.rows() != c.cols()) throw DataError("inv_sqrt_spd: matrix is not square");
  const Scalar scale = std::max<Scalar>(Scalar(1), c.cwiseAbs().maxCoeff());
  if (asymmetry(c) > Scalar(1e-8) * scale)
    throw DataError("inv_sqrt_spd: matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> eig(c);
  if (eig.info() != Eigen::Success) throw NumericalError("inv_sqrt_spd: eigensolver failed");
  const Scalar eff_floor = floor > 0 ? floor : std::numeric_limits<Scalar>::min();
  auto d = eig.eigenvalues().array().max(eff_floor).rsqrt().matrix();
  const auto& q = eig.eigenvectors();
  DenseMatrix<Scalar> out = q * d.asDiagonal() * q.transpose();
  // Exact symmetry; the product above is only symmetric up to rounding.
  return Scalar(0.5) * (out + out.transpose());
}

/// inv_sqrt_spd with the floor set relative to the largest eigenvalue.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> inv_sqrt_spd_relative(
    const Eigen::MatrixBase<Derived>& c) {
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> probe(c, Eigen::EigenvaluesOnly);
  Scalar top = c.rows() > 0 ? probe.eigenvalues().maxCoeff() : Scalar(0);
  Scalar floor = top > 0 ? Scalar(kEigenFloorRatio) * top : Scalar(1);
  return inv_sqrt_spd(c, floor);
}

/// Flips each column of `vecs` (and the matching column of `partner`, if any)
/// so that its largest-magnitude entry is positive.
template <typename D1, typename D2>
void normalize_column_signs(Eigen::MatrixBase<D1>& vecs, Eigen::MatrixBase<D2>& partner) {
  for (Index j = 0; j < vecs.cols(); ++j) {
    Index arg = 0;
    vecs.col(j).cwiseAbs().maxCoeff(&arg);
    if (vecs(arg, j) < 0) {
      vecs.col(j) *= -1;
      if (partner.cols() > j) partner.col(j) *= -1;
    }
  }
}

/// Subtracts the per-column mean from a samples-by-features matrix.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> center_columns(const Eigen::MatrixBase<Derived>& x) {
  return x.rowwise() - x.colwise().mean();
}

/// Subtracts the per-row mean from a features-by-samples matrix.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> center_rows(const Eigen::MatrixBase<Derived>& x) {
  return x.colwise() - x.rowwise().mean();
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& x) {
  return x.allFinite();
}

}  // namespace corrspace
