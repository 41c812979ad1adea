// src/linear_cca.cpp

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

#include "corrspace/linear_cca.hpp"

#include <fstream>

#include <json.hpp>

#include "corrspace/dataset.hpp"
#include "corrspace/linalg.hpp"

namespace corrspace {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// scale * H^T H, exactly symmetric.
Matrix gram(const Matrix& h, double scale) {
  Matrix lower = Matrix::Zero(h.cols(), h.cols());
  lower.selfadjointView<Eigen::Lower>().rankUpdate(h.transpose(), scale);
  return Matrix(lower.selfadjointView<Eigen::Lower>());
}

}  // namespace

Index default_shared_dim(Index dx, Index dy) { return std::min(dx, dy) / 2; }

CovarianceStats covariance(const Eigen::Ref<const Matrix>& x, const Eigen::Ref<const Matrix>& y,
                           double r) {
  if (x.rows() != y.rows())
    throw DataError("covariance: views have " + std::to_string(x.rows()) + " and " +
                    std::to_string(y.rows()) + " rows");
  if (x.rows() < 2) throw DataError("covariance: need at least 2 samples");
  const double norm = 1.0 / static_cast<double>(x.rows() - 1);

  CovarianceStats s;
  s.mean_x = x.colwise().mean().transpose();
  s.mean_y = y.colwise().mean().transpose();
  const Matrix hx = x.rowwise() - s.mean_x.transpose();
  const Matrix hy = y.rowwise() - s.mean_y.transpose();

  s.cxx = gram(hx, norm);
  s.cyy = gram(hy, norm);
  s.cxy = norm * hx.transpose() * hy;

  s.cxx.diagonal().array() += r;
  s.cyy.diagonal().array() += r;
  return s;
}

CcaModel fit_cca(const Eigen::Ref<const Matrix>& x, const Eigen::Ref<const Matrix>& y, Index k,
                 double r) {
  if (k < 1 || k > std::min(x.cols(), y.cols()))
    throw DataError("fit_cca: k=" + std::to_string(k) + " must be in [1, " +
                    std::to_string(std::min(x.cols(), y.cols())) + "]");
  const CovarianceStats s = covariance(x, y, r);
  const Matrix wx = inv_sqrt_spd_relative(s.cxx);
  const Matrix wy = inv_sqrt_spd_relative(s.cyy);
  const Matrix t = wx * s.cxy * wy;

  Eigen::BDCSVD<Matrix> svd(t, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("fit_cca: SVD failed");
  Matrix left = svd.matrixU().leftCols(k);
  Matrix right = svd.matrixV().leftCols(k);
  normalize_column_signs(left, right);

  CcaModel m;
  m.mean_x = s.mean_x;
  m.mean_y = s.mean_y;
  m.u = wx * left;
  m.v = wy * right;
  m.correlations = svd.singularValues().head(k);
  m.r = r;
  if (!m.u.allFinite() || !m.v.allFinite() || !m.correlations.allFinite())
    throw NumericalError("fit_cca: non-finite solution");
  return m;
}

Matrix project(const CcaModel& model, const Eigen::Ref<const Matrix>& z, Side side) {
  const Vector& mean = side == Side::x ? model.mean_x : model.mean_y;
  const Matrix& w = side == Side::x ? model.u : model.v;
  if (z.cols() != mean.size())
    throw DataError("project: input has " + std::to_string(z.cols()) + " columns, model expects " +
                    std::to_string(mean.size()));
  return (z.rowwise() - mean.transpose()) * w;
}

double cca_objective(const CcaModel& model, const Eigen::Ref<const Matrix>& x,
                     const Eigen::Ref<const Matrix>& y) {
  const Matrix px = center_columns(project(model, x, Side::x));
  const Matrix py = center_columns(project(model, y, Side::y));
  return (px.transpose() * py).trace() / static_cast<double>(x.rows() - 1);
}

void save_cca(const CcaModel& model, const fs::path& dir) {
  fs::create_directories(dir);
  write_fmat(dir / "U.fmat", model.u);
  write_fmat(dir / "V.fmat", model.v);
  write_fmat(dir / "mean_x.fmat", model.mean_x);
  write_fmat(dir / "mean_y.fmat", model.mean_y);
  write_fmat(dir / "correlations.fmat", model.correlations);
  json header{{"method", "cca"}, {"k", model.k()}, {"r", model.r},
              {"views", {model.view_x, model.view_y}}};
  std::ofstream(dir / "header.json") << header.dump(2) << "\n";
}

CcaModel load_cca(const fs::path& dir) {
  std::ifstream in(dir / "header.json");
  if (!in) throw DataError("missing " + (dir / "header.json").string());
  json header;
  try {
    header = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("bad CCA header: " + std::string(e.what()));
  }
  CcaModel m;
  m.view_x = header.at("views").at(0).get<std::string>();
  m.view_y = header.at("views").at(1).get<std::string>();
  m.r = header.at("r").get<double>();
  m.u = read_fmat(dir / "U.fmat");
  m.v = read_fmat(dir / "V.fmat");
  m.mean_x = read_fmat(dir / "mean_x.fmat").reshaped();
  m.mean_y = read_fmat(dir / "mean_y.fmat").reshaped();
  m.correlations = read_fmat(dir / "correlations.fmat").reshaped();
  if (m.u.rows() != m.mean_x.size() || m.v.rows() != m.mean_y.size() || m.u.cols() != m.v.cols())
    throw DataError("inconsistent CCA model in " + dir.string());
  return m;
}

}  // namespace corrspace
