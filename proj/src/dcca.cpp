// src/dcca.cpp

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

#include "corrspace/dcca.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "corrspace/linalg.hpp"

namespace corrspace {

namespace fs = std::filesystem;
using nlohmann::json;

DccaObjective dcca_objective(const Eigen::Ref<const Matrix>& yx, const Eigen::Ref<const Matrix>& yy,
                             double r) {
  const Index m = yx.cols();
  if (yy.cols() != m) throw DataError("dcca_objective: batches differ in size");
  if (m <= std::max(yx.rows(), yy.rows()))
    throw DataError("dcca_objective: batch of " + std::to_string(m) +
                    " samples is too small for output width " +
                    std::to_string(std::max(yx.rows(), yy.rows())));
  const double scale = 1.0 / static_cast<double>(m - 1);
  const Matrix hx = center_rows(yx);
  const Matrix hy = center_rows(yy);

  Matrix s11 = scale * hx * hx.transpose();
  Matrix s22 = scale * hy * hy.transpose();
  s11 = 0.5 * (s11 + s11.transpose()).eval();
  s22 = 0.5 * (s22 + s22.transpose()).eval();
  s11.diagonal().array() += r;
  s22.diagonal().array() += r;
  const Matrix s12 = scale * hx * hy.transpose();

  const Matrix w1 = inv_sqrt_spd_relative(s11);
  const Matrix w2 = inv_sqrt_spd_relative(s22);
  Eigen::JacobiSVD<Matrix> svd(w1 * s12 * w2, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Matrix& u = svd.matrixU();
  const Matrix& v = svd.matrixV();
  const Vector& d = svd.singularValues();

  DccaObjective out;
  out.correlation = d.sum();
  const Matrix delta12 = w1 * u * v.transpose() * w2;
  const Matrix delta11 = -0.5 * w1 * u * d.asDiagonal() * u.transpose() * w1;
  const Matrix delta22 = -0.5 * w2 * v * d.asDiagonal() * v.transpose() * w2;
  out.dyx = scale * (2.0 * delta11 * hx + delta12 * hy);
  out.dyy = scale * (2.0 * delta22 * hy + delta12.transpose() * hx);
  return out;
}

namespace {

// Samples as columns, centered with the given train mean.
Matrix as_batch(const Eigen::Ref<const Matrix>& rows, const Vector& mean) {
  return (rows.rowwise() - mean.transpose()).transpose();
}

struct HeadFit {
  CcaModel head;
  RetrievalReport dev;
};

HeadFit fit_head_and_score(const Mlp& nx, const Mlp& ny, const Matrix& tx, const Matrix& ty,
                           const Matrix& dx, const Matrix& dy, const std::string& vx,
                           const std::string& vy, const TrainConfig& cfg) {
  const Matrix ox = nx.forward(tx).transpose();
  const Matrix oy = ny.forward(ty).transpose();
  if (!ox.allFinite() || !oy.allFinite()) throw NumericalError("train_dcca: non-finite outputs");
  HeadFit fit;
  fit.head = fit_cca(ox, oy, std::min(ox.cols(), oy.cols()), cfg.final_r);
  fit.head.view_x = vx;
  fit.head.view_y = vy;
  const Matrix ex = project(fit.head, nx.forward(dx).transpose(), Side::x);
  const Matrix ey = project(fit.head, ny.forward(dy).transpose(), Side::y);
  fit.dev = evaluate_all_pairs({{vx, ex}, {vy, ey}}, cfg.recall_n, cfg.metric);
  fit.dev.split = "dev";
  return fit;
}

}  // namespace

DccaModel train_dcca(const MultiviewDataset& ds, const std::string& view_x,
                     const std::string& view_y, const TrainConfig& config,
                     std::optional<DccaInit> init) {
  validate(ds);
  if (view_x == view_y) throw ConfigError("train_dcca: the two views must differ");
  const Matrix xtr = ds.rows(view_x, Split::train);
  const Matrix ytr = ds.rows(view_y, Split::train);
  const Matrix xdev = ds.rows(view_x, Split::dev);
  const Matrix ydev = ds.rows(view_y, Split::dev);

  DccaModel model;
  model.view_x = view_x;
  model.view_y = view_y;
  model.config = config;
  model.input_mean_x = xtr.colwise().mean().transpose();
  model.input_mean_y = ytr.colwise().mean().transpose();

  if (init) {
    model.net_x = std::move(init->net_x);
    model.net_y = std::move(init->net_y);
    if (model.net_x.input_dim() != xtr.cols() || model.net_y.input_dim() != ytr.cols())
      throw DataError("train_dcca: initial networks do not match the view dimensions");
    model.config.k = std::min(model.net_x.output_dim(), model.net_y.output_dim());
  } else {
    if (config.k < 1) throw ConfigError("train_dcca: k must be >= 1");
    const Index hx = config.hidden > 0 ? config.hidden : xtr.cols();
    const Index hy = config.hidden > 0 ? config.hidden : ytr.cols();
    auto seeds = derive_rng(config.seed, 1);
    const std::uint64_t seed_x = seeds();
    const std::uint64_t seed_y = seeds();
    model.net_x = Mlp(xtr.cols(), hx, config.k, seed_x, config.activation);
    model.net_y = Mlp(ytr.cols(), hy, config.k, seed_y, config.activation);
  }
  const Index k = std::max(model.net_x.output_dim(), model.net_y.output_dim());

  const Matrix tx = as_batch(xtr, model.input_mean_x);
  const Matrix ty = as_batch(ytr, model.input_mean_y);
  const Matrix dx = as_batch(xdev, model.input_mean_x);
  const Matrix dy = as_batch(ydev, model.input_mean_y);
  const Index n_train = tx.cols();

  Index batch_size = config.batch_size;
  if (batch_size > n_train) {
    model.log.warnings.push_back("batch size " + std::to_string(batch_size) +
                                 " clamped to train size " + std::to_string(n_train));
    batch_size = n_train;
  }
  if (batch_size <= k)
    throw ConfigError("train_dcca: batch size " + std::to_string(batch_size) +
                      " must exceed output width " + std::to_string(k));

  AdamOptimizer opt_x(config.adam), opt_y(config.adam);
  auto shuffle_rng = derive_rng(config.seed, 2);
  std::vector<Index> order(static_cast<std::size_t>(n_train));

  Mlp best_x = model.net_x, best_y = model.net_y;
  double best_score = -1.0;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double objective_sum = 0.0;
    const auto batches = make_batches(order, batch_size, k + 1);
    for (const auto& idx : batches) {
      MlpCache cx, cy;
      const Matrix fx = model.net_x.forward(tx(Eigen::all, idx), cx);
      const Matrix fy = model.net_y.forward(ty(Eigen::all, idx), cy);
      const DccaObjective obj = dcca_objective(fx, fy, config.train_r);
      if (!std::isfinite(obj.correlation))
        throw NumericalError("train_dcca: non-finite objective at epoch " + std::to_string(epoch));
      objective_sum += obj.correlation;
      // Ascent on the correlation = descent on its negation.
      const MlpGrads gx = model.net_x.backward(cx, -obj.dyx);
      const MlpGrads gy = model.net_y.backward(cy, -obj.dyy);
      opt_x.step(model.net_x, gx);
      opt_y.step(model.net_y, gy);
    }

    HeadFit fit = fit_head_and_score(model.net_x, model.net_y, tx, ty, dx, dy, view_x, view_y,
                                     config);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_objective = objective_sum / static_cast<double>(batches.size());
    rec.dev = std::move(fit.dev);
    if (rec.dev.aggregate > best_score) {
      best_score = rec.dev.aggregate;
      best_x = model.net_x;
      best_y = model.net_y;
      model.log.selected_epoch = epoch;
    }
    model.log.epochs.push_back(std::move(rec));
  }

  model.net_x = std::move(best_x);
  model.net_y = std::move(best_y);
  HeadFit final_fit =
      fit_head_and_score(model.net_x, model.net_y, tx, ty, dx, dy, view_x, view_y, config);
  model.head = std::move(final_fit.head);
  if (model.log.epochs.empty()) {
    EpochRecord rec;
    rec.dev = std::move(final_fit.dev);
    model.log.epochs.push_back(std::move(rec));
  }
  return model;
}

Matrix embed(const DccaModel& model, const Eigen::Ref<const Matrix>& z, Side side) {
  const Mlp& net = side == Side::x ? model.net_x : model.net_y;
  const Vector& mean = side == Side::x ? model.input_mean_x : model.input_mean_y;
  if (z.cols() != mean.size())
    throw DataError("embed: input has " + std::to_string(z.cols()) + " columns, expected " +
                    std::to_string(mean.size()));
  return project(model.head, net.forward(as_batch(z, mean)).transpose(), side);
}

void save_dcca(const DccaModel& model, const fs::path& dir) {
  fs::create_directories(dir);
  model.net_x.save(dir / "net_x");
  model.net_y.save(dir / "net_y");
  save_cca(model.head, dir / "head");
  write_fmat(dir / "input_mean_x.fmat", model.input_mean_x);
  write_fmat(dir / "input_mean_y.fmat", model.input_mean_y);
  json header{{"method", "dcca"},
              {"views", {model.view_x, model.view_y}},
              {"config", to_json(model.config)},
              {"selected_epoch", model.log.selected_epoch}};
  std::ofstream(dir / "header.json") << header.dump(2) << "\n";
}

DccaModel load_dcca(const fs::path& dir) {
  std::ifstream in(dir / "header.json");
  if (!in) throw DataError("missing " + (dir / "header.json").string());
  try {
    const json header = json::parse(in);
    DccaModel m;
    m.view_x = header.at("views").at(0).get<std::string>();
    m.view_y = header.at("views").at(1).get<std::string>();
    m.net_x = Mlp::load(dir / "net_x");
    m.net_y = Mlp::load(dir / "net_y");
    m.head = load_cca(dir / "head");
    m.input_mean_x = read_fmat(dir / "input_mean_x.fmat").reshaped();
    m.input_mean_y = read_fmat(dir / "input_mean_y.fmat").reshaped();
    m.log.selected_epoch = header.value("selected_epoch", 0);
    const auto& c = header.at("config");
    m.config.k = c.at("k").get<Index>();
    m.config.final_r = c.at("r").get<double>();
    m.config.train_r = c.at("train_r").get<double>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    return m;
  } catch (const json::exception& e) {
    throw DataError("bad DCCA header in " + dir.string() + ": " + e.what());
  }
}

}  // namespace corrspace
