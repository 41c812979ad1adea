// src/dgcca.cpp

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

#include "corrspace/dgcca.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "corrspace/linalg.hpp"

namespace corrspace {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Top-k right singular vectors of a (rows x cols), as the columns of the
// result. Wide inputs go through a thin QR of a^T first so the SVD runs on a
// square factor.
Matrix top_right_singular_vectors(const Matrix& a, Index k, Vector& sigma) {
  if (a.rows() < a.cols()) {
    Eigen::HouseholderQR<Matrix> qr(a.transpose());
    const Index h = a.rows();
    const Matrix r = qr.matrixQR().topRows(h).triangularView<Eigen::Upper>();
    // a = r^T q^T, so right singular vectors of a are q times left ones of r.
    Eigen::BDCSVD<Matrix> svd(r, Eigen::ComputeThinU);
    if (svd.info() != Eigen::Success) throw NumericalError("gcca_solve: SVD failed");
    sigma = svd.singularValues().head(k);
    Matrix left = Matrix::Zero(a.cols(), k);
    left.topRows(h) = svd.matrixU().leftCols(k);
    return qr.householderQ() * left;
  }
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("gcca_solve: SVD failed");
  sigma = svd.singularValues().head(k);
  return svd.matrixV().leftCols(k);
}

}  // namespace

GccaSolution gcca_solve(const std::vector<Matrix>& outputs, Index k, double r,
                        const std::vector<double>& weights) {
  if (outputs.empty()) throw DataError("gcca_solve: no views");
  const Index m = outputs.front().cols();
  std::vector<double> w = weights.empty() ? std::vector<double>(outputs.size(), 1.0) : weights;
  if (w.size() != outputs.size()) throw DataError("gcca_solve: one weight per view required");
  for (double wj : w)
    if (!(wj > 0)) throw DataError("gcca_solve: weights must be positive");
  Index total = 0;
  for (const auto& y : outputs) {
    if (y.cols() != m) throw DataError("gcca_solve: views differ in sample count");
    total += y.rows();
  }
  if (k < 1 || k > m)
    throw DataError("gcca_solve: k=" + std::to_string(k) + " exceeds batch size " + std::to_string(m));
  if (k > total)
    throw DataError("gcca_solve: k=" + std::to_string(k) + " exceeds total output width " +
                    std::to_string(total));

  GccaSolution sol;
  std::vector<Matrix> centered, inv_sqrt;
  Matrix stacked(total, m);
  Index at = 0;
  for (std::size_t j = 0; j < outputs.size(); ++j) {
    sol.mean.push_back(outputs[j].rowwise().mean());
    centered.push_back(outputs[j].colwise() - sol.mean.back());
    const Matrix& y = centered.back();
    Matrix c = Matrix::Zero(y.rows(), y.rows());
    c.selfadjointView<Eigen::Lower>().rankUpdate(y);
    c = Matrix(c.selfadjointView<Eigen::Lower>());
    c.diagonal().array() += r;
    inv_sqrt.push_back(inv_sqrt_spd_relative(c));
    stacked.middleRows(at, y.rows()).noalias() = std::sqrt(w[j]) * (inv_sqrt.back() * y);
    at += y.rows();
  }

  Vector sigma;
  Matrix gt = top_right_singular_vectors(stacked, k, sigma);  // m x k
  Matrix no_partner(0, 0);
  normalize_column_signs(gt, no_partner);
  sol.g = gt.transpose();
  sol.eigenvalues = sigma.cwiseAbs2();

  for (std::size_t j = 0; j < outputs.size(); ++j) {
    const Matrix& y = centered[j];
    // C^-1 Y G^T, with C^-1 taken as (C^-1/2)^2 so floored directions agree.
    sol.u.push_back(inv_sqrt[j] * (inv_sqrt[j] * (y * gt)));
    sol.loss += w[j] * (sol.g - sol.u.back().transpose() * y).squaredNorm();
  }
  if (!std::isfinite(sol.loss) || !sol.g.allFinite())
    throw NumericalError("gcca_solve: non-finite solution");
  return sol;
}

Matrix dgcca_gradient(const Eigen::Ref<const Matrix>& y, const Eigen::Ref<const Matrix>& g,
                      const Eigen::Ref<const Matrix>& u, double w) {
  if (u.rows() != y.rows() || u.cols() != g.rows() || g.cols() != y.cols())
    throw DataError("dgcca_gradient: shape mismatch");
  return w * (2.0 * u * (u.transpose() * y) - 2.0 * u * g);
}

std::size_t DgccaModel::index_of(const std::string& view) const {
  for (std::size_t j = 0; j < views.size(); ++j)
    if (views[j] == view) return j;
  throw DataError("model has no view '" + view + "'");
}

namespace {

// Inputs as columns, centered by the train mean.
Matrix as_batch(const Eigen::Ref<const Matrix>& rows, const Vector& mean) {
  return (rows.rowwise() - mean.transpose()).transpose();
}

Matrix apply_extractor(const std::optional<Mlp>& f, const Matrix& batch) {
  return f ? f->forward(batch) : batch;
}

struct FullSolve {
  GccaSolution sol;
  RetrievalReport dev;
};

FullSolve solve_and_score(const std::vector<std::optional<Mlp>>& f, const std::vector<Matrix>& train,
                          const std::vector<Matrix>& dev, const std::vector<std::string>& views,
                          const TrainConfig& cfg, Index k, const std::vector<double>& w) {
  std::vector<Matrix> outs;
  for (std::size_t j = 0; j < f.size(); ++j) outs.push_back(apply_extractor(f[j], train[j]));
  FullSolve fs;
  fs.sol = gcca_solve(outs, k, cfg.final_r, w);
  std::vector<NamedEmbedding> emb;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const Matrix out = apply_extractor(f[j], dev[j]).colwise() - fs.sol.mean[j];
    emb.emplace_back(views[j], (fs.sol.u[j].transpose() * out).transpose());
  }
  fs.dev = evaluate_all_pairs(emb, cfg.recall_n, cfg.metric);
  fs.dev.split = "dev";
  return fs;
}

}  // namespace

DgccaModel train_dgcca(const MultiviewDataset& ds, const std::vector<std::string>& views,
                       const TrainConfig& config) {
  validate(ds);
  if (views.size() < 2) throw ConfigError("train_dgcca: need at least 2 views");
  for (std::size_t a = 0; a < views.size(); ++a)
    for (std::size_t b = a + 1; b < views.size(); ++b)
      if (views[a] == views[b]) throw ConfigError("train_dgcca: view '" + views[a] + "' repeated");
  const std::size_t J = views.size();
  if (config.k < 1) throw ConfigError("train_dgcca: k must be >= 1");

  DgccaModel model;
  model.views = views;
  model.k = config.k;
  model.r = config.final_r;
  model.config = config;
  model.weights = config.weights.empty() ? std::vector<double>(J, 1.0) : config.weights;
  if (model.weights.size() != J) throw ConfigError("train_dgcca: one weight per view required");
  for (double w : model.weights)
    if (!(w > 0)) throw ConfigError("train_dgcca: weights must be positive");
  model.config.weights = model.weights;

  std::vector<Matrix> train, dev;
  for (const auto& v : views) {
    const Matrix tr = ds.rows(v, Split::train);
    model.input_mean.push_back(tr.colwise().mean().transpose());
    train.push_back(as_batch(tr, model.input_mean.back()));
    dev.push_back(as_batch(ds.rows(v, Split::dev), model.input_mean.back()));
  }
  const Index n_train = train.front().cols();

  model.extractors.resize(J);
  if (!config.linear) {
    auto seeds = derive_rng(config.seed, 1);
    for (std::size_t j = 0; j < J; ++j) {
      const Index d = train[j].rows();
      model.extractors[j] = Mlp(d, config.hidden > 0 ? config.hidden : d, config.k, seeds(),
                                config.activation);
    }
  }

  if (!config.linear && config.max_epochs > 0) {
    Index batch_size = config.batch_size;
    if (batch_size > n_train) {
      model.log.warnings.push_back("batch size " + std::to_string(batch_size) +
                                   " clamped to train size " + std::to_string(n_train));
      batch_size = n_train;
    }
    if (config.k > batch_size)
      throw ConfigError("train_dgcca: k=" + std::to_string(config.k) + " exceeds batch size " +
                        std::to_string(batch_size));

    std::vector<AdamOptimizer> opts(J, AdamOptimizer(config.adam));
    auto shuffle_rng = derive_rng(config.seed, 2);
    std::vector<Index> order(static_cast<std::size_t>(n_train));
    std::vector<std::optional<Mlp>> best = model.extractors;
    double best_score = -1.0;

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
      std::iota(order.begin(), order.end(), Index{0});
      std::shuffle(order.begin(), order.end(), shuffle_rng);
      const auto batches = make_batches(order, batch_size, config.k);
      double loss_sum = 0.0;
      for (const auto& idx : batches) {
        std::vector<MlpCache> caches(J);
        std::vector<Matrix> outs(J);
        for (std::size_t j = 0; j < J; ++j)
          outs[j] = model.extractors[j]->forward(train[j](Eigen::all, idx), caches[j]);
        const GccaSolution sol = gcca_solve(outs, config.k, config.train_r, model.weights);
        loss_sum += sol.loss;
        for (std::size_t j = 0; j < J; ++j) {
          const Matrix centered = outs[j].colwise() - sol.mean[j];
          const Matrix dy = dgcca_gradient(centered, sol.g, sol.u[j], model.weights[j]);
          opts[j].step(*model.extractors[j], model.extractors[j]->backward(caches[j], dy));
        }
      }

      FullSolve fs = solve_and_score(model.extractors, train, dev, views, config, config.k,
                                     model.weights);
      EpochRecord rec;
      rec.epoch = epoch;
      rec.train_objective = loss_sum / static_cast<double>(batches.size());
      rec.dev = std::move(fs.dev);
      if (rec.dev.aggregate > best_score) {
        best_score = rec.dev.aggregate;
        best = model.extractors;
        model.log.selected_epoch = epoch;
      }
      model.log.epochs.push_back(std::move(rec));
    }
    model.extractors = std::move(best);
  }

  FullSolve final_solve =
      solve_and_score(model.extractors, train, dev, views, config, config.k, model.weights);
  model.u = std::move(final_solve.sol.u);
  model.output_mean = std::move(final_solve.sol.mean);
  model.g = std::move(final_solve.sol.g);
  if (model.log.epochs.empty()) {
    EpochRecord rec;
    rec.train_objective = final_solve.sol.loss;
    rec.dev = std::move(final_solve.dev);
    model.log.epochs.push_back(std::move(rec));
  }
  return model;
}

Matrix embed(const DgccaModel& model, const Eigen::Ref<const Matrix>& z, const std::string& view) {
  const std::size_t j = model.index_of(view);
  if (z.cols() != model.input_mean[j].size())
    throw DataError("embed: view '" + view + "' expects " +
                    std::to_string(model.input_mean[j].size()) + " columns, got " +
                    std::to_string(z.cols()));
  const Matrix out = apply_extractor(model.extractors[j], as_batch(z, model.input_mean[j])).colwise() -
                     model.output_mean[j];
  return (model.u[j].transpose() * out).transpose();
}

void save_dgcca(const DgccaModel& model, const fs::path& dir) {
  fs::create_directories(dir);
  json views = json::array();
  for (std::size_t j = 0; j < model.views.size(); ++j) {
    const fs::path vdir = dir / ("view" + std::to_string(j));
    fs::create_directories(vdir);
    write_fmat(vdir / "U.fmat", model.u[j]);
    write_fmat(vdir / "input_mean.fmat", model.input_mean[j]);
    write_fmat(vdir / "output_mean.fmat", model.output_mean[j]);
    if (model.extractors[j]) model.extractors[j]->save(vdir / "extractor");
    views.push_back({{"name", model.views[j]},
                     {"dir", vdir.filename().string()},
                     {"extractor", model.extractors[j] ? "mlp" : "identity"}});
  }
  json header{{"method", model.config.linear ? "gcca-linear" : "dgcca"},
              {"views", views},
              {"k", model.k},
              {"r", model.r},
              {"weights", model.weights},
              {"config", to_json(model.config)},
              {"selected_epoch", model.log.selected_epoch}};
  std::ofstream(dir / "header.json") << header.dump(2) << "\n";
}

DgccaModel load_dgcca(const fs::path& dir) {
  std::ifstream in(dir / "header.json");
  if (!in) throw DataError("missing " + (dir / "header.json").string());
  try {
    const json header = json::parse(in);
    DgccaModel m;
    m.k = header.at("k").get<Index>();
    m.r = header.at("r").get<double>();
    m.weights = header.at("weights").get<std::vector<double>>();
    m.config.linear = header.at("method").get<std::string>() == "gcca-linear";
    m.config.k = m.k;
    m.config.final_r = m.r;
    m.config.weights = m.weights;
    m.log.selected_epoch = header.value("selected_epoch", 0);
    for (const auto& v : header.at("views")) {
      const fs::path vdir = dir / v.at("dir").get<std::string>();
      m.views.push_back(v.at("name").get<std::string>());
      m.u.push_back(read_fmat(vdir / "U.fmat"));
      m.input_mean.push_back(read_fmat(vdir / "input_mean.fmat").reshaped());
      m.output_mean.push_back(read_fmat(vdir / "output_mean.fmat").reshaped());
      if (v.at("extractor").get<std::string>() == "mlp")
        m.extractors.emplace_back(Mlp::load(vdir / "extractor"));
      else
        m.extractors.emplace_back(std::nullopt);
    }
    return m;
  } catch (const json::exception& e) {
    throw DataError("bad DGCCA header in " + dir.string() + ": " + e.what());
  }
}

}  // namespace corrspace
