// src/mlp.cpp

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

#include "corrspace/mlp.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "corrspace/dataset.hpp"

namespace corrspace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Activation a) {
  return a == Activation::tanh ? "tanh" : "identity";
}

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "identity") return Activation::identity;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

Vector MlpParams::pack() const {
  Vector flat(num_params());
  flat << w1.reshaped(), b1, w2.reshaped(), b2;
  return flat;
}

void MlpParams::unpack(const Eigen::Ref<const Vector>& flat) {
  if (flat.size() != num_params()) throw DataError("MlpParams::unpack: size mismatch");
  Index at = 0;
  auto take = [&](auto& dst) {
    dst.reshaped() = flat.segment(at, dst.size());
    at += dst.size();
  };
  take(w1);
  take(b1);
  take(w2);
  take(b2);
}

Mlp::Mlp(Index input, Index hidden, Index output, std::uint64_t seed, Activation act)
    : act_(act), seed_(seed) {
  if (input < 1 || hidden < 1 || output < 1) throw DataError("Mlp: layer widths must be >= 1");
  std::mt19937_64 rng(seed);
  auto glorot = [&](Index rows, Index cols) {
    const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::uniform_real_distribution<double> dist(-a, a);
    Matrix w(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) w(i, j) = dist(rng);
    return w;
  };
  params_.w1 = glorot(hidden, input);
  params_.b1 = Vector::Zero(hidden);
  params_.w2 = glorot(output, hidden);
  params_.b2 = Vector::Zero(output);
}

Mlp::Mlp(MlpParams params, Activation act, std::uint64_t seed)
    : params_(std::move(params)), act_(act), seed_(seed) {
  if (params_.b1.size() != params_.w1.rows() || params_.w2.cols() != params_.w1.rows() ||
      params_.b2.size() != params_.w2.rows())
    throw DataError("Mlp: inconsistent parameter shapes");
}

Matrix Mlp::forward(const Eigen::Ref<const Matrix>& x) const {
  MlpCache scratch;
  return forward(x, scratch);
}

Matrix Mlp::forward(const Eigen::Ref<const Matrix>& x, MlpCache& cache) const {
  if (x.rows() != input_dim())
    throw DataError("Mlp::forward: input has " + std::to_string(x.rows()) + " rows, expected " +
                    std::to_string(input_dim()));
  cache.input = x;
  cache.pre.noalias() = params_.w1 * x;
  cache.pre.colwise() += params_.b1;
  if (act_ == Activation::tanh)
    cache.hidden = cache.pre.array().tanh().matrix();
  else
    cache.hidden = cache.pre;
  cache.generation = generation_;
  Matrix y = params_.w2 * cache.hidden;
  y.colwise() += params_.b2;
  return y;
}

MlpGrads Mlp::backward(const MlpCache& cache, const Eigen::Ref<const Matrix>& dy, Matrix* dx) const {
  if (cache.generation != generation_ || cache.pre.rows() != hidden_dim() ||
      cache.input.rows() != input_dim())
    throw DataError("Mlp::backward: stale cache");
  if (dy.rows() != output_dim() || dy.cols() != cache.hidden.cols())
    throw DataError("Mlp::backward: gradient shape mismatch");

  MlpGrads g;
  g.w2.noalias() = dy * cache.hidden.transpose();
  g.b2 = dy.rowwise().sum();
  Matrix dpre = params_.w2.transpose() * dy;
  if (act_ == Activation::tanh)
    dpre.array() *= 1.0 - cache.hidden.array().square();
  g.w1.noalias() = dpre * cache.input.transpose();
  g.b1 = dpre.rowwise().sum();
  if (dx) dx->noalias() = params_.w1.transpose() * dpre;
  return g;
}

void Mlp::save(const fs::path& dir) const {
  fs::create_directories(dir);
  write_fmat(dir / "W1.fmat", params_.w1);
  write_fmat(dir / "b1.fmat", params_.b1);
  write_fmat(dir / "W2.fmat", params_.w2);
  write_fmat(dir / "b2.fmat", params_.b2);
  json header{{"input", input_dim()},
              {"hidden", hidden_dim()},
              {"output", output_dim()},
              {"activation", std::string(to_string(act_))},
              {"seed", seed_}};
  std::ofstream(dir / "header.json") << header.dump(2) << "\n";
}

Mlp Mlp::load(const fs::path& dir) {
  std::ifstream in(dir / "header.json");
  if (!in) throw DataError("missing " + (dir / "header.json").string());
  try {
    const json header = json::parse(in);
    MlpParams p;
    p.w1 = read_fmat(dir / "W1.fmat");
    p.b1 = read_fmat(dir / "b1.fmat").reshaped();
    p.w2 = read_fmat(dir / "W2.fmat");
    p.b2 = read_fmat(dir / "b2.fmat").reshaped();
    if (p.w1.cols() != header.at("input").get<Index>() ||
        p.w2.rows() != header.at("output").get<Index>())
      throw DataError("Mlp header disagrees with parameter files in " + dir.string());
    return Mlp(std::move(p), parse_activation(header.at("activation").get<std::string>()),
               header.at("seed").get<std::uint64_t>());
  } catch (const json::exception& e) {
    throw DataError("bad Mlp header in " + dir.string() + ": " + e.what());
  }
}

void AdamOptimizer::step(Eigen::Ref<Vector> params, const Eigen::Ref<const Vector>& grads) {
  if (params.size() != grads.size()) throw DataError("AdamOptimizer::step: shape mismatch");
  if (!grads.allFinite()) throw NumericalError("AdamOptimizer::step: non-finite gradient");
  if (m_.size() == 0) {
    m_ = Vector::Zero(params.size());
    v_ = Vector::Zero(params.size());
  }
  if (m_.size() != params.size()) throw DataError("AdamOptimizer::step: parameter count changed");

  ++steps_;
  const auto& c = config_;
  if (c.weight_decay != 0.0) params *= 1.0 - c.learning_rate * c.weight_decay;
  m_ = c.beta1 * m_ + (1.0 - c.beta1) * grads;
  v_ = c.beta2 * v_ + (1.0 - c.beta2) * grads.cwiseAbs2();
  const double t = static_cast<double>(steps_);
  const double bias1 = 1.0 - std::pow(c.beta1, t);
  const double bias2 = 1.0 - std::pow(c.beta2, t);
  params.array() -= c.learning_rate * (m_.array() / bias1) /
                    ((v_.array() / bias2).sqrt() + c.epsilon);
}

void AdamOptimizer::step(Mlp& net, const MlpGrads& grads) {
  Vector flat = net.params().pack();
  step(flat, grads.pack());
  net.mutable_params().unpack(flat);
}

}  // namespace corrspace
