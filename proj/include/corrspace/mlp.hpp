// include/corrspace/mlp.hpp

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

// Two-layer feedforward feature extractor, Y = W2 act(W1 X + b1) + b2, with
// hand-written backprop and an Adam optimizer with decoupled weight decay.
// Batches are column-major: one sample per column.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "corrspace/common.hpp"

namespace corrspace {

enum class Activation { tanh, identity };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

struct MlpParams {
  Matrix w1;  // hidden x input
  Vector b1;
  Matrix w2;  // output x hidden
  Vector b2;

  Index num_params() const { return w1.size() + b1.size() + w2.size() + b2.size(); }

  /// All parameters as one vector, in the order w1, b1, w2, b2.
  Vector pack() const;
  void unpack(const Eigen::Ref<const Vector>& flat);
};

using MlpGrads = MlpParams;

struct MlpCache {
  Matrix input;       // d x m
  Matrix pre;         // h x m, W1 X + b1
  Matrix hidden;      // h x m, act(pre)
  std::uint64_t generation = 0;
};

class Mlp {
 public:
  Mlp() = default;

  /// Glorot-uniform weights, a = sqrt(6 / (fan_in + fan_out)); zero biases.
  Mlp(Index input, Index hidden, Index output, std::uint64_t seed,
      Activation act = Activation::tanh);

  /// Wraps explicit parameters; shapes must be consistent.
  Mlp(MlpParams params, Activation act, std::uint64_t seed = 0);

  Index input_dim() const { return params_.w1.cols(); }
  Index hidden_dim() const { return params_.w1.rows(); }
  Index output_dim() const { return params_.w2.rows(); }
  Activation activation() const { return act_; }
  std::uint64_t seed() const { return seed_; }

  const MlpParams& params() const { return params_; }
  /// Mutable access invalidates caches from earlier forward passes.
  MlpParams& mutable_params() {
    ++generation_;
    return params_;
  }

  Matrix forward(const Eigen::Ref<const Matrix>& x) const;
  Matrix forward(const Eigen::Ref<const Matrix>& x, MlpCache& cache) const;

  /// Gradients of sum(dY .* Y) with respect to the parameters. `dx`, when
  /// non-null, receives the gradient with respect to the input batch.
  MlpGrads backward(const MlpCache& cache, const Eigen::Ref<const Matrix>& dy,
                    Matrix* dx = nullptr) const;

  void save(const std::filesystem::path& dir) const;
  static Mlp load(const std::filesystem::path& dir);

 private:
  MlpParams params_;
  Activation act_ = Activation::tanh;
  std::uint64_t seed_ = 0;
  std::uint64_t generation_ = 0;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
};

/// Adam over a flat parameter vector. Weight decay is decoupled:
/// params *= (1 - lr * wd) before the adaptive update.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(AdamConfig config = {}) : config_(config) {}

  const AdamConfig& config() const { return config_; }
  std::uint64_t steps() const { return steps_; }

  /// Throws NumericalError on a non-finite gradient, leaving params untouched.
  void step(Eigen::Ref<Vector> params, const Eigen::Ref<const Vector>& grads);

  /// Convenience for an Mlp: packs, steps and unpacks.
  void step(Mlp& net, const MlpGrads& grads);

 private:
  AdamConfig config_;
  Vector m_, v_;
  std::uint64_t steps_ = 0;
};

}  // namespace corrspace
