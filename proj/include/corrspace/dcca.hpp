// include/corrspace/dcca.hpp

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
#include <optional>
#include <string>
#include <utility>

#include "corrspace/dataset.hpp"
#include "corrspace/linear_cca.hpp"
#include "corrspace/mlp.hpp"
#include "corrspace/training.hpp"

namespace corrspace {

struct DccaObjective {
  double correlation = 0.0;  // sum of all canonical correlations of the batch
  Matrix dyx;                // d correlation / d Yx
  Matrix dyy;
};

/// Total correlation between two k x m output batches and its gradient with
/// respect to both. Batches are centered internally; covariances use 1/(m-1)
/// with `r` added to the auto-covariance diagonals.
DccaObjective dcca_objective(const Eigen::Ref<const Matrix>& yx, const Eigen::Ref<const Matrix>& yy,
                             double r);

struct DccaModel {
  std::string view_x, view_y;
  Mlp net_x, net_y;
  Vector input_mean_x, input_mean_y;  // train means subtracted before the nets
  CcaModel head;                      // fit on train-split net outputs
  TrainConfig config;
  TrainingLog log;
};

/// Starting extractors; mainly for tests (e.g. identity networks).
struct DccaInit {
  Mlp net_x, net_y;
};

/// Trains both extractors by ascending the batch correlation, selects the
/// epoch with the best dev Recall@n (max over both directions), then fits the
/// CCA head on the selected extractors' train outputs.
DccaModel train_dcca(const MultiviewDataset& ds, const std::string& view_x,
                     const std::string& view_y, const TrainConfig& config,
                     std::optional<DccaInit> init = std::nullopt);

/// N x k shared-space embedding of raw samples (rows) of one side.
Matrix embed(const DccaModel& model, const Eigen::Ref<const Matrix>& z, Side side);

void save_dcca(const DccaModel& model, const std::filesystem::path& dir);
DccaModel load_dcca(const std::filesystem::path& dir);

}  // namespace corrspace
