// include/corrspace/dgcca.hpp

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

// Generalized CCA over J views (MAXVAR form). For fixed extractor outputs
// Y_j (h_j x m) the shared representation G (k x m, G G^T = I) and the maps
// U_j minimize sum_j w_j ||G - U_j^T Y_j||_F^2.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "corrspace/dataset.hpp"
#include "corrspace/mlp.hpp"
#include "corrspace/training.hpp"

namespace corrspace {

struct GccaSolution {
  Matrix g;                  // k x m, orthonormal rows
  std::vector<Matrix> u;     // h_j x k
  std::vector<Vector> mean;  // per-view output means removed before solving
  Vector eigenvalues;        // top-k eigenvalues of sum_j w_j Y_j^T C_jj^-1 Y_j
  double loss = 0.0;
};

/// Closed-form solve. Outputs are centered internally and C_jj = Y_j Y_j^T + r I.
/// G comes from the SVD of the stacked whitened outputs sqrt(w_j) C_jj^-1/2 Y_j;
/// the m x m matrix is never formed. Empty `weights` means all ones.
GccaSolution gcca_solve(const std::vector<Matrix>& outputs, Index k, double r,
                        const std::vector<double>& weights = {});

/// Gradient of w ||G - U^T Y||_F^2 with respect to Y, holding G and U fixed.
Matrix dgcca_gradient(const Eigen::Ref<const Matrix>& y, const Eigen::Ref<const Matrix>& g,
                      const Eigen::Ref<const Matrix>& u, double w);

struct DgccaModel {
  std::vector<std::string> views;
  std::vector<std::optional<Mlp>> extractors;  // nullopt: identity map
  std::vector<Vector> input_mean;              // train means removed before f_j
  std::vector<Vector> output_mean;             // train means of f_j outputs
  std::vector<Matrix> u;
  std::vector<double> weights;
  Index k = 0;
  double r = kDefaultCcaRegularizer;
  Matrix g;  // train-split representation from the final solve (not persisted)
  TrainConfig config;
  TrainingLog log;

  std::size_t index_of(const std::string& view) const;
};

/// Deep GCCA training; config.linear = true gives linear GCCA (identity
/// extractors, a single closed-form solve). Dev Recall@n is computed for all
/// J(J-1) ordered pairs after each epoch and the epoch with the best maximum is
/// kept. The final U_j are refit on the full train split.
DgccaModel train_dgcca(const MultiviewDataset& ds, const std::vector<std::string>& views,
                       const TrainConfig& config);

/// N x k embedding U_j^T (f_j(z - input mean) - output mean) of raw rows.
Matrix embed(const DgccaModel& model, const Eigen::Ref<const Matrix>& z, const std::string& view);

void save_dgcca(const DgccaModel& model, const std::filesystem::path& dir);
DgccaModel load_dgcca(const std::filesystem::path& dir);

}  // namespace corrspace
