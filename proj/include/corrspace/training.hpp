// include/corrspace/training.hpp

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

// Pieces shared by the DCCA and DGCCA trainers: hyperparameters, the epoch
// log used for dev selection, and minibatch slicing.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "corrspace/common.hpp"
#include "corrspace/linear_cca.hpp"
#include "corrspace/mlp.hpp"
#include "corrspace/retrieval.hpp"

namespace corrspace {

inline constexpr double kTrainingRegularizer = 1e-4;
inline constexpr Index kDefaultBatchSize = 5500;
inline constexpr int kDefaultMaxEpochs = 50;
inline constexpr double kVideoWeightDecay = 1e-5;

struct TrainConfig {
  Index k = 0;                 // extractor output width = shared dimension
  Index hidden = 0;            // 0: same width as the input
  Activation activation = Activation::tanh;
  double final_r = kDefaultCcaRegularizer;
  double train_r = kTrainingRegularizer;
  Index batch_size = kDefaultBatchSize;
  int max_epochs = kDefaultMaxEpochs;
  AdamConfig adam;
  Index recall_n = kDefaultRecallN;
  Metric metric = Metric::cosine;
  std::uint64_t seed = 0;
  std::vector<double> weights;  // per view, DGCCA only; empty means all 1
  bool linear = false;          // DGCCA with identity extractors
};

nlohmann::json to_json(const TrainConfig& c);

struct EpochRecord {
  int epoch = 0;
  double train_objective = 0.0;  // mean over minibatches
  RetrievalReport dev;
};

struct TrainingLog {
  std::vector<EpochRecord> epochs;
  int selected_epoch = 0;
  std::vector<std::string> warnings;
};

nlohmann::json to_json(const TrainingLog& log);

/// Splits `order` into consecutive batches of `batch_size`. A trailing batch
/// smaller than `min_size` is merged into the one before it.
std::vector<std::vector<Index>> make_batches(const std::vector<Index>& order, Index batch_size,
                                             Index min_size);

/// Seeded generator for an independent stream (initialization, shuffling...).
std::mt19937_64 derive_rng(std::uint64_t seed, std::uint64_t stream);

/// Index of the first epoch with the maximal aggregate dev score.
std::size_t best_epoch(const std::vector<EpochRecord>& epochs);

}  // namespace corrspace
