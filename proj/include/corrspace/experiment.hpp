// include/corrspace/experiment.hpp

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

// Config-driven fit / evaluate pipeline behind the command-line tool.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "corrspace/dataset.hpp"
#include "corrspace/model.hpp"
#include "corrspace/retrieval.hpp"
#include "corrspace/task_scoring.hpp"
#include "corrspace/training.hpp"

namespace corrspace {

struct ViewSpec {
  std::string name;
  std::vector<std::string> tags;  // "video" switches on the default weight decay
  double weight = 1.0;
};

struct ExperimentConfig {
  std::filesystem::path dataset;  // manifest
  std::string dataset_label;      // as written in the config file
  std::string method;             // cca | dcca | gcca-linear | dgcca
  std::vector<ViewSpec> views;
  std::optional<Index> k;         // default floor(min d_j / 2)
  double r = kDefaultCcaRegularizer;
  double train_r = kTrainingRegularizer;
  Index batch_size = kDefaultBatchSize;
  int max_epochs = kDefaultMaxEpochs;
  double learning_rate = 1e-3;
  std::optional<double> weight_decay;  // default 0, or 1e-5 with a video view
  Index hidden = 0;
  Activation activation = Activation::tanh;
  Index n = kDefaultRecallN;
  Metric metric = Metric::cosine;
  std::uint64_t seed = 0;
  std::filesystem::path out;
  std::vector<Split> eval_splits{Split::dev, Split::test};

  std::vector<std::string> view_names() const;
  bool has_video_view() const;
};

/// Parses and validates the JSON config; relative paths resolve against
/// `base_dir`. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Training hyperparameters with every default filled in from the data.
TrainConfig resolve_train_config(const ExperimentConfig& cfg, const MultiviewDataset& ds);

/// Config snapshot with resolved defaults, as written into run records.
nlohmann::json resolved_config_json(const ExperimentConfig& cfg, const TrainConfig& tc);

struct RunRecord {
  nlohmann::json config;
  nlohmann::json dataset;
  TrainingLog log;
  std::vector<RetrievalReport> reports;
  std::vector<std::string> warnings;
  nlohmann::json metadata;
  double seconds = 0.0;  // written to timings.json, not run.json

  nlohmann::json to_json() const;
};

struct FitResult {
  Model model;
  RunRecord record;
};

/// Fits the configured model. Does not touch the filesystem beyond reading
/// the dataset.
FitResult fit_experiment(const ExperimentConfig& cfg);
FitResult fit_experiment(const ExperimentConfig& cfg, const MultiviewDataset& ds);

/// Writes <out>/model/, run.json, report.txt, report.json and timings.json.
void write_run(const FitResult& result, const std::filesystem::path& out);

/// Recall@n for all ordered view pairs of `model` on one split.
RetrievalReport evaluate_model(const Model& model, const MultiviewDataset& ds, Split split, Index n,
                               Metric metric);

/// Text rendering of a run record: per-epoch dev scores, selection, tables.
std::string format_run_report(const nlohmann::json& run);

/// Plain table of task scores, one row per reference set.
std::string format_task_table(const std::vector<TaskScore>& scores);

}  // namespace corrspace
