// include/corrspace/retrieval.hpp

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

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "corrspace/common.hpp"

namespace corrspace {

enum class Metric { cosine, euclidean };

std::string_view to_string(Metric m);
Metric parse_metric(std::string_view name);

/// Recall@n used throughout for dev selection and reporting.
inline constexpr Index kDefaultRecallN = 10;

/// Distance from every source row to every reference row, sources x refs.
/// Cosine distance is 1 - cos; a zero-norm row has cosine 0 to everything.
/// Euclidean distances are squared (rank-equivalent).
Matrix distance_matrix(const Eigen::Ref<const Matrix>& source, const Eigen::Ref<const Matrix>& refs,
                       Metric metric);

/// Index of the nearest reference for every source row; ties go to the lowest
/// reference index.
std::vector<Index> nearest_reference(const Eigen::Ref<const Matrix>& source,
                                     const Eigen::Ref<const Matrix>& refs, Metric metric);

/// Percentage of source rows i whose true match, reference row i, is among the
/// n nearest references. Ties between equal distances go to the lower index.
/// Reference rows past the last source row act as distractors.
double recall_at_n(const Eigen::Ref<const Matrix>& source, const Eigen::Ref<const Matrix>& refs,
                   Index n, Metric metric = Metric::cosine);

/// 100 * n / N.
double random_baseline(Index num_refs, Index n);

struct PairScore {
  std::string source;
  std::string reference;
  double recall = 0.0;
};

struct RetrievalReport {
  std::string split;
  Index n = kDefaultRecallN;
  Metric metric = Metric::cosine;
  std::string model_id;
  std::vector<PairScore> pairs;  // source-major over the view order
  double aggregate = 0.0;        // max over pairs
  Index num_samples = 0;

  double score(const std::string& source, const std::string& reference) const;
  std::vector<std::string> view_order() const;
};

using NamedEmbedding = std::pair<std::string, Matrix>;

/// Recall@n for every ordered pair of distinct views; aggregate = max.
RetrievalReport evaluate_all_pairs(const std::vector<NamedEmbedding>& embeddings, Index n,
                                   Metric metric = Metric::cosine);

nlohmann::json to_json(const RetrievalReport& report);
RetrievalReport report_from_json(const nlohmann::json& j);

/// Source rows by reference columns, "-" on the diagonal, plus the
/// aggregate and random-baseline lines.
std::string format_table(const RetrievalReport& report);

}  // namespace corrspace
