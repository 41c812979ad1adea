// src/training.cpp

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

#include "corrspace/training.hpp"

namespace corrspace {

using nlohmann::json;

json to_json(const TrainConfig& c) {
  return json{{"k", c.k},
              {"hidden", c.hidden},
              {"activation", std::string(to_string(c.activation))},
              {"r", c.final_r},
              {"train_r", c.train_r},
              {"batch_size", c.batch_size},
              {"max_epochs", c.max_epochs},
              {"learning_rate", c.adam.learning_rate},
              {"weight_decay", c.adam.weight_decay},
              {"n", c.recall_n},
              {"metric", std::string(to_string(c.metric))},
              {"seed", c.seed},
              {"weights", c.weights},
              {"linear", c.linear}};
}

json to_json(const TrainingLog& log) {
  json epochs = json::array();
  for (const auto& e : log.epochs) {
    json pairs = json::array();
    for (const auto& p : e.dev.pairs)
      pairs.push_back({{"source", p.source}, {"reference", p.reference}, {"recall", p.recall}});
    epochs.push_back({{"epoch", e.epoch},
                      {"train_objective", e.train_objective},
                      {"dev_pairs", pairs},
                      {"dev_aggregate", e.dev.aggregate}});
  }
  return json{{"epochs", epochs}, {"selected_epoch", log.selected_epoch}, {"warnings", log.warnings}};
}

std::vector<std::vector<Index>> make_batches(const std::vector<Index>& order, Index batch_size,
                                             Index min_size) {
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  std::vector<std::vector<Index>> batches;
  for (std::size_t at = 0; at < order.size(); at += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(order.size(), at + static_cast<std::size_t>(batch_size));
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(at),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  if (batches.size() > 1 && static_cast<Index>(batches.back().size()) < min_size) {
    auto tail = std::move(batches.back());
    batches.pop_back();
    batches.back().insert(batches.back().end(), tail.begin(), tail.end());
  }
  return batches;
}

std::mt19937_64 derive_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

std::size_t best_epoch(const std::vector<EpochRecord>& epochs) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < epochs.size(); ++i)
    if (epochs[i].dev.aggregate > epochs[best].dev.aggregate) best = i;
  return best;
}

}  // namespace corrspace
