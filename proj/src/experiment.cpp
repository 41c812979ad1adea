// src/experiment.cpp

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

#include "corrspace/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace corrspace {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::string> ExperimentConfig::view_names() const {
  std::vector<std::string> out;
  for (const auto& v : views) out.push_back(v.name);
  return out;
}

bool ExperimentConfig::has_video_view() const {
  return std::any_of(views.begin(), views.end(), [](const ViewSpec& v) {
    return std::find(v.tags.begin(), v.tags.end(), "video") != v.tags.end();
  });
}

namespace {

const std::set<std::string> kKnownKeys{
    "dataset", "method",     "views",  "k",        "r",      "train_r",     "batch_size",
    "max_epochs", "learning_rate", "weight_decay", "hidden", "activation", "n", "metric",
    "seed",    "out",        "eval_splits", "weights"};

const std::set<std::string> kMethods{"cca", "dcca", "gcca-linear", "dgcca"};

template <typename T>
T field(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config field '" + key + "': " + e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!kKnownKeys.count(key)) throw ConfigError("unknown config field '" + key + "'");
  for (const char* required : {"dataset", "method", "views", "seed"})
    if (!j.contains(required)) throw ConfigError(std::string("config field '") + required + "' is required");

  ExperimentConfig c;
  c.dataset_label = field<std::string>(j, "dataset");
  c.dataset = fs::path(c.dataset_label).is_absolute() ? fs::path(c.dataset_label)
                                                      : base_dir / c.dataset_label;
  c.method = field<std::string>(j, "method");
  if (!kMethods.count(c.method)) throw ConfigError("unknown method '" + c.method + "'");

  const json& views = j.at("views");
  if (!views.is_array()) throw ConfigError("config field 'views' must be an array");
  for (const auto& v : views) {
    ViewSpec spec;
    if (v.is_string()) {
      spec.name = v.get<std::string>();
    } else if (v.is_object()) {
      spec.name = field<std::string>(v, "name");
      if (v.contains("tags")) spec.tags = field<std::vector<std::string>>(v, "tags");
      if (v.contains("weight")) spec.weight = field<double>(v, "weight");
    } else {
      throw ConfigError("each view must be a name or an object");
    }
    if (spec.name.empty()) throw ConfigError("empty view name in config");
    c.views.push_back(std::move(spec));
  }
  if (c.views.size() < 2) throw ConfigError("at least 2 views are required");
  if (c.method == "dcca" && c.views.size() > 2)
    throw ConfigError("dcca takes exactly 2 views; use method 'dgcca' for " +
                      std::to_string(c.views.size()) + " views");
  if (c.method == "cca" && c.views.size() > 2)
    throw ConfigError("cca takes exactly 2 views; use method 'gcca-linear' for " +
                      std::to_string(c.views.size()) + " views");
  if (j.contains("weights")) {
    const auto w = field<std::vector<double>>(j, "weights");
    if (w.size() != c.views.size()) throw ConfigError("'weights' needs one entry per view");
    for (std::size_t i = 0; i < w.size(); ++i) c.views[i].weight = w[i];
  }
  for (const auto& v : c.views)
    if (!(v.weight > 0)) throw ConfigError("view weight for '" + v.name + "' must be positive");

  try {
    if (j.contains("k")) c.k = field<Index>(j, "k");
    c.seed = field<std::uint64_t>(j, "seed");
  } catch (const ConfigError&) {
    throw;
  }
  if (j.contains("r")) c.r = field<double>(j, "r");
  if (j.contains("train_r")) c.train_r = field<double>(j, "train_r");
  if (j.contains("batch_size")) c.batch_size = field<Index>(j, "batch_size");
  if (j.contains("max_epochs")) c.max_epochs = field<int>(j, "max_epochs");
  if (j.contains("learning_rate")) c.learning_rate = field<double>(j, "learning_rate");
  if (j.contains("weight_decay")) c.weight_decay = field<double>(j, "weight_decay");
  if (j.contains("hidden")) c.hidden = field<Index>(j, "hidden");
  if (j.contains("activation")) c.activation = parse_activation(field<std::string>(j, "activation"));
  if (j.contains("n")) c.n = field<Index>(j, "n");
  if (j.contains("metric")) c.metric = parse_metric(field<std::string>(j, "metric"));
  if (j.contains("out")) {
    const fs::path out = field<std::string>(j, "out");
    c.out = out.is_absolute() ? out : base_dir / out;
  }
  if (j.contains("eval_splits")) {
    c.eval_splits.clear();
    for (const auto& s : field<std::vector<std::string>>(j, "eval_splits"))
      c.eval_splits.push_back(parse_split(s));
  }

  if (c.k && *c.k < 1) throw ConfigError("k must be >= 1");
  if (c.r < 0 || c.train_r < 0) throw ConfigError("regularizers must be >= 0");
  if (c.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (c.max_epochs < 0) throw ConfigError("max_epochs must be >= 0");
  if (!(c.learning_rate >= 0)) throw ConfigError("learning_rate must be >= 0");
  if (c.weight_decay && !(*c.weight_decay >= 0)) throw ConfigError("weight_decay must be >= 0");
  if (c.hidden < 0) throw ConfigError("hidden must be >= 0");
  if (c.n < 1) throw ConfigError("n must be >= 1");
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j, path.parent_path());
}

TrainConfig resolve_train_config(const ExperimentConfig& cfg, const MultiviewDataset& ds) {
  Index min_dim = std::numeric_limits<Index>::max();
  for (const auto& v : cfg.views) {
    try {
      min_dim = std::min(min_dim, ds.view(v.name).dim());
    } catch (const DataError&) {
      throw ConfigError("view '" + v.name + "' is not in the dataset");
    }
  }
  TrainConfig tc;
  tc.k = cfg.k.value_or(min_dim / 2);
  if (tc.k < 1) throw ConfigError("default k = floor(min dim / 2) is 0; set k explicitly");
  if (tc.k > min_dim)
    throw ConfigError("k=" + std::to_string(tc.k) + " exceeds the smallest view dimension " +
                      std::to_string(min_dim));
  tc.hidden = cfg.hidden;
  tc.activation = cfg.activation;
  tc.final_r = cfg.r;
  tc.train_r = cfg.train_r;
  tc.batch_size = cfg.batch_size;
  tc.max_epochs = cfg.max_epochs;
  tc.adam.learning_rate = cfg.learning_rate;
  tc.adam.weight_decay = cfg.weight_decay.value_or(cfg.has_video_view() ? kVideoWeightDecay : 0.0);
  tc.recall_n = cfg.n;
  tc.metric = cfg.metric;
  tc.seed = cfg.seed;
  for (const auto& v : cfg.views) tc.weights.push_back(v.weight);
  tc.linear = cfg.method == "gcca-linear";
  return tc;
}

json resolved_config_json(const ExperimentConfig& cfg, const TrainConfig& tc) {
  json views = json::array();
  for (const auto& v : cfg.views)
    views.push_back({{"name", v.name}, {"tags", v.tags}, {"weight", v.weight}});
  std::vector<std::string> splits;
  for (Split s : cfg.eval_splits) splits.emplace_back(to_string(s));
  json j = to_json(tc);
  j["dataset"] = cfg.dataset_label;
  j["method"] = cfg.method;
  j["views"] = views;
  j["eval_splits"] = splits;
  return j;
}

json RunRecord::to_json() const {
  json reps = json::array();
  for (const auto& r : reports) reps.push_back(corrspace::to_json(r));
  return json{{"config", config},   {"dataset", dataset},   {"training", corrspace::to_json(log)},
              {"reports", reps},    {"warnings", warnings}, {"metadata", metadata}};
}

RetrievalReport evaluate_model(const Model& model, const MultiviewDataset& ds, Split split, Index n,
                               Metric metric) {
  std::vector<NamedEmbedding> emb;
  for (const auto& v : model_views(model)) {
    if (std::none_of(ds.views.begin(), ds.views.end(), [&](const ViewMatrix& m) { return m.name == v; }))
      throw DataError("dataset has no view '" + v + "' required by the model");
    emb.emplace_back(v, embed(model, v, ds.rows(v, split)));
  }
  RetrievalReport r = evaluate_all_pairs(emb, n, metric);
  r.split = std::string(to_string(split));
  r.model_id = method_name(model);
  return r;
}

FitResult fit_experiment(const ExperimentConfig& cfg) {
  return fit_experiment(cfg, load_dataset(cfg.dataset));
}

FitResult fit_experiment(const ExperimentConfig& cfg, const MultiviewDataset& ds) {
  const auto start = std::chrono::steady_clock::now();
  const TrainConfig tc = resolve_train_config(cfg, ds);
  for (Split s : {Split::train, Split::dev})
    if (ds.count(s) == 0)
      throw DataError("split '" + std::string(to_string(s)) + "' is empty");

  const auto names = cfg.view_names();
  std::optional<Model> model;
  TrainingLog log;
  json metadata = json::object();

  if (cfg.method == "cca") {
    CcaModel m = fit_cca(ds.rows(names[0], Split::train), ds.rows(names[1], Split::train), tc.k,
                         tc.final_r);
    m.view_x = names[0];
    m.view_y = names[1];
    model = std::move(m);
  } else if (cfg.method == "dcca") {
    DccaModel m = train_dcca(ds, names[0], names[1], tc);
    log = m.log;
    model = std::move(m);
  } else {
    DgccaModel m = train_dgcca(ds, names, tc);
    log = m.log;
    if (!tc.linear) metadata["batch_representation"] =
        "per-batch G discarded after each gradient step; final U_j refit on the full train split";
    model = std::move(m);
  }
  for (const auto& e : log.epochs)
    if (!std::isfinite(e.train_objective))
      throw NumericalError("non-finite training objective at epoch " + std::to_string(e.epoch));

  FitResult result{std::move(*model), {}};
  RunRecord& rec = result.record;
  rec.config = resolved_config_json(cfg, tc);
  json dims = json::array();
  for (const auto& v : ds.views) dims.push_back({{"name", v.name}, {"dim", v.dim()}});
  rec.dataset = {{"views", dims},
                 {"train", ds.count(Split::train)},
                 {"dev", ds.count(Split::dev)},
                 {"test", ds.count(Split::test)}};
  rec.warnings = log.warnings;
  rec.log = std::move(log);
  rec.metadata = std::move(metadata);
  for (Split s : cfg.eval_splits) {
    if (ds.count(s) == 0) {
      rec.warnings.push_back("split '" + std::string(to_string(s)) + "' is empty; not evaluated");
      continue;
    }
    rec.reports.push_back(evaluate_model(result.model, ds, s, tc.recall_n, tc.metric));
  }
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace

void write_run(const FitResult& result, const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw DataError("cannot create " + out.string() + ": " + ec.message());
  save_model(result.model, out / "model");
  const json run = result.record.to_json();
  write_text(out / "run.json", run.dump(2) + "\n");
  json reports = json::array();
  for (const auto& r : result.record.reports) reports.push_back(to_json(r));
  write_text(out / "report.json", json{{"reports", reports}}.dump(2) + "\n");
  write_text(out / "report.txt", format_run_report(run));
  write_text(out / "timings.json", json{{"fit_seconds", result.record.seconds}}.dump(2) + "\n");
}

std::string format_run_report(const json& run) {
  std::ostringstream os;
  const auto& cfg = run.at("config");
  os << "method " << cfg.at("method").get<std::string>() << ", k=" << cfg.at("k").get<Index>()
     << ", seed " << cfg.at("seed").get<std::uint64_t>() << "\n";
  const auto& training = run.at("training");
  const auto& epochs = training.at("epochs");
  if (!epochs.empty() && epochs.front().at("epoch").get<int>() > 0) {
    os << "\nepoch  train_objective  dev_aggregate\n";
    for (const auto& e : epochs) {
      os << std::setw(5) << e.at("epoch").get<int>() << "  " << std::setw(15) << std::fixed
         << std::setprecision(4) << e.at("train_objective").get<double>() << "  " << std::setw(13)
         << std::setprecision(2) << e.at("dev_aggregate").get<double>() << "\n";
    }
    os << "selected epoch: " << training.at("selected_epoch").get<int>() << "\n";
  }
  for (const auto& r : run.at("reports")) os << "\n" << format_table(report_from_json(r));
  for (const auto& w : run.at("warnings")) os << "warning: " << w.get<std::string>() << "\n";
  return os.str();
}

std::string format_task_table(const std::vector<TaskScore>& scores) {
  std::ostringstream os;
  os << std::left << std::setw(16) << "Reference Set" << std::right << std::setw(10) << "WER"
     << std::setw(10) << "BLEU" << "\n";
  std::vector<std::string> order;
  for (const auto& s : scores) {
    const std::string name(to_string(s.reference_set));
    if (std::find(order.begin(), order.end(), name) == order.end()) order.push_back(name);
  }
  for (const auto& name : order) {
    os << std::left << std::setw(16) << name << std::right;
    for (TaskMetric m : {TaskMetric::wer, TaskMetric::bleu}) {
      auto it = std::find_if(scores.begin(), scores.end(), [&](const TaskScore& s) {
        return to_string(s.reference_set) == name && s.metric == m;
      });
      std::ostringstream cell;
      if (it == scores.end())
        cell << "-";
      else
        cell << std::fixed << std::setprecision(1) << it->value << (m == TaskMetric::wer ? "%" : "");
      os << std::setw(10) << cell.str();
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace corrspace
