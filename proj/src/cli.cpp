// src/cli.cpp

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


#include "corrspace/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <json.hpp>

#include "corrspace/experiment.hpp"

namespace corrspace {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw DataError("cannot write " + path.string());
  f << text;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
}

struct SynthArgs {
  std::vector<Index> views;
  std::vector<std::string> names;
  Index latent = 0;
  std::vector<Index> n;
  double noise = 0.0;
  std::uint64_t seed = 0;
  bool independent = false;
  bool sentences = false;
  std::string out;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  if (a.n.size() != 3) throw ConfigError("--n takes three sizes: train,dev,test");
  if (a.views.empty()) throw ConfigError("--views needs at least one dimension");
  for (Index d : a.views)
    if (d < 1) throw ConfigError("view dimensions must be >= 1");
  const Index min_dim = *std::min_element(a.views.begin(), a.views.end());
  if (a.latent < 1 || a.latent > min_dim)
    throw ConfigError("--latent " + std::to_string(a.latent) + " must lie in [1, " +
                      std::to_string(min_dim) + "] (smallest view dimension)");
  if (!a.names.empty() && a.names.size() != a.views.size())
    throw ConfigError("--names needs one name per view");

  SynthSpec spec;
  spec.n_per_split = {a.n[0], a.n[1], a.n[2]};
  spec.dims = a.views;
  spec.latent_dim = a.latent;
  spec.noise_sigma = a.noise;
  spec.seed = a.seed;
  spec.shared_latent = !a.independent;
  spec.names = a.names;
  const MultiviewDataset ds = synth_correlated(spec);
  const fs::path manifest = save_dataset(ds, a.out);

  if (a.sentences) {
    const fs::path dir = fs::path(a.out) / "corpus";
    ensure_dir(dir);
    const auto all = synth_corpus(static_cast<std::size_t>(ds.size()), a.seed);
    for (Split s : {Split::train, Split::dev, Split::test}) {
      SentenceCorpus part;
      part.language = all.language;
      for (Index i : ds.indices(s)) part.sentences.push_back(all.sentences[static_cast<std::size_t>(i)]);
      write_corpus(part, dir / (std::string(to_string(s)) + ".txt"));
    }
  }
  out << manifest.string() << "\n";
  return kExitOk;
}

int cmd_fit(const std::string& config_path, const std::string& out_dir, std::ostream& out) {
  ExperimentConfig cfg = load_config(config_path);
  if (!out_dir.empty()) cfg.out = out_dir;
  if (cfg.out.empty()) throw ConfigError("no output directory: pass --out or set 'out' in the config");
  const FitResult result = fit_experiment(cfg);
  write_run(result, cfg.out);
  out << format_run_report(result.record.to_json());
  out << "wrote " << cfg.out.string() << "\n";
  return kExitOk;
}

struct EvalArgs {
  std::string model, dataset, out;
  std::vector<std::string> splits{"dev", "test"};
  Index n = kDefaultRecallN;
  std::string metric = "cosine";
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const Metric metric = parse_metric(a.metric);
  if (a.n < 1) throw ConfigError("--n must be >= 1");
  std::vector<Split> splits;
  for (const auto& s : a.splits) splits.push_back(parse_split(s));
  const Model model = load_model(a.model);
  const MultiviewDataset ds = load_dataset(a.dataset);

  json reports = json::array();
  std::string text;
  for (Split s : splits) {
    const RetrievalReport r = evaluate_model(model, ds, s, a.n, metric);
    reports.push_back(to_json(r));
    text += format_table(r) + "\n";
  }
  out << text;
  if (!a.out.empty()) {
    ensure_dir(a.out);
    write_text(fs::path(a.out) / "report.json", json{{"reports", reports}}.dump(2) + "\n");
    write_text(fs::path(a.out) / "report.txt", text);
  }
  return kExitOk;
}

struct ScoreArgs {
  std::string model, dataset, corpus_dir, out;
  std::string source_view, reference_view;
  std::string split = "test";
  std::vector<std::string> reference_sets{"test", "train", "train+test"};
  std::vector<std::string> metrics{"wer", "bleu"};
  std::string metric = "cosine";
};

int cmd_score_task(const ScoreArgs& a, std::ostream& out) {
  const Metric metric = parse_metric(a.metric);
  const Split source_split = parse_split(a.split);
  std::vector<ReferenceSet> refs;
  for (const auto& r : a.reference_sets) refs.push_back(parse_reference_set(r));
  std::vector<TaskMetric> metrics;
  for (const auto& m : a.metrics) metrics.push_back(parse_task_metric(m));

  const Model model = load_model(a.model);
  const MultiviewDataset ds = load_dataset(a.dataset);
  const auto views = model_views(model);
  TaskInputs in;
  in.source_view = a.source_view.empty() ? views.at(0) : a.source_view;
  in.reference_view = a.reference_view.empty() ? views.at(1) : a.reference_view;
  in.metric = metric;
  in.embed = [&model](const std::string& view, const Matrix& rows) {
    return embed(model, view, rows);
  };

  std::set<Split> needed{source_split};
  for (ReferenceSet r : refs) {
    if (r != ReferenceSet::train) needed.insert(Split::test);
    if (r != ReferenceSet::test) needed.insert(Split::train);
  }
  for (Split s : needed) {
    const fs::path file = fs::path(a.corpus_dir) / (std::string(to_string(s)) + ".txt");
    if (!fs::exists(file)) throw DataError("missing corpus file " + file.string());
    in.corpus[s] = read_corpus(file);
    in.source_rows[s] = ds.rows(in.source_view, s);
    in.reference_rows[s] = ds.rows(in.reference_view, s);
  }

  std::vector<TaskScore> scores;
  json j = json::array();
  for (ReferenceSet r : refs) {
    for (TaskMetric m : metrics) {
      scores.push_back(score_retrieval_as_task(in, source_split, r, m));
      j.push_back({{"reference_set", std::string(to_string(r))},
                   {"metric", std::string(to_string(m))},
                   {"value", scores.back().value},
                   {"sources", scores.back().sources},
                   {"pool", scores.back().pool}});
    }
  }
  const std::string table = format_task_table(scores);
  out << in.source_view << " -> " << in.reference_view << " (" << to_string(source_split) << ")\n"
      << table;
  if (!a.out.empty()) {
    ensure_dir(a.out);
    write_text(fs::path(a.out) / "task_scores.json",
               json{{"source_view", in.source_view},
                    {"reference_view", in.reference_view},
                    {"split", std::string(to_string(source_split))},
                    {"scores", j}}
                       .dump(2) + "\n");
    write_text(fs::path(a.out) / "task_scores.txt", table);
  }
  return kExitOk;
}

int cmd_report(const std::string& run_dir, std::ostream& out) {
  const fs::path path = fs::path(run_dir) / "run.json";
  std::ifstream f(path);
  if (!f) throw DataError("no run record at " + path.string());
  try {
    out << format_run_report(json::parse(f));
  } catch (const json::exception& e) {
    throw DataError("bad run record " + path.string() + ": " + e.what());
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shared-space multiview embeddings: fit, evaluate and score", "corrspace"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Write a synthetic correlated multiview dataset");
  s->add_option("--views", synth.views, "Per-view dimensions")->required()->delimiter(',');
  s->add_option("--names", synth.names, "Per-view names")->delimiter(',');
  s->add_option("--latent", synth.latent, "Shared latent dimension")->required();
  s->add_option("--n", synth.n, "Samples per split: train,dev,test")->required()->delimiter(',');
  s->add_option("--noise", synth.noise, "Noise standard deviation");
  s->add_option("--seed", synth.seed, "Random seed")->required();
  s->add_flag("--independent", synth.independent, "Draw a separate latent per view");
  s->add_flag("--sentences", synth.sentences, "Also write aligned corpus/<split>.txt");
  s->add_option("--out", synth.out, "Output directory")->required();

  std::string config, fit_out;
  auto* f = app.add_subcommand("fit", "Fit a model from a JSON experiment config");
  f->add_option("--config", config, "Experiment config")->required();
  f->add_option("--out", fit_out, "Output directory (overrides the config)");

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Cross-view retrieval scores of a fitted model");
  e->add_option("--model", eval.model, "Model directory")->required();
  e->add_option("--dataset", eval.dataset, "Dataset manifest")->required();
  e->add_option("--split", eval.splits, "Splits to evaluate")->delimiter(',');
  e->add_option("--n", eval.n, "Recall cutoff");
  e->add_option("--metric", eval.metric, "cosine or euclidean");
  e->add_option("--out", eval.out, "Output directory for report.json / report.txt");

  ScoreArgs score;
  auto* t = app.add_subcommand("score-task", "Score nearest-neighbour retrieval as ASR/MT output");
  t->add_option("--model", score.model, "Model directory")->required();
  t->add_option("--dataset", score.dataset, "Dataset manifest")->required();
  t->add_option("--corpus-dir", score.corpus_dir, "Directory with <split>.txt corpora")->required();
  t->add_option("--source-view", score.source_view, "Query view (default: first model view)");
  t->add_option("--reference-view", score.reference_view, "Retrieved view (default: second)");
  t->add_option("--split", score.split, "Source split");
  t->add_option("--reference-set", score.reference_sets, "test, train, train+test")->delimiter(',');
  t->add_option("--task-metric", score.metrics, "wer, bleu")->delimiter(',');
  t->add_option("--metric", score.metric, "Embedding distance: cosine or euclidean");
  t->add_option("--out", score.out, "Output directory");

  std::string run_dir;
  auto* r = app.add_subcommand("report", "Render a run record as text");
  r->add_option("--run", run_dir, "Run output directory")->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (s->parsed()) return cmd_synth(synth, out);
    if (f->parsed()) return cmd_fit(config, fit_out, out);
    if (e->parsed()) return cmd_eval(eval, out);
    if (t->parsed()) return cmd_score_task(score, out);
    if (r->parsed()) return cmd_report(run_dir, out);
  } catch (const ConfigError& ex) {
    err << "config error: " << ex.what() << "\n";
    return kExitConfig;
  } catch (const DataError& ex) {
    err << "data error: " << ex.what() << "\n";
    return kExitData;
  } catch (const NumericalError& ex) {
    err << "numerical error: " << ex.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace corrspace
