// src/retrieval.cpp

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

#include "corrspace/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace corrspace {

using nlohmann::json;

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Distances are accumulated in a fixed order so that identical rows always
// give bitwise identical distances, whatever their position.
double dot(const double* a, const double* b, Index k) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  Index i = 0;
  for (; i + 4 <= k; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < k; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

double squared_distance(const double* a, const double* b, Index k) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  Index i = 0;
  for (; i + 4 <= k; i += 4) {
    const double d0 = a[i] - b[i], d1 = a[i + 1] - b[i + 1];
    const double d2 = a[i + 2] - b[i + 2], d3 = a[i + 3] - b[i + 3];
    s0 += d0 * d0;
    s1 += d1 * d1;
    s2 += d2 * d2;
    s3 += d3 * d3;
  }
  for (; i < k; ++i) s0 += (a[i] - b[i]) * (a[i] - b[i]);
  return (s0 + s1) + (s2 + s3);
}

RowMajor prepare(const Eigen::Ref<const Matrix>& m, Metric metric) {
  RowMajor out = m;
  if (metric == Metric::cosine) {
    for (Index i = 0; i < out.rows(); ++i) {
      const double norm = std::sqrt(dot(out.row(i).data(), out.row(i).data(), out.cols()));
      if (norm > 0) out.row(i) /= norm;
    }
  }
  return out;
}

class DistanceRows {
 public:
  DistanceRows(const Eigen::Ref<const Matrix>& source, const Eigen::Ref<const Matrix>& refs,
               Metric metric)
      : metric_(metric), src_(prepare(source, metric)), ref_(prepare(refs, metric)) {
    if (source.cols() != refs.cols())
      throw DataError("retrieval: source dim " + std::to_string(source.cols()) +
                      " != reference dim " + std::to_string(refs.cols()));
  }

  void row(Index i, std::vector<double>& out) const {
    out.resize(static_cast<std::size_t>(ref_.rows()));
    const double* a = src_.row(i).data();
    const Index k = src_.cols();
    for (Index j = 0; j < ref_.rows(); ++j) {
      const double* b = ref_.row(j).data();
      out[static_cast<std::size_t>(j)] =
          metric_ == Metric::cosine ? 1.0 - dot(a, b, k) : squared_distance(a, b, k);
    }
  }

  Index sources() const { return src_.rows(); }
  Index refs() const { return ref_.rows(); }

 private:
  Metric metric_;
  RowMajor src_, ref_;
};

}  // namespace

std::string_view to_string(Metric m) { return m == Metric::cosine ? "cosine" : "euclidean"; }

Metric parse_metric(std::string_view name) {
  if (name == "cosine") return Metric::cosine;
  if (name == "euclidean") return Metric::euclidean;
  throw ConfigError("unknown metric '" + std::string(name) + "'");
}

Matrix distance_matrix(const Eigen::Ref<const Matrix>& source, const Eigen::Ref<const Matrix>& refs,
                       Metric metric) {
  DistanceRows rows(source, refs, metric);
  Matrix out(rows.sources(), rows.refs());
  std::vector<double> buf;
  for (Index i = 0; i < rows.sources(); ++i) {
    rows.row(i, buf);
    out.row(i) = Eigen::Map<const RowVector>(buf.data(), static_cast<Index>(buf.size()));
  }
  return out;
}

std::vector<Index> nearest_reference(const Eigen::Ref<const Matrix>& source,
                                     const Eigen::Ref<const Matrix>& refs, Metric metric) {
  if (refs.rows() == 0) throw DataError("nearest_reference: empty reference set");
  DistanceRows rows(source, refs, metric);
  std::vector<Index> best(static_cast<std::size_t>(rows.sources()), 0);
  parallel_for(rows.sources(), [&](Index i) {
    std::vector<double> d;
    rows.row(i, d);
    // min_element returns the first minimum, i.e. the lowest index on ties.
    best[static_cast<std::size_t>(i)] = std::min_element(d.begin(), d.end()) - d.begin();
  });
  return best;
}

double recall_at_n(const Eigen::Ref<const Matrix>& source, const Eigen::Ref<const Matrix>& refs,
                   Index n, Metric metric) {
  if (source.rows() == 0) throw DataError("recall_at_n: no samples");
  if (refs.rows() < source.rows())
    throw DataError("recall_at_n: source and references are not row-aligned");
  if (n < 1) throw DataError("recall_at_n: n must be >= 1");
  DistanceRows rows(source, refs, metric);
  const Index N = source.rows();
  const Index num_refs = refs.rows();
  if (n >= num_refs) return 100.0;

  std::vector<char> hit(static_cast<std::size_t>(N), 0);
  parallel_for(N, [&](Index i) {
    std::vector<double> d;
    rows.row(i, d);
    const double own = d[static_cast<std::size_t>(i)];
    Index ahead = 0;
    for (Index j = 0; j < num_refs && ahead < n; ++j) {
      const double dj = d[static_cast<std::size_t>(j)];
      if (dj < own || (dj == own && j < i)) ++ahead;
    }
    hit[static_cast<std::size_t>(i)] = ahead < n;
  });
  const auto hits = std::count(hit.begin(), hit.end(), 1);
  return 100.0 * static_cast<double>(hits) / static_cast<double>(N);
}

double random_baseline(Index num_refs, Index n) {
  if (n < 1 || n > num_refs) throw DataError("random_baseline: need 1 <= n <= N");
  return 100.0 * static_cast<double>(n) / static_cast<double>(num_refs);
}

double RetrievalReport::score(const std::string& source, const std::string& reference) const {
  for (const auto& p : pairs)
    if (p.source == source && p.reference == reference) return p.recall;
  throw DataError("no score for pair " + source + " -> " + reference);
}

std::vector<std::string> RetrievalReport::view_order() const {
  std::vector<std::string> order;
  auto add = [&](const std::string& v) {
    if (std::find(order.begin(), order.end(), v) == order.end()) order.push_back(v);
  };
  for (const auto& p : pairs) {
    add(p.source);
    add(p.reference);
  }
  return order;
}

RetrievalReport evaluate_all_pairs(const std::vector<NamedEmbedding>& embeddings, Index n,
                                   Metric metric) {
  if (embeddings.size() < 2) throw DataError("evaluate_all_pairs: need at least 2 views");
  const Index N = embeddings.front().second.rows();
  for (const auto& [name, e] : embeddings)
    if (e.rows() != N || e.cols() != embeddings.front().second.cols())
      throw DataError("evaluate_all_pairs: embedding '" + name + "' is misaligned");

  RetrievalReport report;
  report.n = n;
  report.metric = metric;
  report.num_samples = N;
  for (std::size_t s = 0; s < embeddings.size(); ++s)
    for (std::size_t r = 0; r < embeddings.size(); ++r) {
      if (s == r) continue;
      const auto& [src_name, src] = embeddings[s];
      const auto& [ref_name, ref] = embeddings[r];
      report.pairs.push_back({src_name, ref_name, recall_at_n(src, ref, n, metric)});
    }
  report.aggregate = report.pairs.front().recall;
  for (const auto& p : report.pairs) report.aggregate = std::max(report.aggregate, p.recall);
  return report;
}

json to_json(const RetrievalReport& report) {
  json pairs = json::array();
  for (const auto& p : report.pairs)
    pairs.push_back({{"source", p.source}, {"reference", p.reference}, {"recall", p.recall}});
  json j{{"split", report.split},
         {"n", report.n},
         {"metric", std::string(to_string(report.metric))},
         {"model", report.model_id},
         {"samples", report.num_samples},
         {"pairs", pairs},
         {"aggregate", report.aggregate}};
  if (report.num_samples >= report.n && report.n >= 1)
    j["random_baseline"] = random_baseline(report.num_samples, report.n);
  return j;
}

RetrievalReport report_from_json(const json& j) {
  RetrievalReport r;
  r.split = j.at("split").get<std::string>();
  r.n = j.at("n").get<Index>();
  r.metric = parse_metric(j.at("metric").get<std::string>());
  r.model_id = j.value("model", "");
  r.num_samples = j.value("samples", Index{0});
  for (const auto& p : j.at("pairs"))
    r.pairs.push_back({p.at("source").get<std::string>(), p.at("reference").get<std::string>(),
                       p.at("recall").get<double>()});
  r.aggregate = j.at("aggregate").get<double>();
  return r;
}

std::string format_table(const RetrievalReport& report) {
  const auto views = report.view_order();
  std::size_t width = 10;
  for (const auto& v : views) width = std::max(width, v.size() + 2);

  std::ostringstream os;
  os << "Recall@" << report.n << " (" << to_string(report.metric) << ", split "
     << report.split << ", N=" << report.num_samples << "), source row -> reference column\n";
  os << std::left << std::setw(static_cast<int>(width)) << "";
  for (const auto& v : views) os << std::right << std::setw(static_cast<int>(width)) << v;
  os << "\n";
  for (const auto& src : views) {
    os << std::left << std::setw(static_cast<int>(width)) << src;
    for (const auto& ref : views) {
      os << std::right << std::setw(static_cast<int>(width));
      if (src == ref) {
        os << "-";
      } else {
        std::ostringstream cell;
        cell << std::fixed << std::setprecision(2) << report.score(src, ref);
        os << cell.str();
      }
    }
    os << "\n";
  }
  os << std::fixed << std::setprecision(2) << "aggregate (max): " << report.aggregate << "\n";
  if (report.num_samples >= report.n && report.n >= 1)
    os << std::setprecision(4) << "random baseline: " << random_baseline(report.num_samples, report.n)
       << "\n";
  return os.str();
}

}  // namespace corrspace
