// src/dataset.cpp

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

#include "corrspace/dataset.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace corrspace {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<Split, 3> kAllSplits{Split::train, Split::dev, Split::test};

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(std::string_view bytes, std::size_t offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    value |= static_cast<T>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  return value;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

}  // namespace

// ---------------------------------------------------------------------------

std::size_t MultiviewDataset::index_of(const std::string& name) const {
  for (std::size_t j = 0; j < views.size(); ++j)
    if (views[j].name == name) return j;
  throw DataError("unknown view '" + name + "'");
}

const ViewMatrix& MultiviewDataset::view(const std::string& name) const {
  return views[index_of(name)];
}

std::vector<Index> MultiviewDataset::indices(Split s) const {
  std::vector<Index> out;
  for (Index i = 0; i < size(); ++i)
    if (splits[static_cast<std::size_t>(i)] == s) out.push_back(i);
  return out;
}

Index MultiviewDataset::count(Split s) const {
  return static_cast<Index>(std::count(splits.begin(), splits.end(), s));
}

Matrix MultiviewDataset::rows(const std::string& view_name, Split s) const {
  const auto idx = indices(s);
  if (idx.empty())
    throw DataError("split '" + std::string(to_string(s)) + "' is empty");
  return view(view_name).data(idx, Eigen::all);
}

void validate(const MultiviewDataset& ds) {
  std::set<std::string> names;
  for (const auto& v : ds.views) {
    if (v.name.empty()) throw DataError("view with empty name");
    if (!names.insert(v.name).second) throw DataError("duplicate view name '" + v.name + "'");
    if (v.rows() < 1 || v.dim() < 1) throw DataError("view '" + v.name + "' is empty");
    if (v.rows() != ds.size())
      throw DataError("view '" + v.name + "' has " + std::to_string(v.rows()) +
                      " rows, expected " + std::to_string(ds.size()));
    if (!v.data.allFinite()) throw DataError("view '" + v.name + "' has non-finite values");
  }
}

// ---------------------------------------------------------------------------

std::string encode_fmat(const Matrix& m) {
  std::string out;
  out.reserve(24 + static_cast<std::size_t>(m.size()) * 4);
  out.append(kFmatMagic.data(), kFmatMagic.size());
  put_le<std::uint32_t>(out, kFmatVersion);
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(m(i, j))));
  return out;
}

Matrix decode_fmat(std::string_view bytes) {
  if (bytes.size() < 24 || std::memcmp(bytes.data(), kFmatMagic.data(), 4) != 0)
    throw DataError("not an FMAT file (bad magic)");
  const auto version = get_le<std::uint32_t>(bytes, 4);
  if (version != kFmatVersion) throw DataError("unsupported FMAT version " + std::to_string(version));
  const auto rows = get_le<std::uint64_t>(bytes, 8);
  const auto cols = get_le<std::uint64_t>(bytes, 16);
  if (cols != 0 && rows > (bytes.size() - 24) / 4 / cols)
    throw DataError("FMAT payload truncated");
  if (bytes.size() != 24 + rows * cols * 4) throw DataError("FMAT payload size mismatch");
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  std::size_t off = 24;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j, off += 4)
      m(i, j) = std::bit_cast<float>(get_le<std::uint32_t>(bytes, off));
  return m;
}

void write_fmat(const fs::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  const std::string bytes = encode_fmat(m);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

Matrix read_fmat(const fs::path& path) {
  try {
    return decode_fmat(slurp(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

Matrix read_tsv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw DataError(path.string() + ": bad number '" + tok + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw DataError(path.string() + ": ragged rows");
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Index>(rows.size()), rows.empty() ? 0 : static_cast<Index>(rows[0].size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

Matrix read_matrix(const fs::path& path) {
  if (path.extension() == ".tsv") return read_tsv(path);
  return read_fmat(path);
}

// ---------------------------------------------------------------------------

MultiviewDataset load_dataset(const fs::path& manifest_path) {
  json manifest;
  try {
    manifest = json::parse(slurp(manifest_path));
  } catch (const json::exception& e) {
    throw DataError(manifest_path.string() + ": " + e.what());
  }
  const fs::path base = manifest_path.parent_path();
  if (!manifest.contains("views") || !manifest["views"].is_array())
    throw DataError("manifest has no 'views' array");

  MultiviewDataset ds;
  std::array<Index, 3> counts{-1, -1, -1};
  for (const auto& entry : manifest["views"]) {
    ViewMatrix view;
    try {
      view.name = entry.at("name").get<std::string>();
      const auto dim = entry.at("dim").get<Index>();
      const auto& files = entry.at("files");
      std::vector<Matrix> parts;
      for (std::size_t s = 0; s < kAllSplits.size(); ++s) {
        const std::string key(to_string(kAllSplits[s]));
        Matrix part(0, dim);
        if (files.contains(key)) {
          part = read_matrix(base / files[key].get<std::string>());
          if (part.rows() > 0 && part.cols() != dim)
            throw DataError("view '" + view.name + "' split " + key + " has " +
                            std::to_string(part.cols()) + " columns, manifest says " +
                            std::to_string(dim));
        }
        if (counts[s] < 0) counts[s] = part.rows();
        if (part.rows() != counts[s])
          throw DataError("row-count mismatch for split " + key + ": view '" + view.name +
                          "' has " + std::to_string(part.rows()) + ", expected " +
                          std::to_string(counts[s]));
        parts.push_back(std::move(part));
      }
      view.data.resize(counts[0] + counts[1] + counts[2], dim);
      Index at = 0;
      for (const auto& p : parts) {
        view.data.middleRows(at, p.rows()) = p;
        at += p.rows();
      }
    } catch (const json::exception& e) {
      throw DataError("malformed manifest entry: " + std::string(e.what()));
    }
    ds.views.push_back(std::move(view));
  }
  if (!ds.views.empty()) {
    for (std::size_t s = 0; s < kAllSplits.size(); ++s)
      ds.splits.insert(ds.splits.end(), static_cast<std::size_t>(counts[s]), kAllSplits[s]);
  }
  validate(ds);
  return ds;
}

fs::path save_dataset(const MultiviewDataset& ds, const fs::path& dir) {
  validate(ds);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());

  json views = json::array();
  for (const auto& v : ds.views) {
    json files = json::object();
    for (Split s : kAllSplits) {
      const auto idx = ds.indices(s);
      const std::string file = v.name + "." + std::string(to_string(s)) + ".fmat";
      write_fmat(dir / file, v.data(idx, Eigen::all));
      files[std::string(to_string(s))] = file;
    }
    views.push_back({{"name", v.name}, {"dim", v.dim()}, {"files", files}});
  }
  const fs::path manifest = dir / "manifest.json";
  std::ofstream out(manifest, std::ios::trunc);
  if (!out) throw DataError("cannot write " + manifest.string());
  out << json{{"views", views}}.dump(2) << "\n";
  if (!out) throw DataError("write failed for " + manifest.string());
  return manifest;
}

// ---------------------------------------------------------------------------

Vector pool_tokens(const TokenSequence& seq) {
  if (seq.states.rows() < 1) throw DataError("pool_tokens: empty sequence");
  if (!seq.states.allFinite()) throw DataError("pool_tokens: non-finite state");
  return seq.states.colwise().mean().transpose();
}

Vector pool_frames(const FramePosteriors& fp) {
  const auto& p = fp.posteriors;
  if (p.rows() < 1) throw DataError("pool_frames: no frames");
  for (Index f = 0; f < p.rows(); ++f) {
    if (!p.row(f).allFinite() || (p.row(f).array() < 0).any() || (p.row(f).array() > 1).any())
      throw DataError("pool_frames: frame " + std::to_string(f) + " has entries outside [0,1]");
    if (std::abs(p.row(f).sum() - 1.0) > 1e-6)
      throw DataError("pool_frames: frame " + std::to_string(f) + " does not sum to 1");
  }
  return p.colwise().mean().transpose();
}

// ---------------------------------------------------------------------------

MultiviewDataset synth_correlated(const SynthSpec& spec) {
  if (spec.dims.empty()) throw DataError("synth: no views requested");
  if (spec.latent_dim < 1) throw DataError("synth: latent dimension must be >= 1");
  for (Index d : spec.dims)
    if (d < spec.latent_dim)
      throw DataError("synth: latent dimension " + std::to_string(spec.latent_dim) +
                      " exceeds view dimension " + std::to_string(d));
  if (!(spec.noise_sigma >= 0)) throw DataError("synth: noise sigma must be >= 0");
  if (!spec.names.empty() && spec.names.size() != spec.dims.size())
    throw DataError("synth: names and dims differ in length");
  for (Index n : spec.n_per_split)
    if (n < 0) throw DataError("synth: negative split size");
  const Index n = spec.n_per_split[0] + spec.n_per_split[1] + spec.n_per_split[2];
  if (n < 1) throw DataError("synth: no samples requested");

  const Index k0 = spec.latent_dim;
  const std::size_t J = spec.dims.size();
  auto stream = [&](std::uint64_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(tag)};
    return std::mt19937_64(seq);
  };
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto fill = [&](Matrix& m, std::mt19937_64& rng) {
    for (Index j = 0; j < m.cols(); ++j)
      for (Index i = 0; i < m.rows(); ++i) m(i, j) = gauss(rng);
  };

  MultiviewDataset ds;
  Matrix shared(n, k0);
  if (spec.shared_latent) {
    auto rng = stream(1);
    fill(shared, rng);
  }
  for (std::size_t j = 0; j < J; ++j) {
    const Index d = spec.dims[j];
    Matrix a(d, k0);
    auto map_rng = stream(100 + j);
    fill(a, map_rng);
    a /= std::sqrt(static_cast<double>(k0));

    Matrix z = shared;
    if (!spec.shared_latent) {
      z.resize(n, k0);
      auto own = stream(200 + j);
      fill(z, own);
    }
    Matrix noise(n, d);
    auto noise_rng = stream(300 + j);
    fill(noise, noise_rng);

    ViewMatrix v;
    v.name = spec.names.empty() ? "view" + std::to_string(j) : spec.names[j];
    v.data = z * a.transpose() + spec.noise_sigma * noise;
    ds.views.push_back(std::move(v));
  }
  for (std::size_t s = 0; s < kAllSplits.size(); ++s)
    ds.splits.insert(ds.splits.end(), static_cast<std::size_t>(spec.n_per_split[s]), kAllSplits[s]);
  validate(ds);
  return ds;
}

}  // namespace corrspace
