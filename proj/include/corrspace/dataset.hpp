// include/corrspace/dataset.hpp

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

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "corrspace/common.hpp"

namespace corrspace {

/// One view of the data: N samples (rows) by d features (columns).
struct ViewMatrix {
  std::string name;
  Matrix data;

  Index rows() const { return data.rows(); }
  Index dim() const { return data.cols(); }
};

/// J row-aligned views plus a split label per sample.
struct MultiviewDataset {
  std::vector<ViewMatrix> views;
  std::vector<Split> splits;

  Index size() const { return static_cast<Index>(splits.size()); }
  Index num_views() const { return static_cast<Index>(views.size()); }

  /// Position of a view by name; throws DataError if absent.
  std::size_t index_of(const std::string& name) const;
  const ViewMatrix& view(const std::string& name) const;

  /// Sample indices carrying the given label, in dataset order.
  std::vector<Index> indices(Split s) const;
  Index count(Split s) const;

  /// Rows of one view restricted to a split. Throws DataError naming the split
  /// when it is empty.
  Matrix rows(const std::string& view_name, Split s) const;
};

/// Checks every structural invariant: unique non-empty names, N >= 1, d >= 1,
/// identical row counts, finite entries, one split label per row.
void validate(const MultiviewDataset& ds);

// ---------------------------------------------------------------------------
// FMAT: "FMAT" magic, u32 version = 1, u64 rows, u64 cols, row-major float32,
// all little-endian.

inline constexpr std::array<char, 4> kFmatMagic{'F', 'M', 'A', 'T'};
inline constexpr std::uint32_t kFmatVersion = 1;

void write_fmat(const std::filesystem::path& path, const Matrix& m);
Matrix read_fmat(const std::filesystem::path& path);

/// Serializes to the exact FMAT byte layout.
std::string encode_fmat(const Matrix& m);
Matrix decode_fmat(std::string_view bytes);

/// Whitespace/tab separated reals, one sample per line.
Matrix read_tsv(const std::filesystem::path& path);

/// Dispatches on extension: ".tsv" reads text, everything else FMAT.
Matrix read_matrix(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Manifest: {"views":[{"name":..,"dim":..,"files":{"train":..,"dev":..,"test":..}}]}
// Paths are relative to the manifest's directory.

MultiviewDataset load_dataset(const std::filesystem::path& manifest_path);

/// Writes <dir>/<view>.<split>.fmat plus <dir>/manifest.json; returns the
/// manifest path. Values are stored at 32-bit precision.
std::filesystem::path save_dataset(const MultiviewDataset& ds, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Pooling of sequence-level states into one utterance vector.

/// T' token-level states (rows) of dimension d.
struct TokenSequence {
  Matrix states;
};

/// F frames (rows) of C class posteriors each.
struct FramePosteriors {
  Matrix posteriors;
};

/// Mean over token states.
Vector pool_tokens(const TokenSequence& seq);

/// Mean posterior over frames. Every row must be a probability vector.
Vector pool_frames(const FramePosteriors& fp);

// ---------------------------------------------------------------------------
// Synthetic linear-Gaussian multiview data.

struct SynthSpec {
  std::array<Index, 3> n_per_split{0, 0, 0};  // train, dev, test
  std::vector<Index> dims;
  Index latent_dim = 0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  /// false: every view draws its own latent, so views are independent.
  bool shared_latent = true;
  std::vector<std::string> names;  // defaults to view0, view1, ...
};

/// view_j = A_j z + sigma * eps, z ~ N(0, I_k0), A_j a fixed d_j x k0 Gaussian
/// map scaled by 1/sqrt(k0). Deterministic in the seed.
MultiviewDataset synth_correlated(const SynthSpec& spec);

}  // namespace corrspace
