// include/corrspace/common.hpp

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

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace corrspace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Index = Eigen::Index;

/// Base of every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Missing files, bad formats, misaligned views, shape mismatches.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values appearing during a computation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

enum class Split { train, dev, test };

std::string_view to_string(Split s);
Split parse_split(std::string_view name);

/// Worker count for the parallel evaluation paths. Reads CORRSPACE_THREADS,
/// falls back to std::thread::hardware_concurrency().
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Iterations must be independent; the result
/// never depends on the number of workers.
void parallel_for(Index n, const std::function<void(Index)>& body);

}  // namespace corrspace
