// include/corrspace/model.hpp

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

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "corrspace/dcca.hpp"
#include "corrspace/dgcca.hpp"
#include "corrspace/linear_cca.hpp"

namespace corrspace {

/// Any fitted shared-space model.
using Model = std::variant<CcaModel, DccaModel, DgccaModel>;

/// "cca", "dcca", "gcca-linear" or "dgcca".
std::string method_name(const Model& model);

std::vector<std::string> model_views(const Model& model);

/// N x k shared-space embedding of raw rows of the named view.
Matrix embed(const Model& model, const std::string& view, const Eigen::Ref<const Matrix>& rows);

void save_model(const Model& model, const std::filesystem::path& dir);

/// Dispatches on the "method" field of <dir>/header.json.
Model load_model(const std::filesystem::path& dir);

}  // namespace corrspace
