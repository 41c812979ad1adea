// src/model.cpp

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

#include "corrspace/model.hpp"

#include <fstream>

#include <json.hpp>

namespace corrspace {

namespace fs = std::filesystem;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Side side_of(const std::string& view, const std::string& vx, const std::string& vy) {
  if (view == vx) return Side::x;
  if (view == vy) return Side::y;
  throw DataError("model has no view '" + view + "'");
}

}  // namespace

std::string method_name(const Model& model) {
  return std::visit(overloaded{[](const CcaModel&) { return std::string("cca"); },
                               [](const DccaModel&) { return std::string("dcca"); },
                               [](const DgccaModel& m) {
                                 return std::string(m.config.linear ? "gcca-linear" : "dgcca");
                               }},
                    model);
}

std::vector<std::string> model_views(const Model& model) {
  return std::visit(
      overloaded{[](const CcaModel& m) { return std::vector<std::string>{m.view_x, m.view_y}; },
                 [](const DccaModel& m) { return std::vector<std::string>{m.view_x, m.view_y}; },
                 [](const DgccaModel& m) { return m.views; }},
      model);
}

Matrix embed(const Model& model, const std::string& view, const Eigen::Ref<const Matrix>& rows) {
  return std::visit(
      overloaded{
          [&](const CcaModel& m) { return project(m, rows, side_of(view, m.view_x, m.view_y)); },
          [&](const DccaModel& m) { return embed(m, rows, side_of(view, m.view_x, m.view_y)); },
          [&](const DgccaModel& m) { return embed(m, rows, view); }},
      model);
}

void save_model(const Model& model, const fs::path& dir) {
  std::visit(overloaded{[&](const CcaModel& m) { save_cca(m, dir); },
                        [&](const DccaModel& m) { save_dcca(m, dir); },
                        [&](const DgccaModel& m) { save_dgcca(m, dir); }},
             model);
}

Model load_model(const fs::path& dir) {
  std::ifstream in(dir / "header.json");
  if (!in) throw DataError("no model at " + dir.string() + " (missing header.json)");
  std::string method;
  try {
    method = nlohmann::json::parse(in).at("method").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad model header in " + dir.string() + ": " + e.what());
  }
  try {
    if (method == "cca") return load_cca(dir);
    if (method == "dcca") return load_dcca(dir);
    if (method == "gcca-linear" || method == "dgcca") return load_dgcca(dir);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad model in " + dir.string() + ": " + e.what());
  }
  throw DataError("unknown model method '" + method + "'");
}

}  // namespace corrspace
