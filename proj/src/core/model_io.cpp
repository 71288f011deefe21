// Copyright 2026 The APRI Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "apri/error.hpp"
#include "apri/structure.hpp"

namespace apri {
namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kFormat = "apri-network-model";
constexpr int kVersion = 1;

Json schema_json(const Schema& s) {
  Json vars = Json::array();
  for (const auto& v : s.field_vars) {
    Json j{{"name", v.name}, {"kind", v.continuous() ? "continuous" : "categorical"}};
    if (v.continuous())
      j["discretizer"] = v.discretizer == Discretizer::kQuantile ? "quantile" : "entropy";
    vars.push_back(std::move(j));
  }
  Json j{{"class", s.class_var},
         {"vars", std::move(vars)},
         {"t_prime", s.t_prime},
         {"t_field", s.t_field},
         {"window", s.window},
         {"group", s.group_key ? Json(*s.group_key) : Json(nullptr)},
         {"max_parents", s.max_parents},
         {"max_bins", s.max_bins},
         {"smoothing", s.smoothing},
         {"max_model_cells", s.max_model_cells},
         {"positive", s.positive_class ? Json(*s.positive_class) : Json(nullptr)},
         {"seed", s.seed},
         {"reservoir", s.reservoir_capacity},
         {"max_outcomes", s.max_outcomes}};
  return j;
}

Schema schema_from(const Json& j) {
  Schema s;
  s.class_var = j.at("class").get<std::string>();
  for (const auto& v : j.at("vars")) {
    VariableSpec spec;
    spec.name = v.at("name").get<std::string>();
    if (v.at("kind") == "continuous") {
      spec.kind = VarKind::kContinuous;
      spec.discretizer = v.at("discretizer") == "quantile" ? Discretizer::kQuantile
                                                           : Discretizer::kEntropy;
    }
    s.field_vars.push_back(std::move(spec));
  }
  s.t_prime = j.at("t_prime").get<double>();
  s.t_field = j.at("t_field").get<double>();
  s.window = j.at("window").get<int>();
  if (!j.at("group").is_null()) s.group_key = j.at("group").get<std::string>();
  s.max_parents = j.at("max_parents").get<int>();
  s.max_bins = j.at("max_bins").get<int>();
  s.smoothing = j.at("smoothing").get<double>();
  s.max_model_cells = j.at("max_model_cells").get<std::uint64_t>();
  if (!j.at("positive").is_null())
    s.positive_class = j.at("positive").get<std::string>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.reservoir_capacity = j.at("reservoir").get<std::size_t>();
  s.max_outcomes = j.at("max_outcomes").get<std::size_t>();
  return s;
}

Json cpt_json(const Cpt& c) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < c.classes * c.configs; ++r)
    rows.push_back(std::vector<double>(
        c.probs.begin() + static_cast<std::ptrdiff_t>(r * c.outcomes),
        c.probs.begin() + static_cast<std::ptrdiff_t>((r + 1) * c.outcomes)));
  std::vector<bool> unseen(c.unseen.begin(), c.unseen.end());
  return Json{{"classes", c.classes},
              {"configs", c.configs},
              {"outcomes", c.outcomes},
              {"rows", std::move(rows)},
              {"unseen", unseen}};
}

Cpt cpt_from(const Json& j) {
  Cpt c;
  c.classes = j.at("classes").get<std::size_t>();
  c.configs = j.at("configs").get<std::size_t>();
  c.outcomes = j.at("outcomes").get<std::size_t>();
  const auto& rows = j.at("rows");
  if (rows.size() != c.classes * c.configs)
    throw Error(ErrorKind::kParse, "conditional table has the wrong row count");
  for (const auto& r : rows) {
    if (r.size() != c.outcomes)
      throw Error(ErrorKind::kParse, "conditional table row has the wrong width");
    for (const auto& p : r) c.probs.push_back(p.get<double>());
  }
  for (const auto& u : j.at("unseen")) c.unseen.push_back(u.get<bool>() ? 1 : 0);
  if (c.unseen.size() != c.classes * c.configs)
    throw Error(ErrorKind::kParse, "conditional table has the wrong flag count");
  return c;
}

}  // namespace

std::string model_to_json(const NetworkModel& m) {
  Json vars = Json::array();
  for (const auto& v : m.outcomes.vars)
    vars.push_back({{"name", v.name},
                    {"kind", v.continuous() ? "continuous" : "categorical"},
                    {"symbols", v.symbols},
                    {"edges", v.edges.cuts}});

  Json field_scores = Json::array();
  for (const auto& s : m.field_scores)
    field_scores.push_back({{"node", s.subject}, {"mi", s.value}, {"order", s.order}});

  Json pair_scores = Json::array();
  for (const auto& p : m.pair_scores)
    pair_scores.push_back({{"first", p.first},
                           {"second", p.second},
                           {"names", {m.nodes[p.first].name, m.nodes[p.second].name}},
                           {"cmi", p.cmi}});

  Json nodes = Json::array();
  for (const auto& n : m.nodes) {
    std::vector<std::string> parent_names;
    for (auto p : n.parents) parent_names.push_back(m.nodes[p].name);
    nodes.push_back({{"name", n.name},
                     {"variable", m.outcomes.vars[n.id.var].name},
                     {"slot", n.id.slot},
                     {"mi", n.mi},
                     {"parents", n.parents},
                     {"parent_names", parent_names},
                     {"cpt", cpt_json(n.cpt)},
                     {"fallback", cpt_json(n.fallback)}});
  }

  Json deps = Json::array();
  for (const auto& d : m.dependencies)
    deps.push_back({{"parent", d.parent},
                    {"child", d.child},
                    {"names", {m.nodes[d.parent].name, m.nodes[d.child].name}},
                    {"cmi", d.cmi}});

  Json j{{"format", kFormat},
         {"version", kVersion},
         {"schema", schema_json(m.schema)},
         {"classes", m.outcomes.classes},
         {"positive", m.outcomes.classes.at(m.positive)},
         {"class_counts", m.class_counts},
         {"prior", m.prior},
         {"variables", std::move(vars)},
         {"field_scores", std::move(field_scores)},
         {"pair_scores", std::move(pair_scores)},
         {"nodes", std::move(nodes)},
         {"dependencies", std::move(deps)},
         {"training",
          {{"passes", m.training.passes},
           {"rows", m.training.rows},
           {"rejected", m.training.rejected},
           {"nan_missing", m.training.nan_missing}}}};
  return j.dump(1) + "\n";
}

NetworkModel model_from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("model file is not JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != kFormat || j.value("version", 0) != kVersion)
      throw Error(ErrorKind::kParse, "not an apri network model (format/version)");
    NetworkModel m;
    m.schema = schema_from(j.at("schema"));
    m.outcomes.classes = j.at("classes").get<std::vector<std::string>>();
    for (const auto& v : j.at("variables")) {
      VariableOutcomes vo;
      vo.name = v.at("name").get<std::string>();
      vo.kind = v.at("kind") == "continuous" ? VarKind::kContinuous
                                             : VarKind::kCategorical;
      vo.symbols = v.at("symbols").get<std::vector<std::string>>();
      vo.edges.cuts = v.at("edges").get<std::vector<double>>();
      if (vo.symbols.empty() || vo.symbols.back() != kMissingToken)
        throw Error(ErrorKind::kParse,
                    "alphabet of '" + vo.name + "' lacks the MISSING symbol");
      vo.build_index();
      m.outcomes.vars.push_back(std::move(vo));
    }
    m.positive = m.class_by_name(j.at("positive").get<std::string>());
    m.class_counts = j.at("class_counts").get<std::vector<std::uint64_t>>();
    m.prior = j.at("prior").get<std::vector<double>>();
    for (const auto& s : j.at("field_scores"))
      m.field_scores.push_back({s.at("node").get<std::string>(),
                                s.at("mi").get<double>(),
                                s.at("order").get<std::size_t>()});
    for (const auto& p : j.at("pair_scores"))
      m.pair_scores.push_back({p.at("first").get<std::size_t>(),
                               p.at("second").get<std::size_t>(),
                               p.at("cmi").get<double>()});
    for (const auto& n : j.at("nodes")) {
      FieldNode node;
      node.name = n.at("name").get<std::string>();
      const auto var = n.at("variable").get<std::string>();
      const int vi = m.schema.field_index(var);
      if (vi < 0) throw Error(ErrorKind::kParse, "node on unknown variable " + var);
      node.id = {static_cast<std::uint32_t>(vi), n.at("slot").get<std::uint32_t>()};
      node.mi = n.at("mi").get<double>();
      node.parents = n.at("parents").get<std::vector<std::size_t>>();
      node.cpt = cpt_from(n.at("cpt"));
      node.fallback = cpt_from(n.at("fallback"));
      m.nodes.push_back(std::move(node));
    }
    for (const auto& d : j.at("dependencies"))
      m.dependencies.push_back({d.at("parent").get<std::size_t>(),
                                d.at("child").get<std::size_t>(),
                                d.at("cmi").get<double>()});
    const auto& t = j.at("training");
    m.training.passes = t.at("passes").get<std::uint64_t>();
    m.training.rows = t.at("rows").get<std::uint64_t>();
    m.training.rejected = t.at("rejected").get<std::uint64_t>();
    m.training.nan_missing = t.at("nan_missing").get<std::uint64_t>();

    for (std::size_t i = 0; i < m.nodes.size(); ++i)
      for (auto p : m.nodes[i].parents)
        if (p >= i)
          throw Error(ErrorKind::kParse, "parent of '" + m.nodes[i].name +
                                             "' is not ranked above it");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("malformed model file: ") + e.what());
  }
}

void save_model(const NetworkModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write model file '" + path.string() + "'");
  out << model_to_json(model);
  if (!out) throw Error(ErrorKind::kIo, "write failed for '" + path.string() + "'");
}

NetworkModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open model file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace apri
