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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "apri/infometrics.hpp"
#include "apri/outcomes.hpp"
#include "apri/schema_io.hpp"

namespace apri {

/// A field variable at one window slot.
struct NodeId {
  std::uint32_t var = 0;
  std::uint32_t slot = 0;
  bool operator==(const NodeId&) const = default;
};

/// "name" for slot 0, "name@s" for earlier records in the window.
std::string node_name(const OutcomeTable& outcomes, NodeId id);

/// Conditional probability table P{child | class, field parents}. Rows are
/// laid out [class][parent configuration]; each row spans the child's
/// observable outcomes (MISSING is never a modelled outcome).
struct Cpt {
  std::size_t classes = 0;
  std::size_t configs = 1;
  std::size_t outcomes = 0;
  std::vector<double> probs;
  std::vector<std::uint8_t> unseen;

  std::size_t row_index(std::size_t cls, std::size_t config) const {
    return cls * configs + config;
  }
  std::span<const double> row(std::size_t cls, std::size_t config) const {
    return std::span<const double>(probs).subspan(
        row_index(cls, config) * outcomes, outcomes);
  }
  bool is_unseen(std::size_t cls, std::size_t config) const {
    return unseen[row_index(cls, config)] != 0;
  }
  std::size_t cells() const { return classes * configs * outcomes; }
};

struct FieldNode {
  NodeId id;
  std::string name;
  double mi = 0.0;                   // MI with the class, in bits
  std::vector<std::size_t> parents;  // field parents, as indices into nodes
  Cpt cpt;                           // P{X | class, parents}
  Cpt fallback;                      // P{X | class}
};

struct Dependency {
  std::size_t parent = 0;  // index into nodes
  std::size_t child = 0;
  double cmi = 0.0;
};

/// Candidate field pair scored by conditional MI. Endpoints are rank
/// positions among the selected fields (0 = highest MI with the class).
struct PairScore {
  std::size_t first = 0;
  std::size_t second = 0;
  double cmi = 0.0;
};

struct NetworkModel {
  Schema schema;
  OutcomeTable outcomes;
  std::vector<std::uint64_t> class_counts;
  std::vector<double> prior;
  std::uint32_t positive = 0;
  std::vector<MIScore> field_scores;  // every candidate node, ranked
  std::vector<PairScore> pair_scores; // every selected pair, ranked
  std::vector<FieldNode> nodes;       // selected nodes in rank order
  std::vector<Dependency> dependencies;
  PassStats training;

  std::size_t variables() const { return outcomes.vars.size(); }
  std::size_t window() const { return static_cast<std::size_t>(schema.window); }
  std::size_t slot_index(NodeId id) const {
    return id.slot * variables() + id.var;
  }
  /// Index of a class by name; throws Error(kInvalidArgument) when unknown.
  std::uint32_t class_by_name(std::string_view name) const;
};

/// Greedy dependency selection: pairs in descending CMI (ties by rank), each
/// edge oriented from the higher-ranked to the lower-ranked endpoint, pairs
/// whose child already has max_parents field parents skipped, until the
/// accepted share of the total CMI reaches t_field. Returns (parent, child)
/// rank positions in acceptance order.
std::vector<Dependency> select_dependencies(std::vector<PairScore> pairs,
                                            double t_field, int max_parents);

/// Raw pass-4 counts for one node: cpt is [class][config][outcome], fallback
/// is [class][outcome].
struct NodeCounts {
  std::size_t classes = 0;
  std::size_t configs = 1;
  std::size_t outcomes = 0;
  std::vector<std::uint64_t> cpt;
  std::vector<std::uint64_t> fallback;
};

/// (count + alpha) / (row total + alpha * outcomes); rows without data are
/// flagged unseen and left at zero.
Cpt estimate_cpt(std::span<const std::uint64_t> counts, std::size_t classes,
                 std::size_t configs, std::size_t outcomes, double alpha);

struct EstimatedTables {
  std::vector<double> prior;
  std::vector<Cpt> cpts;
  std::vector<Cpt> fallbacks;
};

EstimatedTables estimate_cpts(std::span<const NodeCounts> counts,
                              std::span<const std::uint64_t> class_counts,
                              double alpha);

/// Four-pass training: outcomes, field selection, dependency selection,
/// parameter estimation.
NetworkModel train(const Schema& schema, Dataset& dataset);

std::string model_to_json(const NetworkModel& model);
NetworkModel model_from_json(std::string_view text);
void save_model(const NetworkModel& model, const std::filesystem::path& path);
NetworkModel load_model(const std::filesystem::path& path);

}  // namespace apri
