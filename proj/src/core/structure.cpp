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

#include "apri/structure.hpp"

#include <algorithm>
#include <limits>

#include "apri/error.hpp"
#include "apri/window.hpp"

namespace apri {

std::string node_name(const OutcomeTable& outcomes, NodeId id) {
  std::string name = outcomes.vars.at(id.var).name;
  if (id.slot > 0) name += "@" + std::to_string(id.slot);
  return name;
}

std::uint32_t NetworkModel::class_by_name(std::string_view name) const {
  for (std::size_t i = 0; i < outcomes.classes.size(); ++i)
    if (outcomes.classes[i] == name) return static_cast<std::uint32_t>(i);
  throw Error(ErrorKind::kInvalidArgument,
              "unknown positive class '" + std::string(name) + "'");
}

std::vector<Dependency> select_dependencies(std::vector<PairScore> pairs,
                                            double t_field, int max_parents) {
  for (auto& p : pairs)
    if (p.first > p.second) std::swap(p.first, p.second);
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const PairScore& a, const PairScore& b) {
                     if (a.cmi != b.cmi) return a.cmi > b.cmi;
                     if (a.first != b.first) return a.first < b.first;
                     return a.second < b.second;
                   });
  std::vector<Dependency> edges;
  if (max_parents <= 0) return edges;
  double total = 0.0;
  std::size_t ranks = 0;
  for (const auto& p : pairs) {
    total += std::max(p.cmi, 0.0);
    ranks = std::max(ranks, p.second + 1);
  }
  if (total <= 0.0) return edges;
  std::vector<int> parent_count(ranks, 0);
  double cumulative = 0.0;
  for (const auto& p : pairs) {
    if (p.cmi <= 0.0) break;
    if (parent_count[p.second] >= max_parents) continue;
    ++parent_count[p.second];
    edges.push_back({p.first, p.second, p.cmi});
    cumulative += p.cmi;
    if (reached_share(cumulative, total, t_field)) break;
  }
  return edges;
}

Cpt estimate_cpt(std::span<const std::uint64_t> counts, std::size_t classes,
                 std::size_t configs, std::size_t outcomes, double alpha) {
  Cpt cpt;
  cpt.classes = classes;
  cpt.configs = configs;
  cpt.outcomes = outcomes;
  cpt.probs.assign(classes * configs * outcomes, 0.0);
  cpt.unseen.assign(classes * configs, 0);
  for (std::size_t r = 0; r < classes * configs; ++r) {
    auto row = counts.subspan(r * outcomes, outcomes);
    std::uint64_t total = 0;
    for (auto c : row) total += c;
    if (total == 0) {
      cpt.unseen[r] = 1;
      continue;
    }
    const double denom =
        static_cast<double>(total) + alpha * static_cast<double>(outcomes);
    for (std::size_t o = 0; o < outcomes; ++o)
      cpt.probs[r * outcomes + o] = (static_cast<double>(row[o]) + alpha) / denom;
  }
  return cpt;
}

EstimatedTables estimate_cpts(std::span<const NodeCounts> counts,
                              std::span<const std::uint64_t> class_counts,
                              double alpha) {
  EstimatedTables t;
  std::uint64_t n = 0;
  for (auto c : class_counts) n += c;
  for (auto c : class_counts)
    t.prior.push_back(n == 0 ? 0.0
                             : static_cast<double>(c) / static_cast<double>(n));
  for (const auto& nc : counts) {
    t.cpts.push_back(
        estimate_cpt(nc.cpt, nc.classes, nc.configs, nc.outcomes, alpha));
    t.fallbacks.push_back(
        estimate_cpt(nc.fallback, nc.classes, 1, nc.outcomes, alpha));
  }
  return t;
}

namespace {

// Drives one pass, handing each record's class (if any) and window case to fn.
template <typename Fn>
void pass_cases(Dataset& ds, const NetworkModel& m, Fn&& fn) {
  WindowState window(m.schema.window, m.variables(), m.outcomes);
  std::vector<std::uint32_t> current, cases;
  iterate_pass(ds, [&](const RecordView& r) {
    encode_record(r, m.outcomes, current);
    window.push(r.group, current, cases);
    auto cls = m.outcomes.class_index(r.class_value);
    if (cls) fn(*cls, std::span<const std::uint32_t>(cases));
  });
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

}  // namespace

NetworkModel train(const Schema& schema, Dataset& dataset) {
  NetworkModel m;
  m.schema = schema;

  // Pass 1: outcome sets.
  m.outcomes = collect_outcomes(schema, dataset);
  const std::size_t k = m.outcomes.classes.size();
  if (k < 2)
    throw Error(ErrorKind::kTraining, "class column '" + schema.class_var +
                                          "' has fewer than two observed values");

  const std::size_t nv = m.variables();
  const std::size_t w = m.window();
  std::vector<NodeId> candidates;
  for (std::uint32_t s = 0; s < w; ++s)
    for (std::uint32_t v = 0; v < nv; ++v) candidates.push_back({v, s});

  // Pass 2: class x field counts, field selection.
  std::vector<JointCounts> prime(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i)
    prime[i] = JointCounts({k, m.outcomes.vars[candidates[i].var].observable()});
  std::vector<std::uint64_t> class_totals(k, 0);
  pass_cases(dataset, m, [&](std::uint32_t cls, std::span<const std::uint32_t> c) {
    ++class_totals[cls];
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const auto& id = candidates[i];
      const std::uint32_t o = c[m.slot_index(id)];
      if (o != m.outcomes.vars[id.var].missing_index()) prime[i].add(cls, o);
    }
  });

  std::vector<MIScore> scores;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double mi = prime[i].total() == 0 ? 0.0 : mutual_information(prime[i]);
    scores.push_back({node_name(m.outcomes, candidates[i]), mi, i});
  }
  // Every candidate stays in the report, ranked, including zero scores.
  std::stable_sort(scores.begin(), scores.end(),
                   [](const MIScore& a, const MIScore& b) {
                     if (a.value != b.value) return a.value > b.value;
                     return a.order < b.order;
                   });
  m.field_scores = scores;
  const auto selected = select_by_cumulative(scores, schema.t_prime);
  for (const auto& s : selected) {
    FieldNode node;
    node.id = candidates[s.order];
    node.name = s.subject;
    node.mi = s.value;
    m.nodes.push_back(std::move(node));
  }

  if (schema.positive_class) {
    m.positive = m.class_by_name(*schema.positive_class);
  } else {
    std::uint32_t pos = 0;
    for (std::uint32_t c = 1; c < k; ++c)
      if (class_totals[c] <= class_totals[pos]) pos = c;
    m.positive = pos;
  }

  // Pass 3: class x field x field counts over selected pairs.
  const std::size_t ns = m.nodes.size();
  auto observable = [&](std::size_t n) {
    return m.outcomes.vars[m.nodes[n].id.var].observable();
  };
  auto missing = [&](std::size_t n) {
    return m.outcomes.vars[m.nodes[n].id.var].missing_index();
  };
  struct PairPlan {
    std::size_t a, b;
    JointCounts counts;
  };
  std::vector<PairPlan> pairs;
  std::uint64_t planned = 0;
  for (std::size_t a = 0; a < ns; ++a)
    for (std::size_t b = a + 1; b < ns; ++b) {
      const std::uint64_t cells =
          checked_mul(checked_mul(k, observable(a)), observable(b));
      planned = planned > std::numeric_limits<std::uint64_t>::max() - cells
                    ? std::numeric_limits<std::uint64_t>::max()
                    : planned + cells;
      if (planned > schema.max_model_cells)
        throw Error(ErrorKind::kSize,
                    "pair (" + m.nodes[a].name + ", " + m.nodes[b].name +
                        ") pushes the dependency counts past max_model_cells=" +
                        std::to_string(schema.max_model_cells));
      pairs.push_back({a, b, JointCounts({k, observable(a), observable(b)})});
    }
  std::vector<std::size_t> slot_of(ns);
  std::vector<std::uint32_t> miss_of(ns);
  for (std::size_t n = 0; n < ns; ++n) {
    slot_of[n] = m.slot_index(m.nodes[n].id);
    miss_of[n] = missing(n);
  }
  std::vector<std::uint32_t> vals(ns);
  pass_cases(dataset, m, [&](std::uint32_t cls, std::span<const std::uint32_t> c) {
    for (std::size_t n = 0; n < ns; ++n) vals[n] = c[slot_of[n]];
    for (auto& p : pairs) {
      if (vals[p.a] == miss_of[p.a] || vals[p.b] == miss_of[p.b]) continue;
      p.counts.add(cls, vals[p.a], vals[p.b]);
    }
  });
  for (const auto& p : pairs) {
    const double cmi = p.counts.total() == 0
                           ? 0.0
                           : conditional_mutual_information(p.counts);
    m.pair_scores.push_back({p.a, p.b, cmi});
  }
  std::stable_sort(m.pair_scores.begin(), m.pair_scores.end(),
                   [](const PairScore& x, const PairScore& y) {
                     if (x.cmi != y.cmi) return x.cmi > y.cmi;
                     if (x.first != y.first) return x.first < y.first;
                     return x.second < y.second;
                   });
  m.dependencies =
      select_dependencies(m.pair_scores, schema.t_field, schema.max_parents);
  for (const auto& d : m.dependencies) m.nodes[d.child].parents.push_back(d.parent);
  for (auto& n : m.nodes) std::sort(n.parents.begin(), n.parents.end());

  // Pass 4: parameter estimation.
  std::vector<NodeCounts> counts(ns);
  std::uint64_t cells = 0;
  for (std::size_t n = 0; n < ns; ++n) {
    auto& nc = counts[n];
    nc.classes = k;
    nc.outcomes = observable(n);
    nc.configs = 1;
    for (auto p : m.nodes[n].parents)
      nc.configs = checked_mul(nc.configs, observable(p));
    const std::uint64_t node_cells =
        checked_mul(checked_mul(k, nc.configs), nc.outcomes);
    cells = cells > std::numeric_limits<std::uint64_t>::max() - node_cells
                ? std::numeric_limits<std::uint64_t>::max()
                : cells + node_cells;
    if (cells > schema.max_model_cells)
      throw Error(ErrorKind::kSize, "conditional table of '" + m.nodes[n].name +
                                        "' pushes the model past max_model_cells=" +
                                        std::to_string(schema.max_model_cells));
    nc.cpt.assign(node_cells, 0);
    nc.fallback.assign(k * nc.outcomes, 0);
  }
  std::vector<std::uint64_t> class_counts(k, 0);
  pass_cases(dataset, m, [&](std::uint32_t cls, std::span<const std::uint32_t> c) {
    ++class_counts[cls];
    for (std::size_t n = 0; n < ns; ++n) {
      const std::uint32_t x = c[slot_of[n]];
      if (x == miss_of[n]) continue;
      auto& nc = counts[n];
      ++nc.fallback[cls * nc.outcomes + x];
      std::size_t config = 0;
      bool complete = true;
      for (auto p : m.nodes[n].parents) {
        const std::uint32_t pv = c[slot_of[p]];
        if (pv == miss_of[p]) {
          complete = false;
          break;
        }
        config = config * observable(p) + pv;
      }
      if (complete) ++nc.cpt[(cls * nc.configs + config) * nc.outcomes + x];
    }
  });

  auto tables = estimate_cpts(counts, class_counts, schema.smoothing);
  m.class_counts = std::move(class_counts);
  m.prior = std::move(tables.prior);
  for (std::size_t n = 0; n < ns; ++n) {
    m.nodes[n].cpt = std::move(tables.cpts[n]);
    m.nodes[n].fallback = std::move(tables.fallbacks[n]);
  }
  m.training = dataset.stats();
  return m;
}

}  // namespace apri
