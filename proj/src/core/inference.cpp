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

#include "apri/inference.hpp"

#include <charconv>
#include <cmath>

#include "apri/error.hpp"
#include "apri/schema_io.hpp"

namespace apri {

std::string_view to_string(SkipReason reason) {
  switch (reason) {
    case SkipReason::kMissing:
      return "missing";
    case SkipReason::kPruned:
      return "pruned";
    case SkipReason::kUnseenConfig:
      return "unseen-config";
  }
  return "?";
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

ClassPosterior posterior(const NetworkModel& model, const CaseRecord& c) {
  const std::size_t nv = model.variables();
  if (c.outcomes.size() != nv * model.window())
    throw Error(ErrorKind::kData, "case has " + std::to_string(c.outcomes.size()) +
                                      " slots, model expects " +
                                      std::to_string(nv * model.window()));
  for (std::size_t i = 0; i < c.outcomes.size(); ++i) {
    const auto& var = model.outcomes.vars[i % nv];
    if (c.outcomes[i] > var.missing_index())
      throw Error(ErrorKind::kData, "outcome index " + std::to_string(c.outcomes[i]) +
                                        " is not in the alphabet of variable '" +
                                        var.name + "'");
  }

  ClassPosterior post;
  post.probs = model.prior;
  const std::size_t k = post.probs.size();
  std::vector<double> next(k);

  for (const auto& node : model.nodes) {
    const auto& var = model.outcomes.vars[node.id.var];
    const std::uint32_t x = c.outcomes[model.slot_index(node.id)];
    if (x == var.missing_index()) {
      post.skipped.push_back({node.name, SkipReason::kMissing});
      continue;
    }
    const Cpt* table = &node.cpt;
    std::size_t config = 0;
    for (auto p : node.parents) {
      const auto& pn = model.nodes[p];
      const auto& pv = model.outcomes.vars[pn.id.var];
      const std::uint32_t v = c.outcomes[model.slot_index(pn.id)];
      if (v == pv.missing_index()) {
        table = &node.fallback;
        config = 0;
        break;
      }
      config = config * pv.observable() + v;
    }
    bool unseen = false;
    for (std::size_t cls = 0; cls < k && !unseen; ++cls)
      unseen = table->is_unseen(cls, config);
    if (unseen) {
      post.skipped.push_back({node.name, SkipReason::kUnseenConfig});
      continue;
    }

    double sum = 0.0;
    for (std::size_t cls = 0; cls < k; ++cls) {
      next[cls] = post.probs[cls] * table->row(cls, config)[x];
      sum += next[cls];
    }
    bool degenerate = !(sum > 0.0) || !std::isfinite(sum);
    if (!degenerate) {
      for (std::size_t cls = 0; cls < k; ++cls) {
        next[cls] /= sum;
        if (next[cls] == 0.0 || next[cls] == 1.0) degenerate = true;
      }
    }
    if (degenerate) {
      post.skipped.push_back({node.name, SkipReason::kPruned});
      continue;
    }
    post.probs.swap(next);
    post.order.push_back(node.name);
  }
  return post;
}

std::uint32_t decide_label(std::span<const double> probs, double threshold,
                           std::uint32_t positive) {
  if (probs[positive] >= threshold) return positive;
  std::optional<std::uint32_t> best;
  for (std::uint32_t cls = 0; cls < probs.size(); ++cls)
    if (cls != positive && (!best || probs[cls] > probs[*best])) best = cls;
  return *best;
}

Classification classify(const NetworkModel& model, const CaseRecord& c,
                        double threshold, std::uint32_t positive) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw Error(ErrorKind::kInvalidArgument, "threshold must lie in [0,1]");
  if (positive >= model.outcomes.classes.size())
    throw Error(ErrorKind::kInvalidArgument, "positive class index out of range");
  Classification out;
  out.posterior = posterior(model, c);
  out.label = decide_label(out.posterior.probs, threshold, positive);
  return out;
}

Classification classify(const NetworkModel& model, const CaseRecord& c,
                        double threshold) {
  return classify(model, c, threshold, model.positive);
}

CaseRecord make_case(
    const NetworkModel& model,
    const std::vector<std::pair<std::string, std::string>>& values) {
  const std::size_t nv = model.variables();
  CaseRecord c;
  c.outcomes.resize(nv * model.window());
  for (std::size_t i = 0; i < c.outcomes.size(); ++i)
    c.outcomes[i] = model.outcomes.vars[i % nv].missing_index();
  for (const auto& [name, raw] : values) {
    std::string_view var = name;
    std::uint32_t slot = 0;
    if (auto at = var.rfind('@'); at != std::string_view::npos) {
      auto digits = var.substr(at + 1);
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), slot);
      if (ec != std::errc() || p != digits.data() + digits.size())
        throw Error(ErrorKind::kData, "bad window slot in '" + name + "'");
      var = var.substr(0, at);
    }
    const int vi = model.schema.field_index(var);
    if (vi < 0) throw Error(ErrorKind::kData, "unknown variable '" + std::string(var) + "'");
    if (slot >= model.window())
      throw Error(ErrorKind::kData, "window slot out of range in '" + name + "'");
    c.outcomes[slot * nv + static_cast<std::size_t>(vi)] =
        model.outcomes.vars[static_cast<std::size_t>(vi)].encode_text(raw);
  }
  return c;
}

PassStats score_dataset(
    const NetworkModel& model, Dataset& dataset,
    const std::function<void(const CaseRecord&, const ClassPosterior&)>& fn) {
  WindowState window(model.schema.window, model.variables(), model.outcomes);
  std::vector<std::uint32_t> current;
  CaseRecord c;
  return iterate_pass(dataset, [&](const RecordView& r) {
    encode_record(r, model.outcomes, current);
    window.push(r.group, current, c.outcomes);
    c.id = r.ordinal;
    c.group = std::string(r.group);
    c.actual_class = model.outcomes.class_index(r.class_value);
    fn(c, posterior(model, c));
  });
}

ClassifySummary write_classifications(const NetworkModel& model,
                                      Dataset& dataset, double threshold,
                                      std::uint32_t positive, std::ostream& out) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw Error(ErrorKind::kInvalidArgument, "threshold must lie in [0,1]");
  const auto& classes = model.outcomes.classes;
  out << "record_id";
  for (const auto& cls : classes) out << ',' << csv_escape("P(" + cls + ")");
  out << ",label,skipped_nodes\n";

  ClassifySummary summary;
  std::string skipped;
  auto stats = score_dataset(model, dataset, [&](const CaseRecord& c,
                                                 const ClassPosterior& p) {
    const std::uint32_t label = decide_label(p.probs, threshold, positive);
    ++summary.records;
    if (label == positive) ++summary.positives;
    out << c.id;
    for (double v : p.probs) out << ',' << format_double(v);
    skipped.clear();
    for (const auto& s : p.skipped) {
      if (!skipped.empty()) skipped.push_back(';');
      skipped += s.node;
      skipped.push_back(':');
      skipped += to_string(s.reason);
    }
    out << ',' << csv_escape(classes[label]) << ',' << csv_escape(skipped) << '\n';
  });
  summary.rejected = stats.rejected;
  return summary;
}

}  // namespace apri
