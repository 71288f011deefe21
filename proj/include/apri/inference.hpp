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
#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "apri/structure.hpp"
#include "apri/window.hpp"

namespace apri {

enum class SkipReason { kMissing, kPruned, kUnseenConfig };

std::string_view to_string(SkipReason reason);

struct SkippedNode {
  std::string node;
  SkipReason reason;
  bool operator==(const SkippedNode&) const = default;
};

struct ClassPosterior {
  std::vector<double> probs;           // per class, sums to 1
  std::vector<SkippedNode> skipped;
  std::vector<std::string> order;      // nodes whose evidence was applied
};

/// Bayes rule over the ranked nodes, starting from the prior. A node is
/// skipped when its value is MISSING, when its parent configuration has no
/// training data, or when its factor would force some class to exactly 0 or
/// 1 (pruning). A MISSING field parent selects the class-only fallback table.
ClassPosterior posterior(const NetworkModel& model, const CaseRecord& c);

struct Classification {
  std::uint32_t label = 0;
  ClassPosterior posterior;
};

/// Positive iff P(positive) >= threshold; otherwise the most probable other
/// class (lowest index on ties).
std::uint32_t decide_label(std::span<const double> probs, double threshold,
                           std::uint32_t positive);

Classification classify(const NetworkModel& model, const CaseRecord& c,
                        double threshold, std::uint32_t positive);
Classification classify(const NetworkModel& model, const CaseRecord& c,
                        double threshold);

/// Builds a case from (node name, raw value) pairs; node names are "var" or
/// "var@slot". Absent nodes are MISSING.
CaseRecord make_case(
    const NetworkModel& model,
    const std::vector<std::pair<std::string, std::string>>& values);

/// One pass over a dataset, building windowed cases and their posteriors.
PassStats score_dataset(
    const NetworkModel& model, Dataset& dataset,
    const std::function<void(const CaseRecord&, const ClassPosterior&)>& fn);

struct ClassifySummary {
  std::uint64_t records = 0;
  std::uint64_t positives = 0;
  std::uint64_t rejected = 0;
};

/// Writes the classification CSV:
///   record_id,P(<class>)...,label,skipped_nodes
/// record_id is the 1-based data row number (malformed rows keep their
/// numbers but produce no output line).
ClassifySummary write_classifications(const NetworkModel& model,
                                      Dataset& dataset, double threshold,
                                      std::uint32_t positive, std::ostream& out);

/// Shortest round-trip text for a double.
std::string format_double(double v);

}  // namespace apri
