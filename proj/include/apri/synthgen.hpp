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
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "apri/schema_io.hpp"

namespace apri {

enum class GenKind {
  kCategorical,      // outcome distribution per class
  kContinuous,       // normal per class
  kDependent,        // distribution per (class, parent outcome)
  kNoise,            // class-independent categorical
  kNoiseContinuous,  // class-independent normal
};

struct GenVariable {
  std::string name;
  GenKind kind = GenKind::kCategorical;
  std::vector<std::string> outcomes;
  std::vector<std::vector<double>> dist;               // [class][outcome]; noise: [0][outcome]
  std::string parent;                                  // dependent only
  std::vector<std::vector<std::vector<double>>> cond;  // [class][parent outcome][outcome]
  std::vector<double> mean, sd;                        // per class; noise: one entry
  double missing = 0.0;
  Discretizer discretizer = Discretizer::kEntropy;

  bool continuous() const {
    return kind == GenKind::kContinuous || kind == GenKind::kNoiseContinuous;
  }
};

/// Generator configuration. The same document describes the ground truth.
///
///   {"n": 50000, "seed": 7, "class": "class", "classes": ["good", "bad"],
///    "prior": 0.1,                      // P(second class)
///    "group": {"name": "cust", "length": 4},
///    "schema": {"t_prime": 0.95, "max_bins": 8, ...},
///    "variables": [
///      {"name": "a", "type": "categorical", "outcomes": ["x", "y"],
///       "dist": {"good": [0.7, 0.3], "bad": [0.2, 0.8]}, "missing": 0.05},
///      {"name": "b", "type": "continuous",
///       "mean": {"good": 0, "bad": 1}, "sd": {"good": 1, "bad": 1}},
///      {"name": "c", "type": "dependent", "parent": "a", "outcomes": ["u", "v"],
///       "dist": {"good": [[0.9, 0.1], [0.1, 0.9]], "bad": [[...], [...]]}},
///      {"name": "n1", "type": "noise", "outcomes": ["p", "q"], "dist": [0.5, 0.5]},
///      {"name": "n2", "type": "noise", "mean": 0, "sd": 1}]}
struct GenConfig {
  std::uint64_t n = 0;
  std::uint64_t seed = 1;
  std::string class_name = "class";
  std::vector<std::string> classes{"good", "bad"};
  double prior = 0.1;
  std::vector<GenVariable> variables;
  std::optional<std::string> group_name;
  std::size_t group_length = 1;
  Schema schema;  // schema written next to the data; field_vars mirror variables
};

/// Parses and validates a configuration (also accepts a truth document).
/// Throws Error(kInvalidArgument) for an unnormalised distribution.
GenConfig parse_gen_config(std::string_view json);
GenConfig load_gen_config(const std::filesystem::path& path);

/// The exact generative network behind a dataset.
struct TruthModel {
  GenConfig config;

  std::vector<double> class_prior() const { return {1.0 - config.prior, config.prior}; }
};

std::string truth_to_json(const TruthModel& truth);

struct GenerationSummary {
  std::uint64_t rows = 0;
  std::uint64_t positives = 0;  // records of the second class
};

/// Ancestral sampling into CSV. Byte-identical output for identical configs.
GenerationSummary generate(const GenConfig& config, std::ostream& csv);

/// Writes data.csv, schema.txt and truth.json into dir.
GenerationSummary generate_to_dir(const GenConfig& config,
                                  const std::filesystem::path& dir);

/// Exact class posterior under the truth, aligned with config.classes.
/// Values are raw cells keyed by variable name; absent or "?" is missing.
std::vector<double> analytic_posterior(
    const TruthModel& truth,
    const std::vector<std::pair<std::string, std::string>>& record);

}  // namespace apri
