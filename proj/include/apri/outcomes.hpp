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
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "apri/schema_io.hpp"

namespace apri {

/// Strictly increasing cut points e_1 < ... < e_{k-1}; bin j covers
/// [e_j, e_{j+1}) with e_0 = -inf and e_k = +inf.
struct BinEdges {
  std::vector<double> cuts;

  std::size_t bins() const { return cuts.size() + 1; }
  bool operator==(const BinEdges&) const = default;
};

/// Maps a value to its bin. NaN is MISSING and yields nullopt.
std::optional<std::size_t> discretize(double value, const BinEdges& edges);

struct LabeledValue {
  double value;
  std::uint32_t label;
};

/// Supervised discretization: greedy recursive binary splitting on class
/// information gain. The bin with the largest remaining entropy mass
/// (count * entropy) that still has a positive-gain cut is split next; ties go
/// to the leftmost bin and the leftmost cut.
BinEdges entropy_bins(std::span<const LabeledValue> samples, int max_bins);

/// Equal-frequency cut points (midpoints between neighbouring distinct values).
BinEdges quantile_bins(std::span<const LabeledValue> samples, int max_bins);

/// Bounded uniform sample of a stream (algorithm R). Deterministic for a
/// given seed and input order.
class ReservoirSample {
 public:
  ReservoirSample(std::size_t capacity, std::uint64_t seed);

  void offer(double value, std::uint32_t label);

  std::span<const LabeledValue> retained() const { return retained_; }
  std::vector<LabeledValue>& mutable_retained() { return retained_; }
  std::uint64_t seen() const { return seen_; }
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  std::uint64_t seen_ = 0;
  std::mt19937_64 rng_;
  std::vector<LabeledValue> retained_;
};

/// Outcome alphabet of one field variable. The last symbol is always the
/// MISSING token; indices below it are observable outcomes.
struct VariableOutcomes {
  std::string name;
  VarKind kind = VarKind::kCategorical;
  std::vector<std::string> symbols;
  BinEdges edges;  // continuous only

  std::size_t observable() const { return symbols.size() - 1; }
  std::uint32_t missing_index() const {
    return static_cast<std::uint32_t>(symbols.size() - 1);
  }
  bool continuous() const { return kind == VarKind::kContinuous; }

  /// Rebuilds the symbol lookup; call after editing symbols.
  void build_index();
  /// Observable outcome for a raw cell (numeric already parsed for
  /// continuous variables, NaN when missing). Throws Error(kData) naming the
  /// variable when a categorical value is not in the alphabet.
  std::uint32_t encode(std::string_view raw, double numeric) const;
  /// Same, parsing continuous values from text.
  std::uint32_t encode_text(std::string_view raw) const;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>> index_;
};

struct OutcomeTable {
  std::vector<std::string> classes;  // sorted; MISSING is not a class
  std::vector<VariableOutcomes> vars;

  /// Class index for a label, nullopt for MISSING; throws for unknown labels.
  std::optional<std::uint32_t> class_index(std::string_view label) const;
};

/// Interval label used as the symbol of a continuous bin.
std::string bin_symbol(const BinEdges& edges, std::size_t bin);

/// Training pass 1: alphabets for categorical variables, class-labelled
/// reservoirs and bin edges for continuous ones. Consumes exactly one pass.
OutcomeTable collect_outcomes(const Schema& schema, Dataset& dataset);

}  // namespace apri
