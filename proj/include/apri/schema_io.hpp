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
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace apri {

/// Token used for a missing cell in data files and for the MISSING outcome.
inline constexpr std::string_view kMissingToken = "?";

enum class VarKind { kCategorical, kContinuous };
enum class Discretizer { kNone, kEntropy, kQuantile };

struct VariableSpec {
  std::string name;
  VarKind kind = VarKind::kCategorical;
  Discretizer discretizer = Discretizer::kNone;  // set iff kind is continuous

  bool continuous() const { return kind == VarKind::kContinuous; }
};

struct Schema {
  std::string class_var;
  std::vector<VariableSpec> field_vars;
  double t_prime = 0.95;
  double t_field = 0.35;
  int window = 1;
  std::optional<std::string> group_key;
  int max_parents = 1;
  int max_bins = 16;
  double smoothing = 0.0;
  std::uint64_t max_model_cells = 10'000'000;
  // Extensions beyond the core directive set.
  std::optional<std::string> positive_class;
  std::uint64_t seed = 20260101;
  std::size_t reservoir_capacity = 100'000;
  std::size_t max_outcomes = 10'000;

  /// Index of a field variable by name, or -1.
  int field_index(std::string_view name) const;
};

/// Parses the line-oriented schema format. Throws Error(kParse) naming the
/// offending line.
Schema parse_schema(std::string_view text);
Schema load_schema(const std::filesystem::path& path);
/// Renders a schema back into the text format; parse_schema(format_schema(s))
/// reproduces s.
std::string format_schema(const Schema& schema);

struct PassStats {
  std::uint64_t passes = 0;
  std::uint64_t rows = 0;        // well-formed records in the last pass
  std::uint64_t rejected = 0;    // malformed rows in the last pass
  std::uint64_t nan_missing = 0; // NaN numerics read as MISSING, last pass
};

/// One well-formed record as seen by a pass visitor. Views are valid only for
/// the duration of the callback.
struct RecordView {
  std::uint64_t ordinal = 0;                  // 1-based data row, rejects included
  std::span<const std::string_view> fields;   // per schema field var
  std::span<const double> numeric;            // parsed value, NaN if missing
  std::string_view class_value;
  std::string_view group;                     // empty when no group key

  bool missing(std::size_t i) const { return fields[i] == kMissingToken; }
  bool class_missing() const { return class_value == kMissingToken; }
};

/// Splits one CSV record (RFC-4180 quoting). Returns false on a quoting error.
bool split_csv_record(std::string_view line, std::vector<std::string>& out);
/// Quotes a field if it contains a delimiter, quote or newline.
std::string csv_escape(std::string_view field);

/// A re-readable CSV source. Each call to for_each_row starts from the top.
class CsvSource {
 public:
  static CsvSource from_file(std::filesystem::path path);
  static CsvSource from_text(std::string text);

  const std::vector<std::string>& header() const { return header_; }
  const std::string& name() const { return name_; }

  /// Visits every data row (header excluded). Rows with broken quoting are
  /// delivered with ok=false.
  void for_each_row(
      const std::function<void(std::span<const std::string> cells, bool ok)>&
          fn) const;

 private:
  CsvSource() = default;
  std::unique_ptr<std::istream> open() const;

  std::optional<std::filesystem::path> path_;
  std::shared_ptr<const std::string> text_;
  std::string name_;
  std::vector<std::string> header_;
};

/// A CSV source bound to a schema, counting complete passes.
class Dataset {
 public:
  Dataset(CsvSource source, const Schema& schema);

  const PassStats& stats() const { return stats_; }
  const CsvSource& source() const { return source_; }

 private:
  friend PassStats iterate_pass(Dataset&,
                                const std::function<void(const RecordView&)>&);
  CsvSource source_;
  Schema schema_;
  std::vector<std::size_t> field_cols_;
  std::size_t class_col_ = 0;
  std::optional<std::size_t> group_col_;
  PassStats stats_;
};

/// Streams every well-formed record once, in file order. Rows of the wrong
/// arity or with unparseable continuous cells are counted and skipped.
PassStats iterate_pass(Dataset& dataset,
                       const std::function<void(const RecordView&)>& visitor);

}  // namespace apri
