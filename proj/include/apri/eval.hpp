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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace apri {

struct NetworkModel;
class Dataset;

struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::uint64_t positives() const { return tp + fn; }
  std::uint64_t negatives() const { return fp + tn; }
  std::uint64_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Counts over paired labels. Every label must be in known (which must
/// contain positive); any known label other than positive is negative.
ConfusionCounts confusion(std::span<const std::string> predictions,
                          std::span<const std::string> actuals,
                          std::string_view positive,
                          std::span<const std::string> known);
/// Binary convenience form.
ConfusionCounts confusion(std::span<const std::string> predictions,
                          std::span<const std::string> actuals,
                          std::string_view positive, std::string_view negative);

/// One threshold-indexed evaluation record.
struct FCVRow {
  std::optional<double> threshold;
  double f_pct = 0.0;   // 100 FP / N, rounded half-up to 2 decimals
  double c_pct = 0.0;   // 100 TP / P, rounded half-up to 2 decimals
  std::string f_text;   // "2.85"
  std::string c_text;   // "21.10"
  std::string volume;   // "1.0:1"
  ConfusionCounts counts;
  double accuracy = 0.0;
};

/// Percentage num/den to two decimals, rounded half-up in exact integer
/// arithmetic ("21.10").
std::string percent_text(std::uint64_t num, std::uint64_t den);
/// FP:TP volume ratio normalised to ":1" with one decimal, half-up.
std::string volume_ratio(std::uint64_t fp, std::uint64_t tp);

/// Throws Error(kData) when there are no actual positives or negatives.
FCVRow fcv(const ConfusionCounts& counts, std::optional<double> threshold);

/// a, a+step, ..., b (inclusive within 1e-9), each rounded to 1e-9.
std::vector<double> make_grid(double from, double to, double step);
/// Parses "a:b:step".
std::vector<double> parse_grid(std::string_view text);
/// 0.10, 0.15, ..., 0.90.
std::vector<double> default_grid();

struct ScoredRecord {
  double positive_prob = 0.0;
  bool actual_positive = false;
};

/// One row per threshold using the >= rule. Grid values must lie in (0,1)
/// and increase strictly.
std::vector<FCVRow> sweep(std::span<const ScoredRecord> scored,
                          std::span<const double> grid);

struct ReportMeta {
  std::string model;
  std::string dataset;
  std::string predictions;
  std::string positive;
  std::vector<double> grid;
};

std::string report_json(const ReportMeta& meta, std::span<const FCVRow> rows);
/// threshold,F_pct,C_pct,V,TP,FP,TN,FN,accuracy
void write_rows_csv(std::span<const FCVRow> rows, std::ostream& out);

struct EvaluateOptions {
  std::string positive;
  std::optional<std::string> class_column;  // auto-detected when absent
  std::optional<double> threshold;          // recorded, not applied
};

struct Evaluation {
  FCVRow row;
  std::string class_column;
  std::uint64_t unlabeled = 0;  // records whose actual class is MISSING
};

/// Compares a classification CSV against the class column of a data file,
/// matching record_id to the data row number.
Evaluation evaluate_files(const std::filesystem::path& predictions,
                          const std::filesystem::path& data,
                          const EvaluateOptions& options);

struct SweepResult {
  std::vector<FCVRow> rows;
  std::uint64_t records = 0;
  std::uint64_t unlabeled = 0;
};

/// Scores a dataset with a model and sweeps the threshold grid.
SweepResult sweep_dataset(const NetworkModel& model, Dataset& dataset,
                          std::span<const double> grid, std::uint32_t positive);

}  // namespace apri
