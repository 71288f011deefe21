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
#include <span>
#include <string>
#include <vector>

namespace apri {

/// Dense contingency table over 2 or 3 discrete dimensions, row-major with the
/// first dimension slowest. For training the first dimension is the class.
class JointCounts {
 public:
  JointCounts() = default;
  explicit JointCounts(std::vector<std::size_t> dims);

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::span<const std::uint64_t> cells() const { return cells_; }
  std::uint64_t total() const { return total_; }

  void add(std::size_t a, std::size_t b) { add_n(a, b, 1); }
  void add(std::size_t a, std::size_t b, std::size_t c) {
    cells_[(a * dims_[1] + b) * dims_[2] + c] += 1;
    total_ += 1;
  }
  void add_n(std::size_t a, std::size_t b, std::uint64_t n) {
    cells_[a * dims_[1] + b] += n;
    total_ += n;
  }
  std::uint64_t at(std::size_t a, std::size_t b) const {
    return cells_[a * dims_[1] + b];
  }
  std::uint64_t at(std::size_t a, std::size_t b, std::size_t c) const {
    return cells_[(a * dims_[1] + b) * dims_[2] + c];
  }

  /// Builds a table from explicit cell counts.
  static JointCounts from_cells(std::vector<std::size_t> dims,
                                std::vector<std::uint64_t> cells);
  /// Swaps the two dimensions of a 2-way table.
  JointCounts transposed() const;
  /// Associative merge of two tables with identical shape.
  void merge(const JointCounts& other);

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::uint64_t> cells_;
  std::uint64_t total_ = 0;
};

/// Shannon entropy in bits of a probability vector. Throws on negative
/// entries or when the sum is off by more than 1e-9.
double entropy(std::span<const double> dist);

/// Mutual information in bits of a 2-way table, from empirical frequencies.
double mutual_information(const JointCounts& joint);

/// I(B; C | A) in bits of a 3-way table whose first dimension is A.
double conditional_mutual_information(const JointCounts& joint);

struct MIScore {
  std::string subject;
  double value = 0.0;
  std::size_t order = 0;  // declaration order, used to break ties
};

/// Sorts by descending value (ties by order) and returns the shortest prefix
/// whose cumulative share of the total reaches threshold. Zero scores are
/// never selected.
std::vector<MIScore> select_by_cumulative(std::vector<MIScore> scores,
                                          double threshold);

/// Cumulative-share test shared by field and dependency selection. A
/// relative slack of 1e-12 absorbs floating accumulation error.
inline bool reached_share(double cumulative, double total, double threshold) {
  return cumulative >= threshold * total * (1.0 - 1e-12);
}

}  // namespace apri
