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

#include "apri/infometrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "apri/error.hpp"

namespace apri {

JointCounts::JointCounts(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.size() != 2 && dims_.size() != 3)
    throw Error(ErrorKind::kInvalidArgument, "joint counts must be 2- or 3-way");
  std::size_t n = 1;
  for (auto d : dims_) n *= d;
  cells_.assign(n, 0);
}

JointCounts JointCounts::from_cells(std::vector<std::size_t> dims,
                                    std::vector<std::uint64_t> cells) {
  JointCounts j(std::move(dims));
  if (cells.size() != j.cells_.size())
    throw Error(ErrorKind::kInvalidArgument, "cell count does not match dims");
  j.cells_ = std::move(cells);
  j.total_ = std::accumulate(j.cells_.begin(), j.cells_.end(), std::uint64_t{0});
  return j;
}

JointCounts JointCounts::transposed() const {
  if (dims_.size() != 2)
    throw Error(ErrorKind::kInvalidArgument, "transpose needs a 2-way table");
  JointCounts t({dims_[1], dims_[0]});
  for (std::size_t a = 0; a < dims_[0]; ++a)
    for (std::size_t b = 0; b < dims_[1]; ++b) t.add_n(b, a, at(a, b));
  return t;
}

void JointCounts::merge(const JointCounts& other) {
  if (other.dims_ != dims_)
    throw Error(ErrorKind::kInvalidArgument, "merging tables of different shape");
  for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] += other.cells_[i];
  total_ += other.total_;
}

double entropy(std::span<const double> dist) {
  double sum = 0.0;
  for (double p : dist) {
    if (!(p >= 0.0))
      throw Error(ErrorKind::kInvalidArgument, "negative probability");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw Error(ErrorKind::kInvalidArgument, "probabilities do not sum to 1");
  double h = 0.0;
  for (double p : dist)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

namespace {

// MI of a rows x cols block starting at cells[offset], total n.
double block_mi(std::span<const std::uint64_t> cells, std::size_t rows,
                std::size_t cols, std::uint64_t n) {
  if (n == 0) return 0.0;
  std::vector<std::uint64_t> row_sum(rows, 0), col_sum(cols, 0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      row_sum[r] += cells[r * cols + c];
      col_sum[c] += cells[r * cols + c];
    }
  const double nd = static_cast<double>(n);
  double mi = 0.0;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const std::uint64_t k = cells[r * cols + c];
      if (k == 0) continue;
      const double pxy = static_cast<double>(k) / nd;
      // p(x,y) / (p(x) p(y)) = k n / (r c)
      const double ratio = static_cast<double>(k) * nd /
                           (static_cast<double>(row_sum[r]) *
                            static_cast<double>(col_sum[c]));
      mi += pxy * std::log2(ratio);
    }
  return std::max(mi, 0.0);
}

}  // namespace

double mutual_information(const JointCounts& joint) {
  if (joint.dims().size() != 2)
    throw Error(ErrorKind::kInvalidArgument, "mutual information needs a 2-way table");
  if (joint.total() == 0)
    throw Error(ErrorKind::kInvalidArgument, "mutual information of an empty table");
  return block_mi(joint.cells(), joint.dims()[0], joint.dims()[1], joint.total());
}

double conditional_mutual_information(const JointCounts& joint) {
  if (joint.dims().size() != 3)
    throw Error(ErrorKind::kInvalidArgument,
                "conditional mutual information needs a 3-way table");
  if (joint.total() == 0)
    throw Error(ErrorKind::kInvalidArgument,
                "conditional mutual information of an empty table");
  const auto& d = joint.dims();
  const std::size_t slice = d[1] * d[2];
  const double n = static_cast<double>(joint.total());
  double cmi = 0.0;
  for (std::size_t a = 0; a < d[0]; ++a) {
    auto cells = joint.cells().subspan(a * slice, slice);
    const std::uint64_t na =
        std::accumulate(cells.begin(), cells.end(), std::uint64_t{0});
    if (na == 0) continue;
    cmi += (static_cast<double>(na) / n) * block_mi(cells, d[1], d[2], na);
  }
  return cmi;
}

std::vector<MIScore> select_by_cumulative(std::vector<MIScore> scores,
                                          double threshold) {
  std::stable_sort(scores.begin(), scores.end(),
                   [](const MIScore& a, const MIScore& b) {
                     if (a.value != b.value) return a.value > b.value;
                     return a.order < b.order;
                   });
  double total = 0.0;
  for (const auto& s : scores) total += std::max(s.value, 0.0);
  std::vector<MIScore> picked;
  if (total <= 0.0) return picked;
  double cumulative = 0.0;
  for (const auto& s : scores) {
    if (s.value <= 0.0) break;
    picked.push_back(s);
    cumulative += s.value;
    if (reached_share(cumulative, total, threshold)) break;
  }
  return picked;
}

}  // namespace apri
