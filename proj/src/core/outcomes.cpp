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

#include "apri/outcomes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "apri/error.hpp"

namespace apri {
namespace {

constexpr double kGainEps = 1e-12;

std::string shortest(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "+inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

double entropy_of(std::span<const std::uint64_t> counts, std::uint64_t n) {
  if (n == 0) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / static_cast<double>(n);
    h -= p * std::log2(p);
  }
  return h;
}

struct Cut {
  std::size_t pos = 0;  // first index of the right child
  double gain = 0.0;
};

// Best information-gain cut inside sorted[lo, hi).
std::optional<Cut> best_cut(std::span<const LabeledValue> sorted, std::size_t lo,
                            std::size_t hi, std::size_t k) {
  std::vector<std::uint64_t> total(k, 0), left(k, 0), right(k);
  for (std::size_t i = lo; i < hi; ++i) ++total[sorted[i].label];
  const std::uint64_t n = hi - lo;
  const double h = entropy_of(total, n);
  std::optional<Cut> best;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    ++left[sorted[i - 1].label];
    if (!(sorted[i - 1].value < sorted[i].value)) continue;
    for (std::size_t c = 0; c < k; ++c) right[c] = total[c] - left[c];
    const std::uint64_t nl = i - lo, nr = hi - i;
    const double cond = (static_cast<double>(nl) * entropy_of(left, nl) +
                         static_cast<double>(nr) * entropy_of(right, nr)) /
                        static_cast<double>(n);
    const double gain = h - cond;
    if (!best || gain > best->gain) best = Cut{i, gain};
  }
  return best;
}

double midpoint(double a, double b) {
  double m = a + (b - a) / 2.0;
  if (!(m > a) || m > b) m = b;
  return m;
}

std::vector<LabeledValue> sorted_copy(std::span<const LabeledValue> samples) {
  std::vector<LabeledValue> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end(), [](const LabeledValue& a, const LabeledValue& b) {
    return a.value < b.value || (a.value == b.value && a.label < b.label);
  });
  return s;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::optional<std::size_t> discretize(double value, const BinEdges& edges) {
  if (std::isnan(value)) return std::nullopt;
  return static_cast<std::size_t>(
      std::upper_bound(edges.cuts.begin(), edges.cuts.end(), value) -
      edges.cuts.begin());
}

BinEdges entropy_bins(std::span<const LabeledValue> samples, int max_bins) {
  BinEdges out;
  if (samples.empty() || max_bins <= 1) return out;
  const auto sorted = sorted_copy(samples);
  std::size_t k = 0;
  for (const auto& s : sorted) k = std::max<std::size_t>(k, s.label + 1);

  struct Bin {
    std::size_t lo, hi;
    double mass;  // count * entropy
    std::optional<Cut> cut;
  };
  auto make_bin = [&](std::size_t lo, std::size_t hi) {
    std::vector<std::uint64_t> counts(k, 0);
    for (std::size_t i = lo; i < hi; ++i) ++counts[sorted[i].label];
    Bin b{lo, hi, static_cast<double>(hi - lo) * entropy_of(counts, hi - lo),
          best_cut(sorted, lo, hi, k)};
    if (b.cut && b.cut->gain <= kGainEps) b.cut.reset();
    return b;
  };

  std::vector<Bin> bins{make_bin(0, sorted.size())};
  while (static_cast<int>(bins.size()) < max_bins) {
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < bins.size(); ++i) {
      if (!bins[i].cut) continue;
      if (!pick || bins[i].mass > bins[*pick].mass) pick = i;
    }
    if (!pick) break;
    const Bin b = bins[*pick];
    const std::size_t pos = b.cut->pos;
    bins[*pick] = make_bin(b.lo, pos);
    bins.insert(bins.begin() + static_cast<std::ptrdiff_t>(*pick) + 1,
                make_bin(pos, b.hi));
  }
  for (std::size_t i = 1; i < bins.size(); ++i) {
    const std::size_t pos = bins[i].lo;
    out.cuts.push_back(midpoint(sorted[pos - 1].value, sorted[pos].value));
  }
  return out;
}

BinEdges quantile_bins(std::span<const LabeledValue> samples, int max_bins) {
  BinEdges out;
  if (samples.empty() || max_bins <= 1) return out;
  const auto sorted = sorted_copy(samples);
  const std::size_t n = sorted.size();
  for (int i = 1; i < max_bins; ++i) {
    const std::size_t pos = static_cast<std::size_t>(i) * n /
                            static_cast<std::size_t>(max_bins);
    if (pos == 0 || pos >= n) continue;
    if (!(sorted[pos - 1].value < sorted[pos].value)) continue;
    const double e = midpoint(sorted[pos - 1].value, sorted[pos].value);
    if (out.cuts.empty() || e > out.cuts.back()) out.cuts.push_back(e);
  }
  return out;
}

ReservoirSample::ReservoirSample(std::size_t capacity, std::uint64_t seed)
    : capacity_(capacity), rng_(seed) {
  retained_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReservoirSample::offer(double value, std::uint32_t label) {
  if (retained_.size() < capacity_) {
    retained_.push_back({value, label});
  } else {
    std::uniform_int_distribution<std::uint64_t> pick(0, seen_);
    const std::uint64_t j = pick(rng_);
    if (j < capacity_) retained_[j] = {value, label};
  }
  ++seen_;
}

void VariableOutcomes::build_index() {
  index_.clear();
  for (std::size_t i = 0; i + 1 < symbols.size(); ++i)
    index_.emplace(symbols[i], static_cast<std::uint32_t>(i));
}

std::uint32_t VariableOutcomes::encode(std::string_view raw,
                                       double numeric) const {
  if (raw == kMissingToken) return missing_index();
  if (continuous()) {
    auto bin = discretize(numeric, edges);
    return bin ? static_cast<std::uint32_t>(*bin) : missing_index();
  }
  auto it = index_.find(raw);
  if (it == index_.end())
    throw Error(ErrorKind::kData, "value '" + std::string(raw) +
                                      "' is not in the alphabet of variable '" +
                                      name + "'");
  return it->second;
}

std::uint32_t VariableOutcomes::encode_text(std::string_view raw) const {
  if (raw == kMissingToken || !continuous()) return encode(raw, 0.0);
  double v = 0;
  const char* b = raw.data();
  const char* e = b + raw.size();
  if (b != e && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e || b == e)
    throw Error(ErrorKind::kData, "value '" + std::string(raw) +
                                      "' is not numeric for variable '" + name +
                                      "'");
  return encode(raw, v);
}

std::optional<std::uint32_t> OutcomeTable::class_index(
    std::string_view label) const {
  if (label == kMissingToken) return std::nullopt;
  auto it = std::lower_bound(classes.begin(), classes.end(), label);
  if (it == classes.end() || *it != label)
    throw Error(ErrorKind::kData,
                "unknown class label '" + std::string(label) + "'");
  return static_cast<std::uint32_t>(it - classes.begin());
}

std::string bin_symbol(const BinEdges& edges, std::size_t bin) {
  const double lo = bin == 0 ? -INFINITY : edges.cuts[bin - 1];
  const double hi = bin == edges.cuts.size() ? INFINITY : edges.cuts[bin];
  return (bin == 0 ? "(" : "[") + shortest(lo) + "," + shortest(hi) + ")";
}

OutcomeTable collect_outcomes(const Schema& schema, Dataset& dataset) {
  const std::size_t nf = schema.field_vars.size();
  std::vector<std::set<std::string, std::less<>>> seen(nf);
  std::vector<ReservoirSample> reservoirs;
  reservoirs.reserve(nf);
  for (std::size_t i = 0; i < nf; ++i)
    reservoirs.emplace_back(schema.reservoir_capacity,
                            splitmix64(schema.seed ^ (i * 0x100000001b3ULL)));

  // Class labels are interned in first-seen order, then remapped to sorted.
  std::map<std::string, std::uint32_t, std::less<>> first_seen;

  iterate_pass(dataset, [&](const RecordView& r) {
    std::optional<std::uint32_t> cls;
    if (!r.class_missing()) {
      auto it = first_seen.find(r.class_value);
      if (it == first_seen.end())
        it = first_seen
                 .emplace(std::string(r.class_value),
                          static_cast<std::uint32_t>(first_seen.size()))
                 .first;
      cls = it->second;
    }
    for (std::size_t i = 0; i < nf; ++i) {
      if (r.missing(i)) continue;
      if (schema.field_vars[i].continuous()) {
        if (cls) reservoirs[i].offer(r.numeric[i], *cls);
      } else if (seen[i].find(r.fields[i]) == seen[i].end()) {
        if (seen[i].size() >= schema.max_outcomes)
          throw Error(ErrorKind::kData,
                      "variable '" + schema.field_vars[i].name +
                          "' exceeds the outcome cap of " +
                          std::to_string(schema.max_outcomes));
        seen[i].emplace(r.fields[i]);
      }
    }
  });

  OutcomeTable table;
  std::vector<std::uint32_t> remap(first_seen.size());
  for (const auto& [label, idx] : first_seen) {
    remap[idx] = static_cast<std::uint32_t>(table.classes.size());
    table.classes.push_back(label);
  }

  for (std::size_t i = 0; i < nf; ++i) {
    const auto& spec = schema.field_vars[i];
    VariableOutcomes vo;
    vo.name = spec.name;
    vo.kind = spec.kind;
    if (spec.continuous()) {
      auto& samples = reservoirs[i].mutable_retained();
      for (auto& s : samples) s.label = remap[s.label];
      vo.edges = spec.discretizer == Discretizer::kQuantile
                     ? quantile_bins(samples, schema.max_bins)
                     : entropy_bins(samples, schema.max_bins);
      for (std::size_t b = 0; b < vo.edges.bins(); ++b)
        vo.symbols.push_back(bin_symbol(vo.edges, b));
    } else {
      vo.symbols.assign(seen[i].begin(), seen[i].end());
    }
    vo.symbols.emplace_back(kMissingToken);
    vo.build_index();
    table.vars.push_back(std::move(vo));
  }
  return table;
}

}  // namespace apri
