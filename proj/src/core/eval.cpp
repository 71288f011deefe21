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

#include "apri/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_map>

#include <json.hpp>

#include "apri/error.hpp"
#include "apri/inference.hpp"
#include "apri/schema_io.hpp"
#include "apri/structure.hpp"

namespace apri {
namespace {

using u128 = unsigned __int128;

// round_half_up(num * scale / den) in integers.
std::uint64_t scaled_half_up(std::uint64_t num, std::uint64_t den,
                             std::uint64_t scale) {
  const u128 n = static_cast<u128>(num) * scale * 2 + den;
  return static_cast<std::uint64_t>(n / (static_cast<u128>(den) * 2));
}

bool is_known(std::span<const std::string> known, std::string_view label) {
  return std::find(known.begin(), known.end(), label) != known.end();
}

}  // namespace

ConfusionCounts confusion(std::span<const std::string> predictions,
                          std::span<const std::string> actuals,
                          std::string_view positive,
                          std::span<const std::string> known) {
  if (predictions.size() != actuals.size())
    throw Error(ErrorKind::kInvalidArgument, "predictions and actuals differ in length");
  if (!is_known(known, positive))
    throw Error(ErrorKind::kInvalidArgument,
                "unknown positive class '" + std::string(positive) + "'");
  ConfusionCounts c;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    for (const auto* l : {&predictions[i], &actuals[i]})
      if (!is_known(known, *l))
        throw Error(ErrorKind::kData, "unknown label '" + *l + "'");
    const bool pred = predictions[i] == positive;
    const bool act = actuals[i] == positive;
    if (pred && act) ++c.tp;
    else if (pred) ++c.fp;
    else if (act) ++c.fn;
    else ++c.tn;
  }
  return c;
}

ConfusionCounts confusion(std::span<const std::string> predictions,
                          std::span<const std::string> actuals,
                          std::string_view positive, std::string_view negative) {
  const std::string known[] = {std::string(positive), std::string(negative)};
  return confusion(predictions, actuals, positive, known);
}

std::string percent_text(std::uint64_t num, std::uint64_t den) {
  const std::uint64_t q = scaled_half_up(num, den, 10000);
  std::string frac = std::to_string(q % 100);
  if (frac.size() < 2) frac.insert(0, "0");
  return std::to_string(q / 100) + "." + frac;
}

std::string volume_ratio(std::uint64_t fp, std::uint64_t tp) {
  if (fp == 0) return "0:1";
  if (tp == 0) return "∞:1";
  const std::uint64_t q = scaled_half_up(fp, tp, 10);
  return std::to_string(q / 10) + "." + std::to_string(q % 10) + ":1";
}

FCVRow fcv(const ConfusionCounts& counts, std::optional<double> threshold) {
  if (counts.positives() == 0)
    throw Error(ErrorKind::kData, "capture rate undefined: no actual positives");
  if (counts.negatives() == 0)
    throw Error(ErrorKind::kData, "false classification rate undefined: no actual negatives");
  FCVRow row;
  row.threshold = threshold;
  row.counts = counts;
  row.f_text = percent_text(counts.fp, counts.negatives());
  row.c_text = percent_text(counts.tp, counts.positives());
  row.f_pct = static_cast<double>(scaled_half_up(counts.fp, counts.negatives(), 10000)) / 100.0;
  row.c_pct = static_cast<double>(scaled_half_up(counts.tp, counts.positives(), 10000)) / 100.0;
  row.volume = volume_ratio(counts.fp, counts.tp);
  row.accuracy = static_cast<double>(counts.tp + counts.tn) /
                 static_cast<double>(counts.total());
  return row;
}

std::vector<double> make_grid(double from, double to, double step) {
  if (!(step > 0.0) || !(to >= from) || !std::isfinite(from) || !std::isfinite(to))
    throw Error(ErrorKind::kInvalidArgument, "grid needs from <= to and step > 0");
  const auto count = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
  std::vector<double> grid;
  for (std::size_t i = 0; i < count; ++i)
    grid.push_back(std::round((from + static_cast<double>(i) * step) * 1e9) / 1e9);
  return grid;
}

std::vector<double> parse_grid(std::string_view text) {
  double parts[3];
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t end = i < 2 ? text.find(':', pos) : text.size();
    if (end == std::string_view::npos)
      throw Error(ErrorKind::kInvalidArgument, "grid must look like a:b:step");
    auto tok = text.substr(pos, end - pos);
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), parts[i]);
    if (ec != std::errc() || p != tok.data() + tok.size() || tok.empty())
      throw Error(ErrorKind::kInvalidArgument,
                  "grid component '" + std::string(tok) + "' is not a number");
    pos = end + 1;
  }
  return make_grid(parts[0], parts[1], parts[2]);
}

std::vector<double> default_grid() { return make_grid(0.10, 0.90, 0.05); }

std::vector<FCVRow> sweep(std::span<const ScoredRecord> scored,
                          std::span<const double> grid) {
  if (scored.empty() || grid.empty())
    throw Error(ErrorKind::kInvalidArgument, "sweep needs scores and a grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] < 1.0))
      throw Error(ErrorKind::kInvalidArgument, "grid values must lie in (0,1)");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw Error(ErrorKind::kInvalidArgument, "grid must increase strictly");
  }
  std::vector<FCVRow> rows;
  for (double t : grid) {
    ConfusionCounts c;
    for (const auto& r : scored) {
      const bool pred = r.positive_prob >= t;
      if (pred && r.actual_positive) ++c.tp;
      else if (pred) ++c.fp;
      else if (r.actual_positive) ++c.fn;
      else ++c.tn;
    }
    rows.push_back(fcv(c, t));
  }
  return rows;
}

std::string report_json(const ReportMeta& meta, std::span<const FCVRow> rows) {
  using Json = nlohmann::ordered_json;
  Json jrows = Json::array();
  for (const auto& r : rows)
    jrows.push_back({{"threshold", r.threshold ? Json(*r.threshold) : Json(nullptr)},
                     {"F_pct", r.f_pct},
                     {"C_pct", r.c_pct},
                     {"V", r.volume},
                     {"TP", r.counts.tp},
                     {"FP", r.counts.fp},
                     {"TN", r.counts.tn},
                     {"FN", r.counts.fn},
                     {"accuracy", r.accuracy}});
  Json counts = Json::object();
  if (!rows.empty())
    counts = {{"P", rows.front().counts.positives()},
              {"N", rows.front().counts.negatives()},
              {"records", rows.front().counts.total()}};
  Json j{{"metadata",
          {{"model", meta.model},
           {"dataset", meta.dataset},
           {"predictions", meta.predictions},
           {"positive", meta.positive},
           {"grid", meta.grid}}},
         {"counts", std::move(counts)},
         {"rows", std::move(jrows)}};
  return j.dump(2) + "\n";
}

void write_rows_csv(std::span<const FCVRow> rows, std::ostream& out) {
  out << "threshold,F_pct,C_pct,V,TP,FP,TN,FN,accuracy\n";
  for (const auto& r : rows) {
    if (r.threshold) out << format_double(*r.threshold);
    out << ',' << r.f_text << ',' << r.c_text << ',' << csv_escape(r.volume) << ','
        << r.counts.tp << ',' << r.counts.fp << ',' << r.counts.tn << ','
        << r.counts.fn << ',' << format_double(r.accuracy) << '\n';
  }
}

Evaluation evaluate_files(const std::filesystem::path& predictions,
                          const std::filesystem::path& data,
                          const EvaluateOptions& options) {
  const auto pred = CsvSource::from_file(predictions);
  const auto& ph = pred.header();
  if (ph.size() < 4 || ph.front() != "record_id" || ph[ph.size() - 2] != "label" ||
      ph.back() != "skipped_nodes")
    throw Error(ErrorKind::kData, "'" + pred.name() + "' is not a classification file");
  std::vector<std::string> classes;
  for (std::size_t i = 1; i + 2 < ph.size(); ++i) {
    const auto& h = ph[i];
    if (h.size() < 3 || h.rfind("P(", 0) != 0 || h.back() != ')')
      throw Error(ErrorKind::kData, "unexpected column '" + h + "' in " + pred.name());
    classes.push_back(h.substr(2, h.size() - 3));
  }
  if (!is_known(classes, options.positive))
    throw Error(ErrorKind::kInvalidArgument,
                "unknown positive class '" + options.positive + "'");

  std::unordered_map<std::uint64_t, std::string> labels;
  std::vector<std::uint64_t> order;
  pred.for_each_row([&](std::span<const std::string> cells, bool ok) {
    if (!ok || cells.size() != ph.size())
      throw Error(ErrorKind::kData, "malformed row in " + pred.name());
    std::uint64_t id = 0;
    const auto& s = cells.front();
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), id);
    if (ec != std::errc() || p != s.data() + s.size())
      throw Error(ErrorKind::kData, "bad record_id '" + s + "' in " + pred.name());
    if (!labels.emplace(id, cells[ph.size() - 2]).second)
      throw Error(ErrorKind::kData, "duplicate record_id " + s + " in " + pred.name());
    order.push_back(id);
  });

  const auto src = CsvSource::from_file(data);
  const auto& dh = src.header();
  Evaluation ev;
  std::size_t class_col = 0;
  if (options.class_column) {
    auto it = std::find(dh.begin(), dh.end(), *options.class_column);
    if (it == dh.end())
      throw Error(ErrorKind::kData, "missing required column '" + *options.class_column +
                                        "' in header of '" + src.name() + "'");
    class_col = static_cast<std::size_t>(it - dh.begin());
  } else {
    std::vector<bool> alive(dh.size(), true);
    std::vector<bool> observed(dh.size(), false);
    std::uint64_t index = 0;
    src.for_each_row([&](std::span<const std::string> cells, bool ok) {
      ++index;
      if (!ok || cells.size() != dh.size() || !labels.count(index)) return;
      for (std::size_t c = 0; c < dh.size(); ++c) {
        if (!alive[c] || cells[c] == kMissingToken) continue;
        if (is_known(classes, cells[c])) observed[c] = true;
        else alive[c] = false;
      }
    });
    std::vector<std::size_t> found;
    for (std::size_t c = 0; c < dh.size(); ++c)
      if (alive[c] && observed[c]) found.push_back(c);
    if (found.size() != 1)
      throw Error(ErrorKind::kData,
                  "cannot identify the class column of '" + src.name() +
                      "'; name it explicitly");
    class_col = found.front();
  }
  ev.class_column = dh[class_col];

  std::unordered_map<std::uint64_t, std::string> actual;
  std::uint64_t index = 0;
  src.for_each_row([&](std::span<const std::string> cells, bool ok) {
    ++index;
    if (!ok || cells.size() != dh.size() || !labels.count(index)) return;
    actual.emplace(index, cells[class_col]);
  });
  std::vector<std::string> preds, acts;
  for (auto id : order) {
    auto it = actual.find(id);
    if (it == actual.end())
      throw Error(ErrorKind::kData, "record_id " + std::to_string(id) +
                                        " has no matching row in '" + src.name() + "'");
    if (it->second == kMissingToken) {
      ++ev.unlabeled;
      continue;
    }
    preds.push_back(labels.at(id));
    acts.push_back(it->second);
  }
  ev.row = fcv(confusion(preds, acts, options.positive, classes), options.threshold);
  return ev;
}

SweepResult sweep_dataset(const NetworkModel& model, Dataset& dataset,
                          std::span<const double> grid, std::uint32_t positive) {
  if (positive >= model.outcomes.classes.size())
    throw Error(ErrorKind::kInvalidArgument, "positive class index out of range");
  SweepResult result;
  std::vector<ScoredRecord> scored;
  score_dataset(model, dataset, [&](const CaseRecord& c, const ClassPosterior& p) {
    ++result.records;
    if (!c.actual_class) {
      ++result.unlabeled;
      return;
    }
    scored.push_back({p.probs[positive], *c.actual_class == positive});
  });
  result.rows = sweep(scored, grid);
  return result;
}

}  // namespace apri
