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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "apri/eval.hpp"
#include "test_support.hpp"

using namespace apri;
using apri::testing::capture;

namespace {

ConfusionCounts counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t tn, std::uint64_t fn) {
  ConfusionCounts c;
  c.tp = tp;
  c.fp = fp;
  c.tn = tn;
  c.fn = fn;
  return c;
}

// Direct recount at one threshold.
ConfusionCounts recount(const std::vector<ScoredRecord>& s, double t) {
  ConfusionCounts c;
  for (const auto& r : s) {
    const bool p = r.positive_prob >= t;
    c.tp += p && r.actual_positive;
    c.fp += p && !r.actual_positive;
    c.fn += !p && r.actual_positive;
    c.tn += !p && !r.actual_positive;
  }
  return c;
}

}  // namespace

TEST_CASE("confusion examples") {
  const std::vector<std::string> actual = {"bad", "good", "bad", "good", "good",
                                           "good", "bad", "good", "good", "good"};
  const std::vector<std::string> nothing(10, "good");
  CHECK(confusion(nothing, actual, "bad", "good") == counts(0, 0, 7, 3));
  CHECK(confusion(actual, actual, "bad", "good") == counts(3, 0, 7, 0));
  // First five predicted positive; two of them are actual positives.
  std::vector<std::string> first5(10, "good");
  for (int i = 0; i < 5; ++i) first5[static_cast<std::size_t>(i)] = "bad";
  CHECK(confusion(first5, actual, "bad", "good") == counts(2, 3, 4, 1));

  const std::vector<std::string> shorter(9, "good");
  CHECK(capture([&] { confusion(shorter, actual, "bad", "good"); }).kind ==
        ErrorKind::kInvalidArgument);
  std::vector<std::string> odd = nothing;
  odd[3] = "ugly";
  CHECK(capture([&] { confusion(odd, actual, "bad", "good"); }).kind == ErrorKind::kData);
}

TEST_CASE("operating-point arithmetic at scale") {
  // Operating points with P = 635,611 bad and N = 5,351,834 - 635,611 good.
  const std::uint64_t p = 635611, n = 5351834 - 635611;
  const FCVRow at70 = fcv(counts(134131, 134305, n - 134305, p - 134131), 0.7);
  CHECK(at70.c_text == "21.10");
  CHECK(at70.c_pct == 21.10);
  CHECK(at70.f_text == "2.85");
  CHECK(at70.volume == "1.0:1");
  const FCVRow at50 = fcv(counts(202500, 309784, n - 309784, p - 202500), 0.5);
  CHECK(at50.c_text == "31.86");
  CHECK(at50.f_text == "6.57");
  CHECK(at50.volume == "1.5:1");
  const FCVRow ideal = fcv(counts(p, 0, n, 0), std::nullopt);
  CHECK(ideal.volume == "0:1");
  CHECK(ideal.c_text == "100.00");
  CHECK(ideal.f_text == "0.00");
  CHECK(ideal.accuracy == 1.0);
}

TEST_CASE("rounding is half-up in exact integers") {
  CHECK(percent_text(1, 8) == "12.50");
  CHECK(percent_text(1, 80000) == "0.00");
  CHECK(percent_text(1, 20000) == "0.01");  // exactly 0.005 rounds up
  CHECK(percent_text(2, 3) == "66.67");
  CHECK(volume_ratio(3, 2) == "1.5:1");
  CHECK(volume_ratio(1, 20) == "0.1:1");  // 0.05 rounds up
  CHECK(volume_ratio(1, 21) == "0.0:1");
  CHECK(volume_ratio(0, 0) == "0:1");
  CHECK(volume_ratio(5, 0) == "∞:1");
  CHECK(volume_ratio(5111, 1000) == "5.1:1");
  CHECK(capture([] { fcv(counts(0, 1, 1, 0), 0.5); }).kind == ErrorKind::kData);
  CHECK(capture([] { fcv(counts(1, 0, 0, 1), 0.5); }).kind == ErrorKind::kData);
}

TEST_CASE("threshold grids") {
  const auto g = default_grid();
  REQUIRE(g.size() == 17);
  CHECK(g.front() == 0.1);
  CHECK(g[1] == 0.15);
  CHECK(g.back() == 0.9);
  CHECK(parse_grid("0.10:0.90:0.05") == g);
  CHECK(parse_grid("0.5:0.7:0.2") == std::vector<double>{0.5, 0.7});
  CHECK(parse_grid("0.3:0.3:0.1") == std::vector<double>{0.3});
  CHECK(capture([] { parse_grid("0.1:0.9"); }).kind == ErrorKind::kInvalidArgument);
  CHECK(capture([] { parse_grid("0.1:x:0.1"); }).kind == ErrorKind::kInvalidArgument);
  CHECK(capture([] { parse_grid("0.9:0.1:0.1"); }).thrown);
  CHECK(capture([] { parse_grid("0.1:0.9:0"); }).thrown);
}

TEST_CASE("sweep examples") {
  const std::vector<ScoredRecord> one = {{0.6, true}, {0.1, false}};
  const std::vector<double> grid = {0.5, 0.7};
  const auto rows = sweep(one, grid);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].counts.tp == 1);
  CHECK(rows[1].counts.tp == 0);
  CHECK(*rows[0].threshold == 0.5);

  const std::vector<ScoredRecord> flat = {{0.4, true}, {0.4, false}, {0.4, false}};
  const auto fr = sweep(flat, default_grid());
  for (const auto& r : fr) {
    const bool below = *r.threshold <= 0.4;
    CHECK(r.counts == (below ? counts(1, 2, 0, 0) : counts(0, 0, 2, 1)));
  }

  CHECK(capture([&] { sweep(one, std::vector<double>{}); }).thrown);
  CHECK(capture([&] { sweep(std::vector<ScoredRecord>{}, grid); }).thrown);
  CHECK(capture([&] { sweep(one, std::vector<double>{0.7, 0.5}); }).thrown);
  CHECK(capture([&] { sweep(one, std::vector<double>{0.0, 0.5}); }).thrown);
  CHECK(capture([&] { sweep(one, std::vector<double>{0.5, 1.0}); }).thrown);
}

TEST_CASE("property: counts are monotone and match a direct recount") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ScoredRecord> s;
    for (int i = 0; i < 500; ++i) {
      const bool pos = u(rng) < 0.15;
      s.push_back({std::min(1.0, u(rng) * (pos ? 1.3 : 0.9)), pos});
    }
    s.push_back({0.5, true});
    s.push_back({0.5, false});
    const auto grid = default_grid();
    const auto rows = sweep(s, grid);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].counts == recount(s, grid[i]));
      CHECK(rows[i].counts.total() == s.size());
      CHECK(rows[i].f_pct >= 0.0);
      CHECK(rows[i].c_pct <= 100.0);
      if (i > 0) {
        CHECK(rows[i].counts.tp <= rows[i - 1].counts.tp);
        CHECK(rows[i].counts.fp <= rows[i - 1].counts.fp);
      }
    }
  }
}

TEST_CASE("report formats") {
  const std::vector<FCVRow> rows = {fcv(counts(2, 3, 4, 1), 0.5), fcv(counts(1, 1, 6, 2), 0.7)};
  ReportMeta meta;
  meta.model = "m.json";
  meta.dataset = "d.csv";
  meta.positive = "bad";
  meta.grid = {0.5, 0.7};
  const auto j = nlohmann::json::parse(report_json(meta, rows));
  CHECK(j["metadata"]["model"] == "m.json");
  CHECK(j["counts"]["P"] == 3);
  CHECK(j["counts"]["N"] == 7);
  CHECK(j["rows"][0]["V"] == "1.5:1");
  CHECK(j["rows"][1]["TP"] == 1);
  CHECK(j["rows"][0]["C_pct"] == 66.67);

  std::ostringstream csv;
  write_rows_csv(rows, csv);
  CHECK(csv.str() ==
        "threshold,F_pct,C_pct,V,TP,FP,TN,FN,accuracy\n"
        "0.5,42.86,66.67,1.5:1,2,3,4,1,0.6\n"
        "0.7,14.29,33.33,1.0:1,1,1,6,2,0.7\n");
}

TEST_CASE("evaluating a classification file against its data") {
  apri::testing::TempDir dir;
  const auto data = dir.write("d.csv",
                              "f,class\n"
                              "x,bad\n"
                              "y,good\n"
                              "broken\n"
                              "x,good\n"
                              "y,?\n"
                              "x,bad\n");
  const auto pred = dir.write("p.csv",
                              "record_id,P(bad),P(good),label,skipped_nodes\n"
                              "1,0.9,0.1,bad,\n"
                              "2,0.2,0.8,good,\n"
                              "4,0.8,0.2,bad,f:missing\n"
                              "5,0.1,0.9,good,\n"
                              "6,0.3,0.7,good,\n");
  EvaluateOptions opt;
  opt.positive = "bad";
  opt.threshold = 0.7;
  const auto ev = evaluate_files(pred, data, opt);
  CHECK(ev.class_column == "class");
  CHECK(ev.unlabeled == 1);
  CHECK(ev.row.counts == counts(1, 1, 1, 1));
  CHECK(*ev.row.threshold == 0.7);

  opt.class_column = "nope";
  CHECK(capture([&] { evaluate_files(pred, data, opt); }).kind == ErrorKind::kData);
  opt.class_column.reset();
  opt.positive = "ugly";
  CHECK(capture([&] { evaluate_files(pred, data, opt); }).kind == ErrorKind::kInvalidArgument);
  opt.positive = "bad";
  const auto orphan = dir.write("q.csv",
                                "record_id,P(bad),P(good),label,skipped_nodes\n"
                                "99,0.9,0.1,bad,\n");
  CHECK(capture([&] { evaluate_files(orphan, data, opt); }).thrown);
  CHECK(capture([&] { evaluate_files(dir.file("none.csv"), data, opt); }).kind ==
        ErrorKind::kIo);
}
