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

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "apri/infometrics.hpp"
#include "apri/synthgen.hpp"
#include "test_support.hpp"

using namespace apri;
using apri::testing::capture;

namespace {

const char* kConfig = R"({
  "n": 2000, "seed": 7, "classes": ["good", "bad"], "prior": 0.1,
  "group": {"name": "cust", "length": 4},
  "schema": {"t_prime": 0.9, "max_bins": 8},
  "variables": [
    {"name": "a", "type": "categorical", "outcomes": ["x", "y"],
     "dist": {"good": [0.8, 0.2], "bad": [0.2, 0.8]}, "missing": 0.1},
    {"name": "b", "type": "continuous",
     "mean": {"good": 0, "bad": 2}, "sd": {"good": 1, "bad": 0.5}},
    {"name": "c", "type": "dependent", "parent": "a", "outcomes": ["u", "v"],
     "dist": {"good": [[0.9, 0.1], [0.3, 0.7]], "bad": [[0.6, 0.4], [0.1, 0.9]]}},
    {"name": "n1", "type": "noise", "outcomes": ["p", "q", "r"], "dist": [0.2, 0.3, 0.5]},
    {"name": "n2", "type": "noise", "mean": 5, "sd": 2}]})";

std::string with_n(std::uint64_t n, std::uint64_t seed) {
  std::string s = kConfig;
  s.replace(s.find("\"n\": 2000"), 9, "\"n\": " + std::to_string(n));
  s.replace(s.find("\"seed\": 7"), 9, "\"seed\": " + std::to_string(seed));
  return s;
}

std::string generate_text(const GenConfig& g) {
  std::ostringstream out;
  generate(g, out);
  return out.str();
}

std::vector<std::vector<std::string>> rows_of(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  CsvSource::from_text(csv).for_each_row([&](std::span<const std::string> cells, bool) {
    rows.emplace_back(cells.begin(), cells.end());
  });
  return rows;
}

double mi_bits(const std::vector<std::vector<std::string>>& rows, std::size_t col,
               std::size_t cls_col, const std::vector<std::size_t>* perm = nullptr) {
  std::map<std::string, std::size_t> xs, cs;
  for (const auto& r : rows) {
    xs.emplace(r[col], xs.size());
    cs.emplace(r[cls_col], cs.size());
  }
  JointCounts j({cs.size(), xs.size()});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& label = rows[perm ? (*perm)[i] : i][cls_col];
    j.add(cs[label], xs[rows[i][col]]);
  }
  return mutual_information(j);
}

}  // namespace

TEST_CASE("generation is deterministic for a seed") {
  const GenConfig g = parse_gen_config(kConfig);
  const std::string first = generate_text(g);
  CHECK(first == generate_text(g));
  CHECK(first != generate_text(parse_gen_config(with_n(2000, 8))));
  const auto rows = rows_of(first);
  REQUIRE(rows.size() == 2000);
  CHECK(first.rfind("cust,a,b,c,n1,n2,class\n", 0) == 0);
  CHECK(rows[0][0] == "g0");
  CHECK(rows[3][0] == "g0");
  CHECK(rows[4][0] == "g1");

  // The truth document regenerates the same data.
  const GenConfig again = parse_gen_config(truth_to_json(TruthModel{g}));
  CHECK(generate_text(again) == first);
  CHECK(format_schema(again.schema) == format_schema(g.schema));
}

TEST_CASE("files written next to each other agree") {
  apri::testing::TempDir dir;
  const GenConfig g = parse_gen_config(kConfig);
  const auto summary = generate_to_dir(g, dir.path());
  CHECK(summary.rows == 2000);
  CHECK(apri::testing::slurp(dir.file("data.csv")) == generate_text(g));
  const Schema s = load_schema(dir.file("schema.txt"));
  CHECK(s.class_var == "class");
  CHECK(s.group_key == "cust");
  CHECK(s.positive_class == "bad");
  CHECK(s.t_prime == 0.9);
  CHECK(s.max_bins == 8);
  CHECK(s.field_vars.size() == 5);
  CHECK(s.field_vars[1].continuous());
  CHECK(s.field_vars[4].continuous());
  CHECK(load_gen_config(dir.file("truth.json")).variables.size() == 5);
}

TEST_CASE("positive fraction stays within three binomial deviations") {
  const GenConfig g = parse_gen_config(with_n(100000, 11));
  std::ostringstream sink;
  const auto s = generate(g, sink);
  const double frac = static_cast<double>(s.positives) / 100000.0;
  CHECK(std::fabs(frac - 0.1) <= 3.0 * std::sqrt(0.1 * 0.9 / 100000.0));
}

TEST_CASE("noise is uninformative and missingness follows its rate") {
  const GenConfig g = parse_gen_config(with_n(100000, 12));
  const auto rows = rows_of(generate_text(g));
  const std::size_t cls = 6;
  const double noise = mi_bits(rows, 4, cls);
  CHECK(noise < 0.005);
  // Permutation oracle: a shuffled class column gives the same order of bias.
  std::vector<std::size_t> perm(rows.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::mt19937_64 rng(1);
  std::shuffle(perm.begin(), perm.end(), rng);
  CHECK(mi_bits(rows, 4, cls, &perm) < 0.005);
  CHECK(mi_bits(rows, 1, cls) > 0.05);

  std::size_t missing = 0;
  for (const auto& r : rows) missing += r[1] == "?";
  CHECK(std::fabs(static_cast<double>(missing) / 100000.0 - 0.1) < 0.005);
}

TEST_CASE("analytic posterior examples") {
  const TruthModel t{parse_gen_config(kConfig)};
  const auto none = analytic_posterior(t, {});
  CHECK(none[0] == doctest::Approx(0.9));
  CHECK(none[1] == doctest::Approx(0.1));
  const auto noise_only = analytic_posterior(t, {{"n1", "q"}, {"n2", "4.5"}, {"a", "?"}});
  CHECK(noise_only[1] == doctest::Approx(0.1).epsilon(1e-12));

  const TruthModel single{parse_gen_config(R"({"n": 1, "prior": 0.1, "variables": [
      {"name": "x", "type": "categorical", "outcomes": ["0", "1"],
       "dist": {"good": [0.8, 0.2], "bad": [0.2, 0.8]}}]})")};
  CHECK(analytic_posterior(single, {{"x", "1"}})[1] ==
        doctest::Approx(0.307692).epsilon(1e-6));
  CHECK(analytic_posterior(single, {{"x", "1"}})[1] ==
        doctest::Approx(0.08 / 0.26).epsilon(1e-14));

  // Continuous evidence uses the true normal densities.
  const auto pb = analytic_posterior(t, {{"b", "1"}});
  const double lg = 0.9 * std::exp(-0.5) / 1.0;
  const double lb = 0.1 * std::exp(-0.5 * 4.0) / 0.5;
  CHECK(pb[1] == doctest::Approx(lb / (lg + lb)).epsilon(1e-12));

  // A dependent node with its parent missing marginalises over the parent.
  const auto pc = analytic_posterior(t, {{"c", "v"}});
  const double good = 0.9 * (0.8 * 0.1 + 0.2 * 0.7);
  const double bad = 0.1 * (0.2 * 0.4 + 0.8 * 0.9);
  CHECK(pc[1] == doctest::Approx(bad / (good + bad)).epsilon(1e-12));
  const auto pac = analytic_posterior(t, {{"a", "y"}, {"c", "v"}});
  CHECK(pac[1] == doctest::Approx(0.1 * 0.8 * 0.9 / (0.1 * 0.8 * 0.9 + 0.9 * 0.2 * 0.7))
                      .epsilon(1e-12));

  CHECK(capture([&] { analytic_posterior(t, {{"a", "z"}}); }).kind == ErrorKind::kData);
  CHECK(capture([&] { analytic_posterior(t, {{"zz", "x"}}); }).kind == ErrorKind::kData);
  CHECK(capture([&] { analytic_posterior(t, {{"b", "abc"}}); }).kind == ErrorKind::kData);
}

TEST_CASE("configuration errors") {
  auto kind_of = [](const char* text) { return capture([&] { parse_gen_config(text); }); };
  const auto unnormalized = kind_of(R"({"n": 1, "variables": [
      {"name": "x", "type": "categorical", "outcomes": ["0", "1"],
       "dist": {"good": [0.8, 0.3], "bad": [0.2, 0.8]}}]})");
  CHECK(unnormalized.kind == ErrorKind::kInvalidArgument);
  CHECK(unnormalized.message.find("unnormalized") != std::string::npos);
  CHECK(kind_of(R"({"n": 1, "prior": 1.0, "variables": []})").kind ==
        ErrorKind::kInvalidArgument);
  CHECK(kind_of(R"({"n": 1, "variables": [{"name": "c", "type": "dependent",
      "parent": "zz", "outcomes": ["u"], "dist": {"good": [[1]], "bad": [[1]]}}]})")
            .thrown);
  CHECK(kind_of(R"({"n": 1, "variables": [{"name": "x", "type": "wavelet"}]})").thrown);
  CHECK(kind_of("{not json").kind == ErrorKind::kInvalidArgument);
  CHECK(capture([] { load_gen_config("/no/such/config.json"); }).kind == ErrorKind::kIo);
}
