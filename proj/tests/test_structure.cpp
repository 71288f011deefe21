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

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "apri/structure.hpp"
#include "test_support.hpp"

using namespace apri;
using apri::testing::capture;

namespace {

// Class-dependent categorical data: a and b informative, c copies a with
// noise, d independent of everything.
std::string dataset_text(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::string text = "a,b,c,d,class\n";
  for (int i = 0; i < n; ++i) {
    const bool bad = u(rng) < 0.2;
    const int a = u(rng) < (bad ? 0.8 : 0.3) ? 1 : 0;
    const int b = static_cast<int>(u(rng) * 3.0 * (bad ? 0.6 : 1.0));
    const int c = u(rng) < 0.9 ? a : 1 - a;
    const int d = u(rng) < 0.5;
    text += "a" + std::to_string(a) + ",b" + std::to_string(b) + ",c" + std::to_string(c) +
            ",d" + std::to_string(d) + (bad ? ",bad\n" : ",good\n");
  }
  return text;
}

constexpr const char* kSchema =
    "class class\nvar a categorical\nvar b categorical\nvar c categorical\n"
    "var d categorical\n";

NetworkModel train_text(const std::string& schema_text, const std::string& data) {
  const Schema s = parse_schema(schema_text);
  Dataset ds(CsvSource::from_text(data), s);
  return train(s, ds);
}

// Empirical MI in bits between the class and one column, from raw cells.
double raw_mi(const std::string& data, std::size_t col) {
  auto src = CsvSource::from_text(data);
  std::map<std::pair<std::string, std::string>, double> joint;
  std::map<std::string, double> px, py;
  double n = 0;
  src.for_each_row([&](std::span<const std::string> cells, bool) {
    joint[{cells.back(), cells[col]}] += 1;
    px[cells.back()] += 1;
    py[cells[col]] += 1;
    n += 1;
  });
  double mi = 0;
  for (auto& [k, c] : joint) mi += c / n * std::log2(c * n / (px[k.first] * py[k.second]));
  return mi;
}

}  // namespace

TEST_CASE("training reads the data exactly four times") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Schema s = parse_schema(std::string(kSchema) + "t_prime " +
                                  std::to_string(0.3 * static_cast<double>(seed)) + "\n");
    Dataset ds(CsvSource::from_text(dataset_text(seed, 500)), s);
    const NetworkModel m = train(s, ds);
    CHECK(ds.stats().passes == 4);
    CHECK(m.training.passes == 4);
    CHECK(m.training.rows == 500);
  }
}

TEST_CASE("t_prime 0 keeps exactly the highest-MI field") {
  const std::string data = dataset_text(5, 3000);
  const NetworkModel m = train_text(std::string(kSchema) + "t_prime 0\n", data);
  REQUIRE(m.nodes.size() == 1);
  std::size_t best = 0;
  for (std::size_t col = 1; col < 4; ++col)
    if (raw_mi(data, col) > raw_mi(data, best)) best = col;
  CHECK(m.nodes[0].name == std::string(1, static_cast<char>('a' + best)));
  CHECK(m.nodes[0].mi == doctest::Approx(raw_mi(data, best)).epsilon(1e-12));
  CHECK(m.dependencies.empty());
}

TEST_CASE("field ranking is non-increasing and matches brute-force MI") {
  const std::string data = dataset_text(6, 4000);
  const NetworkModel m = train_text(std::string(kSchema) + "t_prime 1\n", data);
  REQUIRE(m.field_scores.size() == 4);
  for (std::size_t i = 1; i < m.field_scores.size(); ++i)
    CHECK(m.field_scores[i - 1].value >= m.field_scores[i].value);
  for (const auto& s : m.field_scores)
    CHECK(s.value == doctest::Approx(raw_mi(data, s.order)).epsilon(1e-12));
  for (std::size_t i = 1; i < m.nodes.size(); ++i) CHECK(m.nodes[i - 1].mi >= m.nodes[i].mi);
}

TEST_CASE("dependency selection examples") {
  auto edges = [](std::vector<PairScore> p, double t, int u) {
    std::string out;
    for (const auto& e : select_dependencies(std::move(p), t, u))
      out += std::string(1, static_cast<char>('A' + e.parent)) + ">" +
             std::string(1, static_cast<char>('A' + e.child)) + " ";
    return out;
  };
  CHECK(edges({{1, 0, 0.4}}, 1.0, 1) == "A>B ");
  CHECK(edges({{0, 1, 0.4}}, 1.0, 0) == "");
  CHECK(edges({{0, 1, 0.6}, {0, 2, 0.3}, {1, 2, 0.1}}, 0.9, 1) == "A>B A>C ");
  // B>C is budget-blocked once C has a parent; it does not count toward the share.
  CHECK(edges({{0, 1, 0.6}, {0, 2, 0.3}, {1, 2, 0.1}}, 1.0, 1) == "A>B A>C ");
  CHECK(edges({{0, 1, 0.6}, {0, 2, 0.3}, {1, 2, 0.1}}, 1.0, 2) == "A>B A>C B>C ");
  CHECK(edges({{0, 1, 0.6}, {0, 2, 0.3}, {1, 2, 0.1}}, 0.0, 1) == "A>B ");
  CHECK(edges({{0, 1, 0.3}, {0, 2, 0.3}}, 0.5, 1) == "A>B ");
  CHECK(edges({{0, 1, 0.0}}, 1.0, 1) == "");
}

TEST_CASE("parameter estimation examples") {
  const std::vector<std::uint64_t> counts = {3, 0, 0, 0};
  const Cpt smoothed = estimate_cpt(counts, 2, 1, 2, 1.0);
  CHECK(smoothed.row(0, 0)[0] == doctest::Approx(0.8));
  CHECK(smoothed.row(0, 0)[1] == doctest::Approx(0.2));
  CHECK_FALSE(smoothed.is_unseen(0, 0));
  CHECK(smoothed.is_unseen(1, 0));

  const Cpt raw = estimate_cpt(counts, 2, 1, 2, 0.0);
  CHECK(raw.row(0, 0)[0] == 1.0);
  CHECK(raw.row(0, 0)[1] == 0.0);
  CHECK(raw.is_unseen(1, 0));

  NodeCounts nc;
  nc.classes = 2;
  nc.outcomes = 2;
  nc.cpt = {45, 45, 5, 5};
  nc.fallback = {45, 45, 5, 5};
  const std::vector<std::uint64_t> classes = {90, 10};
  const auto t = estimate_cpts(std::span<const NodeCounts>(&nc, 1), classes, 0.0);
  CHECK(t.prior == std::vector<double>{0.9, 0.1});
  CHECK(t.cpts[0].row(1, 0)[0] == 0.5);
}

TEST_CASE("prior from 90 good and 10 bad records") {
  std::string data = "a,class\n";
  for (int i = 0; i < 100; ++i)
    data += std::string(i % 2 ? "x," : "y,") + (i < 90 ? "good\n" : "bad\n");
  const NetworkModel m = train_text("class class\nvar a categorical\n", data);
  CHECK(m.outcomes.classes == std::vector<std::string>{"bad", "good"});
  CHECK(m.prior[0] == doctest::Approx(0.1));
  CHECK(m.prior[1] == doctest::Approx(0.9));
  CHECK(m.outcomes.classes[m.positive] == "bad");
}

TEST_CASE("unseen parent configurations are flagged") {
  // b depends on a; configuration a=x never occurs with class bad.
  std::string data = "a,b,class\n";
  for (int i = 0; i < 40; ++i) data += i % 2 ? "x,p,good\n" : "y,q,good\n";
  for (int i = 0; i < 10; ++i) data += "y,q,bad\n";
  const NetworkModel m = train_text(
      "class class\nvar a categorical\nvar b categorical\nt_prime 1\nt_field 1\n", data);
  REQUIRE(m.nodes.size() == 2);
  REQUIRE(m.dependencies.size() == 1);
  const auto& child = m.nodes[m.dependencies[0].child];
  REQUIRE(child.parents.size() == 1);
  const std::size_t bad = 0;
  const std::uint32_t x = 0;  // sorted alphabet {x, y}
  CHECK(child.cpt.is_unseen(bad, x));
  CHECK_FALSE(child.cpt.is_unseen(bad, 1));
}

TEST_CASE("structural invariants hold on random datasets") {
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const int u = static_cast<int>(seed % 3);
    const NetworkModel m = train_text(
        std::string(kSchema) + "t_prime 1\nt_field 1\nmax_parents " + std::to_string(u) +
            "\nsmoothing " + std::to_string(seed % 2) + "\n",
        dataset_text(seed, 800));
    for (std::size_t n = 0; n < m.nodes.size(); ++n) {
      const auto& node = m.nodes[n];
      CHECK(node.parents.size() <= static_cast<std::size_t>(u));
      for (auto p : node.parents) CHECK(p < n);  // edges point down the ranking
      for (const Cpt* t : {&node.cpt, &node.fallback})
        for (std::size_t c = 0; c < t->classes; ++c)
          for (std::size_t g = 0; g < t->configs; ++g) {
            if (t->is_unseen(c, g)) continue;
            double s = 0;
            for (double p : t->row(c, g)) s += p;
            CHECK(std::fabs(s - 1.0) <= 1e-9);
          }
    }
    if (u == 0) CHECK(m.dependencies.empty());
  }
}

TEST_CASE("training is deterministic and the model round-trips through JSON") {
  const std::string data = dataset_text(21, 2000);
  const std::string schema = std::string(kSchema) + "t_prime 1\nt_field 0.9\n";
  const NetworkModel a = train_text(schema, data);
  const NetworkModel b = train_text(schema, data);
  const std::string ja = model_to_json(a);
  CHECK(ja == model_to_json(b));
  CHECK(model_to_json(model_from_json(ja)) == ja);

  apri::testing::TempDir dir;
  save_model(a, dir.file("m.json"));
  CHECK(model_to_json(load_model(dir.file("m.json"))) == ja);
  CHECK(capture([] { model_from_json("{\"format\": \"other\"}"); }).kind == ErrorKind::kParse);
  CHECK(capture([] { model_from_json("not json"); }).kind == ErrorKind::kParse);
}

TEST_CASE("continuous variables and windows round-trip too") {
  std::mt19937_64 rng(22);
  std::normal_distribution<double> g;
  std::string data = "id,x,a,class\n";
  for (int i = 0; i < 1500; ++i) {
    const bool bad = i % 9 == 0;
    data += "g" + std::to_string(i / 5) + "," + std::to_string(g(rng) + (bad ? 1.5 : 0)) +
            (i % 3 ? ",p" : ",q") + (bad ? ",bad\n" : ",good\n");
  }
  const NetworkModel m = train_text(
      "class class\nvar x continuous\nvar a categorical\nwindow 2\ngroup id\nt_prime 1\n", data);
  CHECK(m.field_scores.size() == 4);
  const std::string j = model_to_json(m);
  CHECK(model_to_json(model_from_json(j)) == j);
  CHECK(model_from_json(j).outcomes.vars[0].edges == m.outcomes.vars[0].edges);
}

TEST_CASE("model-size guard names the offending pair") {
  const auto t = capture([] {
    train_text(std::string(kSchema) + "t_prime 1\nmax_model_cells 20\n", dataset_text(30, 500));
  });
  REQUIRE(t.thrown);
  CHECK(t.kind == ErrorKind::kSize);
  CHECK(t.message.find("pair (") != std::string::npos);
}

TEST_CASE("a constant class column is a training error") {
  const auto t = capture(
      [] { train_text("class class\nvar a categorical\n", "a,class\nx,good\ny,good\n"); });
  CHECK(t.kind == ErrorKind::kTraining);
}

TEST_CASE("unknown positive class") {
  const auto t = capture([] {
    train_text("class class\nvar a categorical\npositive nope\n", dataset_text(31, 50));
  });
  CHECK(t.kind == ErrorKind::kInvalidArgument);
}
