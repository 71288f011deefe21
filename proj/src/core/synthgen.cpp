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

#include "apri/synthgen.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "apri/error.hpp"

namespace apri {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& msg) {
  throw Error(ErrorKind::kInvalidArgument, "generator config: " + msg);
}

void check_dist(const std::vector<double>& d, std::size_t size, const std::string& what) {
  if (d.size() != size) bad(what + " has " + std::to_string(d.size()) +
                            " entries, expected " + std::to_string(size));
  double sum = 0.0;
  for (double p : d) {
    if (!(p >= 0.0)) bad(what + " has a negative entry");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-9) bad("unnormalized distribution for " + what);
}

std::vector<double> per_class(const Json& j, const std::vector<std::string>& classes,
                              const char* key, const std::string& var) {
  std::vector<double> out;
  for (const auto& c : classes) {
    if (!j.contains(c)) bad("'" + std::string(key) + "' of " + var + " lacks class " + c);
    out.push_back(j.at(c).get<double>());
  }
  return out;
}

std::size_t sample(const std::vector<double>& dist, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < dist.size(); ++i) {
    acc += dist[i];
    if (u < acc) return i;
  }
  return dist.size() - 1;
}

std::string number_text(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 6);
  return std::string(buf, p);
}

double log_normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

std::size_t outcome_index(const GenVariable& v, std::string_view value) {
  for (std::size_t i = 0; i < v.outcomes.size(); ++i)
    if (v.outcomes[i] == value) return i;
  throw Error(ErrorKind::kData, "invalid symbol '" + std::string(value) +
                                    "' for variable '" + v.name + "'");
}

}  // namespace

GenConfig parse_gen_config(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("not JSON: ") + e.what());
  }
  try {
    GenConfig g;
    g.n = j.at("n").get<std::uint64_t>();
    g.seed = j.value("seed", std::uint64_t{1});
    g.class_name = j.value("class", std::string("class"));
    if (j.contains("classes")) g.classes = j.at("classes").get<std::vector<std::string>>();
    if (g.classes.size() != 2 || g.classes[0] == g.classes[1])
      bad("exactly two distinct classes are required");
    g.prior = j.value("prior", 0.1);
    if (!(g.prior > 0.0 && g.prior < 1.0)) bad("prior must lie in (0,1)");
    if (j.contains("group")) {
      g.group_name = j.at("group").at("name").get<std::string>();
      g.group_length = j.at("group").value("length", std::size_t{1});
      if (g.group_length < 1) bad("group length must be >= 1");
    }

    std::set<std::string> names{g.class_name};
    if (g.group_name && !names.insert(*g.group_name).second)
      bad("group column clashes with another column");
    for (const auto& jv : j.at("variables")) {
      GenVariable v;
      v.name = jv.at("name").get<std::string>();
      if (!names.insert(v.name).second) bad("duplicate variable '" + v.name + "'");
      const auto type = jv.at("type").get<std::string>();
      v.missing = jv.value("missing", 0.0);
      if (!(v.missing >= 0.0 && v.missing < 1.0)) bad("missing rate of " + v.name + " must lie in [0,1)");
      if (jv.value("discretizer", std::string("entropy")) == "quantile")
        v.discretizer = Discretizer::kQuantile;

      if (type == "categorical") {
        v.kind = GenKind::kCategorical;
        v.outcomes = jv.at("outcomes").get<std::vector<std::string>>();
        for (const auto& c : g.classes) {
          v.dist.push_back(jv.at("dist").at(c).get<std::vector<double>>());
          check_dist(v.dist.back(), v.outcomes.size(), v.name + " | " + c);
        }
      } else if (type == "continuous") {
        v.kind = GenKind::kContinuous;
        v.mean = per_class(jv.at("mean"), g.classes, "mean", v.name);
        v.sd = per_class(jv.at("sd"), g.classes, "sd", v.name);
      } else if (type == "dependent") {
        v.kind = GenKind::kDependent;
        v.parent = jv.at("parent").get<std::string>();
        v.outcomes = jv.at("outcomes").get<std::vector<std::string>>();
        const GenVariable* parent = nullptr;
        for (const auto& p : g.variables)
          if (p.name == v.parent) parent = &p;
        if (!parent || parent->kind != GenKind::kCategorical)
          bad("parent of " + v.name + " must be an earlier categorical variable");
        for (const auto& c : g.classes) {
          v.cond.push_back(
              jv.at("dist").at(c).get<std::vector<std::vector<double>>>());
          if (v.cond.back().size() != parent->outcomes.size())
            bad(v.name + " | " + c + " needs one row per parent outcome");
          for (std::size_t r = 0; r < v.cond.back().size(); ++r)
            check_dist(v.cond.back()[r], v.outcomes.size(),
                       v.name + " | " + c + ", " + v.parent + "=" + parent->outcomes[r]);
        }
      } else if (type == "noise") {
        if (jv.contains("mean")) {
          v.kind = GenKind::kNoiseContinuous;
          v.mean = {jv.at("mean").get<double>()};
          v.sd = {jv.at("sd").get<double>()};
        } else {
          v.kind = GenKind::kNoise;
          v.outcomes = jv.at("outcomes").get<std::vector<std::string>>();
          v.dist = {jv.at("dist").get<std::vector<double>>()};
          check_dist(v.dist[0], v.outcomes.size(), v.name);
        }
      } else {
        bad("unknown variable type '" + type + "'");
      }
      for (double s : v.sd)
        if (!(s > 0.0)) bad("sd of " + v.name + " must be positive");
      for (const auto& o : v.outcomes)
        if (o == kMissingToken || o.find_first_of(",\"\r\n") != std::string::npos)
          bad("outcome '" + o + "' of " + v.name + " is not a plain CSV token");
      g.variables.push_back(std::move(v));
    }

    Schema& s = g.schema;
    s.class_var = g.class_name;
    for (const auto& v : g.variables) {
      VariableSpec spec;
      spec.name = v.name;
      if (v.continuous()) {
        spec.kind = VarKind::kContinuous;
        spec.discretizer = v.discretizer;
      }
      s.field_vars.push_back(spec);
    }
    s.group_key = g.group_name;
    s.positive_class = g.classes[1];
    if (j.contains("schema")) {
      const auto& js = j.at("schema");
      s.t_prime = js.value("t_prime", s.t_prime);
      s.t_field = js.value("t_field", s.t_field);
      s.window = js.value("window", s.window);
      s.max_parents = js.value("max_parents", s.max_parents);
      s.max_bins = js.value("max_bins", s.max_bins);
      s.smoothing = js.value("smoothing", s.smoothing);
      s.max_model_cells = js.value("max_model_cells", s.max_model_cells);
      s.seed = js.value("seed", s.seed);
      s.reservoir_capacity = js.value("reservoir", s.reservoir_capacity);
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    bad(e.what());
  }
}

GenConfig load_gen_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open generator config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_gen_config(ss.str());
}

std::string truth_to_json(const TruthModel& truth) {
  const auto& g = truth.config;
  auto by_class = [&](const auto& values) {
    Json o = Json::object();
    for (std::size_t c = 0; c < g.classes.size(); ++c) o[g.classes[c]] = values[c];
    return o;
  };
  Json vars = Json::array();
  for (const auto& v : g.variables) {
    Json jv{{"name", v.name}};
    switch (v.kind) {
      case GenKind::kCategorical:
        jv["type"] = "categorical";
        jv["outcomes"] = v.outcomes;
        jv["dist"] = by_class(v.dist);
        break;
      case GenKind::kContinuous:
        jv["type"] = "continuous";
        jv["mean"] = by_class(v.mean);
        jv["sd"] = by_class(v.sd);
        break;
      case GenKind::kDependent:
        jv["type"] = "dependent";
        jv["parent"] = v.parent;
        jv["outcomes"] = v.outcomes;
        jv["dist"] = by_class(v.cond);
        break;
      case GenKind::kNoise:
        jv["type"] = "noise";
        jv["outcomes"] = v.outcomes;
        jv["dist"] = v.dist[0];
        break;
      case GenKind::kNoiseContinuous:
        jv["type"] = "noise";
        jv["mean"] = v.mean[0];
        jv["sd"] = v.sd[0];
        break;
    }
    jv["missing"] = v.missing;
    if (v.continuous())
      jv["discretizer"] = v.discretizer == Discretizer::kQuantile ? "quantile" : "entropy";
    vars.push_back(std::move(jv));
  }
  const auto& s = g.schema;
  Json j{{"n", g.n},
         {"seed", g.seed},
         {"class", g.class_name},
         {"classes", g.classes},
         {"prior", g.prior}};
  if (g.group_name) j["group"] = {{"name", *g.group_name}, {"length", g.group_length}};
  j["schema"] = {{"t_prime", s.t_prime},     {"t_field", s.t_field},
                 {"window", s.window},       {"max_parents", s.max_parents},
                 {"max_bins", s.max_bins},   {"smoothing", s.smoothing},
                 {"max_model_cells", s.max_model_cells},
                 {"seed", s.seed},           {"reservoir", s.reservoir_capacity}};
  j["variables"] = std::move(vars);
  return j.dump(2) + "\n";
}

GenerationSummary generate(const GenConfig& g, std::ostream& csv) {
  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<std::size_t> parent_of(g.variables.size(), 0);
  for (std::size_t i = 0; i < g.variables.size(); ++i)
    if (g.variables[i].kind == GenKind::kDependent)
      for (std::size_t p = 0; p < i; ++p)
        if (g.variables[p].name == g.variables[i].parent) parent_of[i] = p;

  if (g.group_name) csv << csv_escape(*g.group_name) << ',';
  for (const auto& v : g.variables) csv << csv_escape(v.name) << ',';
  csv << csv_escape(g.class_name) << '\n';

  GenerationSummary summary;
  std::vector<std::size_t> drawn(g.variables.size(), 0);
  std::vector<std::string> cells(g.variables.size());
  std::string line;
  for (std::uint64_t r = 0; r < g.n; ++r) {
    const std::size_t cls = unit(rng) < g.prior ? 1 : 0;
    for (std::size_t i = 0; i < g.variables.size(); ++i) {
      const auto& v = g.variables[i];
      switch (v.kind) {
        case GenKind::kCategorical:
          drawn[i] = sample(v.dist[cls], unit(rng));
          cells[i] = v.outcomes[drawn[i]];
          break;
        case GenKind::kDependent:
          drawn[i] = sample(v.cond[cls][drawn[parent_of[i]]], unit(rng));
          cells[i] = v.outcomes[drawn[i]];
          break;
        case GenKind::kNoise:
          drawn[i] = sample(v.dist[0], unit(rng));
          cells[i] = v.outcomes[drawn[i]];
          break;
        case GenKind::kContinuous:
          cells[i] = number_text(v.mean[cls] + v.sd[cls] * normal(rng));
          break;
        case GenKind::kNoiseContinuous:
          cells[i] = number_text(v.mean[0] + v.sd[0] * normal(rng));
          break;
      }
    }
    // Missingness is drawn after all values so it never alters the sampling
    // stream of the values themselves.
    for (std::size_t i = 0; i < g.variables.size(); ++i)
      if (unit(rng) < g.variables[i].missing) cells[i] = kMissingToken;

    line.clear();
    if (g.group_name) {
      line += 'g';
      line += std::to_string(r / g.group_length);
      line += ',';
    }
    for (const auto& c : cells) {
      line += c;
      line += ',';
    }
    line += g.classes[cls];
    line += '\n';
    csv << line;
    ++summary.rows;
    summary.positives += cls;
  }
  return summary;
}

GenerationSummary generate_to_dir(const GenConfig& config,
                                  const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create directory '" + dir.string() + "'");
  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write '" + p.string() + "'");
    return out;
  };
  GenerationSummary summary;
  {
    auto out = open(dir / "data.csv");
    summary = generate(config, out);
    if (!out) throw Error(ErrorKind::kIo, "write failed for data.csv");
  }
  open(dir / "schema.txt") << format_schema(config.schema);
  open(dir / "truth.json") << truth_to_json(TruthModel{config});
  return summary;
}

std::vector<double> analytic_posterior(
    const TruthModel& truth,
    const std::vector<std::pair<std::string, std::string>>& record) {
  const auto& g = truth.config;
  std::vector<const std::string*> value(g.variables.size(), nullptr);
  for (const auto& [name, raw] : record) {
    bool found = false;
    for (std::size_t i = 0; i < g.variables.size(); ++i)
      if (g.variables[i].name == name) {
        value[i] = &raw;
        found = true;
      }
    if (!found) throw Error(ErrorKind::kData, "unknown variable '" + name + "'");
  }
  auto observed = [&](std::size_t i) {
    return value[i] != nullptr && *value[i] != kMissingToken;
  };

  const auto prior = truth.class_prior();
  std::vector<double> logp(2);
  for (std::size_t c = 0; c < 2; ++c) logp[c] = std::log(prior[c]);
  for (std::size_t i = 0; i < g.variables.size(); ++i) {
    if (!observed(i)) continue;
    const auto& v = g.variables[i];
    for (std::size_t c = 0; c < 2; ++c) {
      switch (v.kind) {
        case GenKind::kCategorical:
          logp[c] += std::log(v.dist[c][outcome_index(v, *value[i])]);
          break;
        case GenKind::kNoise:
          logp[c] += std::log(v.dist[0][outcome_index(v, *value[i])]);
          break;
        case GenKind::kDependent: {
          const std::size_t x = outcome_index(v, *value[i]);
          std::size_t p = 0;
          while (g.variables[p].name != v.parent) ++p;
          const auto& pv = g.variables[p];
          double lik = 0.0;
          if (observed(p)) {
            lik = v.cond[c][outcome_index(pv, *value[p])][x];
          } else {
            for (std::size_t po = 0; po < pv.outcomes.size(); ++po)
              lik += pv.dist[c][po] * v.cond[c][po][x];
          }
          logp[c] += std::log(lik);
          break;
        }
        case GenKind::kContinuous:
        case GenKind::kNoiseContinuous: {
          double x = 0;
          const auto& s = *value[i];
          auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
          if (ec != std::errc() || ptr != s.data() + s.size())
            throw Error(ErrorKind::kData, "invalid symbol '" + s + "' for variable '" +
                                              v.name + "'");
          const std::size_t k = v.kind == GenKind::kContinuous ? c : 0;
          logp[c] += log_normal_pdf(x, v.mean[k], v.sd[k]);
          break;
        }
      }
    }
  }
  const double m = std::max(logp[0], logp[1]);
  if (!std::isfinite(m))
    throw Error(ErrorKind::kData, "record has zero probability under the truth model");
  const double e0 = std::exp(logp[0] - m), e1 = std::exp(logp[1] - m);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

}  // namespace apri
