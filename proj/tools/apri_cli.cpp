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

// Command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "apri/apri.h"

namespace {

struct SchemaDeleter {
  void operator()(apri_schema* s) const { apri_schema_free(s); }
};
struct ModelDeleter {
  void operator()(apri_model* m) const { apri_model_free(m); }
};
using SchemaPtr = std::unique_ptr<apri_schema, SchemaDeleter>;
using ModelPtr = std::unique_ptr<apri_model, ModelDeleter>;

// Thrown to abort a command after a failed library call.
struct Failure {
  std::string message;
};

void check(apri_status st, const std::string& context) {
  if (st != APRI_OK)
    throw Failure{context + ": " + apri_status_name(st) + ": " + apri_last_error()};
}

SchemaPtr load_schema(const std::string& path) {
  apri_schema* s = nullptr;
  check(apri_schema_load(path.c_str(), &s), "schema");
  return SchemaPtr(s);
}

ModelPtr load_model(const std::string& path) {
  apri_model* m = nullptr;
  check(apri_model_load(path.c_str(), &m), "model");
  return ModelPtr(m);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<double> parse_grid(const std::string& text) {
  size_t count = 0;
  check(apri_grid_parse(text.c_str(), nullptr, 0, &count), "grid");
  std::vector<double> grid(count);
  check(apri_grid_parse(text.c_str(), grid.data(), grid.size(), &count), "grid");
  return grid;
}

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian network classifier for rare binary outcomes"};
  app.require_subcommand(1);

  std::string config, out_dir;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset from a known network");
  gen->add_option("--config", config, "Generator configuration (JSON)")->required();
  gen->add_option("--out", out_dir, "Output directory")->required();

  std::string schema_path, data_path, out_path;
  auto* train = app.add_subcommand("train", "Train a network model (four data passes)");
  train->add_option("--schema", schema_path, "Schema file")->required();
  train->add_option("--data", data_path, "Training CSV")->required();
  train->add_option("--out", out_path, "Model file to write")->required();

  std::string model_path, positive;
  double threshold = 0.5;
  auto* classify = app.add_subcommand("classify", "Write class posteriors and labels");
  classify->add_option("--model", model_path, "Model file")->required();
  classify->add_option("--data", data_path, "CSV to classify")->required();
  classify->add_option("--threshold", threshold, "Positive-class probability threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->required();
  classify->add_option("--out", out_path, "Classification CSV to write")->required();
  classify->add_option("--positive", positive, "Positive class (default: model's)");

  std::string pred_path, class_column, csv_path;
  std::optional<double> eval_threshold;
  auto* evaluate = app.add_subcommand("evaluate", "F/C/V evaluation of a classification file");
  evaluate->add_option("--pred", pred_path, "Classification CSV")->required();
  evaluate->add_option("--data", data_path, "Data CSV with the actual classes")->required();
  evaluate->add_option("--positive", positive, "Positive class")->required();
  evaluate->add_option("--out", out_path, "Report (JSON, or CSV if it ends in .csv)")
      ->required();
  evaluate->add_option("--class", class_column, "Class column in the data file");
  evaluate->add_option("--schema", schema_path, "Schema naming the class column");
  evaluate->add_option("--threshold", eval_threshold, "Threshold used for the labels");
  evaluate->add_option("--csv", csv_path, "Also write the row as CSV");

  std::string grid_text = "0.10:0.90:0.05";
  auto* sweep = app.add_subcommand("sweep", "Threshold sweep of F/C/V rows");
  sweep->add_option("--model", model_path, "Model file")->required();
  sweep->add_option("--data", data_path, "Labelled CSV")->required();
  sweep->add_option("--grid", grid_text, "Threshold grid a:b:step")->capture_default_str();
  sweep->add_option("--out", out_path, "Report (JSON, or CSV if it ends in .csv)")->required();
  sweep->add_option("--positive", positive, "Positive class (default: model's)");
  sweep->add_option("--csv", csv_path, "Also write the rows as CSV");

  std::string kind, score_path;
  double ridge = 0.0;
  auto* baseline = app.add_subcommand("baseline", "Linear or quadratic discriminant baseline");
  baseline->add_option("--kind", kind, "linear | quadratic")
      ->check(CLI::IsMember({"linear", "quadratic"}))
      ->required();
  baseline->add_option("--schema", schema_path, "Schema file")->required();
  baseline->add_option("--data", data_path, "Training CSV")->required();
  baseline->add_option("--out", out_path, "Classification CSV to write")->required();
  baseline->add_option("--score", score_path, "CSV to classify (default: --data)");
  baseline->add_option("--ridge", ridge, "Ridge added to covariance diagonals")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n\n%s", e.what(), app.help().c_str());
    return 2;
  }

  try {
    if (*gen) {
      apri_gen_summary s{};
      check(apri_generate(config.c_str(), out_dir.c_str(), &s), "gen");
      std::fprintf(stderr, "gen: rows=%llu positives=%llu -> %s\n",
                   static_cast<unsigned long long>(s.rows),
                   static_cast<unsigned long long>(s.positives), out_dir.c_str());
    } else if (*train) {
      auto schema = load_schema(schema_path);
      apri_model* raw = nullptr;
      apri_pass_stats stats{};
      check(apri_train(schema.get(), data_path.c_str(), &raw, &stats), "train");
      ModelPtr model(raw);
      check(apri_model_save(model.get(), out_path.c_str()), "train");
      apri_model_info info{};
      check(apri_model_info_get(model.get(), &info), "train");
      std::fprintf(stderr,
                   "train: passes=%llu rows=%llu rejected=%llu fields=%zu/%zu "
                   "dependencies=%zu -> %s\n",
                   static_cast<unsigned long long>(stats.passes),
                   static_cast<unsigned long long>(stats.rows),
                   static_cast<unsigned long long>(stats.rejected), info.fields,
                   info.candidates, info.dependencies, out_path.c_str());
    } else if (*classify) {
      auto model = load_model(model_path);
      apri_classify_summary s{};
      check(apri_classify_file(model.get(), data_path.c_str(), threshold, opt(positive),
                               out_path.c_str(), &s),
            "classify");
      std::fprintf(stderr,
                   "classify: records=%llu positives=%llu rejected=%llu threshold=%g -> %s\n",
                   static_cast<unsigned long long>(s.records),
                   static_cast<unsigned long long>(s.positives),
                   static_cast<unsigned long long>(s.rejected), threshold,
                   out_path.c_str());
    } else if (*evaluate) {
      std::string column = class_column;
      if (column.empty() && !schema_path.empty()) {
        auto schema = load_schema(schema_path);
        const char* name = nullptr;
        check(apri_schema_class_name(schema.get(), &name), "evaluate");
        column = name;
      }
      const bool as_csv = ends_with(out_path, ".csv");
      apri_fcv_row row{};
      const double t = eval_threshold.value_or(0.0);
      check(apri_evaluate_file(pred_path.c_str(), data_path.c_str(), positive.c_str(),
                               opt(column), eval_threshold ? &t : nullptr,
                               as_csv ? nullptr : out_path.c_str(),
                               as_csv ? out_path.c_str() : opt(csv_path), &row),
            "evaluate");
      std::fprintf(stderr, "evaluate: F=%.2f%% [%llu] C=%.2f%% [%llu] V=%s -> %s\n",
                   row.f_pct, static_cast<unsigned long long>(row.fp), row.c_pct,
                   static_cast<unsigned long long>(row.tp), row.volume, out_path.c_str());
    } else if (*sweep) {
      auto model = load_model(model_path);
      const auto grid = parse_grid(grid_text);
      const bool as_csv = ends_with(out_path, ".csv");
      size_t rows = 0;
      check(apri_sweep_file(model.get(), data_path.c_str(), grid.data(), grid.size(),
                            opt(positive), as_csv ? nullptr : out_path.c_str(),
                            as_csv ? out_path.c_str() : opt(csv_path), &rows),
            "sweep");
      std::fprintf(stderr, "sweep: thresholds=%zu -> %s\n", rows, out_path.c_str());
    } else if (*baseline) {
      auto schema = load_schema(schema_path);
      apri_baseline_summary s{};
      check(apri_baseline_file(kind == "linear" ? APRI_DISCRIMINANT_LINEAR
                                                : APRI_DISCRIMINANT_QUADRATIC,
                               schema.get(), data_path.c_str(), opt(score_path), ridge,
                               out_path.c_str(), &s),
            "baseline");
      std::fprintf(stderr,
                   "baseline: kind=%s n1=%zu n2=%zu dropped=%llu records=%llu "
                   "positives=%llu -> %s\n",
                   kind.c_str(), s.n1, s.n2, static_cast<unsigned long long>(s.dropped),
                   static_cast<unsigned long long>(s.records),
                   static_cast<unsigned long long>(s.positives), out_path.c_str());
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", f.message.c_str());
    return 1;
  }
  return 0;
}
