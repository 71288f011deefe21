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

#include "apri/apri.h"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "apri/baselines.hpp"
#include "apri/error.hpp"
#include "apri/eval.hpp"
#include "apri/inference.hpp"
#include "apri/schema_io.hpp"
#include "apri/structure.hpp"
#include "apri/synthgen.hpp"

struct apri_schema {
  apri::Schema schema;
};

struct apri_model {
  apri::NetworkModel model;
};

namespace {

thread_local std::string g_last_error;

apri_status status_for(apri::ErrorKind kind) {
  switch (kind) {
    case apri::ErrorKind::kInvalidArgument: return APRI_ERR_INVALID_ARGUMENT;
    case apri::ErrorKind::kIo: return APRI_ERR_IO;
    case apri::ErrorKind::kParse: return APRI_ERR_PARSE;
    case apri::ErrorKind::kData: return APRI_ERR_DATA;
    case apri::ErrorKind::kTraining: return APRI_ERR_TRAINING;
    case apri::ErrorKind::kSize: return APRI_ERR_SIZE;
    case apri::ErrorKind::kSingular: return APRI_ERR_SINGULAR;
  }
  return APRI_ERR_INTERNAL;
}

template <typename Fn>
apri_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return APRI_OK;
  } catch (const apri::Error& e) {
    g_last_error = e.what();
    return status_for(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown failure";
  }
  return APRI_ERR_INTERNAL;
}

void require(const void* p, const char* what) {
  if (p == nullptr)
    throw apri::Error(apri::ErrorKind::kInvalidArgument, std::string(what) + " is NULL");
}

// Output goes to a sibling temp file that replaces the target on commit, so a
// failed call leaves any existing file alone.
class OutFile {
 public:
  explicit OutFile(const char* path)
      : path_(path), tmp_(std::string(path) + ".partial") {
    stream.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!stream)
      throw apri::Error(apri::ErrorKind::kIo,
                        "cannot write output file '" + std::string(path) + "'");
  }
  ~OutFile() {
    if (!committed_) {
      stream.close();
      std::error_code ec;
      std::filesystem::remove(tmp_, ec);
    }
  }
  OutFile(const OutFile&) = delete;
  OutFile& operator=(const OutFile&) = delete;

  void commit() {
    stream.close();
    if (!stream)
      throw apri::Error(apri::ErrorKind::kIo, "write failed for '" + path_.string() + "'");
    std::error_code ec;
    std::filesystem::rename(tmp_, path_, ec);
    if (ec)
      throw apri::Error(apri::ErrorKind::kIo,
                        "cannot replace '" + path_.string() + "': " + ec.message());
    committed_ = true;
  }

  std::ofstream stream;

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  bool committed_ = false;
};

apri::Dataset open_dataset(const char* path, const apri::Schema& schema) {
  return apri::Dataset(apri::CsvSource::from_file(path), schema);
}

std::uint32_t positive_index(const apri::NetworkModel& m, const char* positive) {
  return positive ? m.class_by_name(positive) : m.positive;
}

void fill_row(const apri::FCVRow& r, apri_fcv_row* out) {
  if (!out) return;
  *out = apri_fcv_row{};
  out->has_threshold = r.threshold.has_value();
  out->threshold = r.threshold.value_or(0.0);
  out->f_pct = r.f_pct;
  out->c_pct = r.c_pct;
  std::strncpy(out->volume, r.volume.c_str(), sizeof(out->volume) - 1);
  out->tp = r.counts.tp;
  out->fp = r.counts.fp;
  out->tn = r.counts.tn;
  out->fn = r.counts.fn;
  out->accuracy = r.accuracy;
}

void write_reports(const apri::ReportMeta& meta, std::span<const apri::FCVRow> rows,
                   const char* out_json, const char* out_csv) {
  if (out_json) {
    OutFile out(out_json);
    out.stream << apri::report_json(meta, rows);
    out.commit();
  }
  if (out_csv) {
    OutFile out(out_csv);
    apri::write_rows_csv(rows, out.stream);
    out.commit();
  }
}

}  // namespace

extern "C" {

const char* apri_last_error(void) { return g_last_error.c_str(); }

const char* apri_status_name(apri_status status) {
  switch (status) {
    case APRI_OK: return "ok";
    case APRI_ERR_INVALID_ARGUMENT: return "invalid argument";
    case APRI_ERR_IO: return "i/o error";
    case APRI_ERR_PARSE: return "parse error";
    case APRI_ERR_DATA: return "data error";
    case APRI_ERR_TRAINING: return "training error";
    case APRI_ERR_SIZE: return "model size error";
    case APRI_ERR_SINGULAR: return "singular covariance";
    case APRI_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

apri_status apri_schema_load(const char* path, apri_schema** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new apri_schema{apri::load_schema(path)};
  });
}

apri_status apri_schema_parse(const char* text, apri_schema** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new apri_schema{apri::parse_schema(text)};
  });
}

void apri_schema_free(apri_schema* schema) { delete schema; }

apri_status apri_schema_class_name(const apri_schema* schema, const char** out) {
  return guarded([&] {
    require(schema, "schema");
    require(out, "out");
    *out = schema->schema.class_var.c_str();
  });
}

apri_status apri_train(const apri_schema* schema, const char* data_path,
                       apri_model** out, apri_pass_stats* stats) {
  return guarded([&] {
    require(schema, "schema");
    require(data_path, "data_path");
    require(out, "out");
    auto ds = open_dataset(data_path, schema->schema);
    auto model = std::make_unique<apri_model>();
    model->model = apri::train(schema->schema, ds);
    if (stats) {
      const auto& t = model->model.training;
      *stats = {t.passes, t.rows, t.rejected, t.nan_missing};
    }
    *out = model.release();
  });
}

apri_status apri_model_save(const apri_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    apri::save_model(model->model, path);
  });
}

apri_status apri_model_load(const char* path, apri_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new apri_model{apri::load_model(path)};
  });
}

void apri_model_free(apri_model* model) { delete model; }

apri_status apri_model_info_get(const apri_model* model, apri_model_info* out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    const auto& m = model->model;
    out->classes = m.outcomes.classes.size();
    out->candidates = m.field_scores.size();
    out->fields = m.nodes.size();
    out->dependencies = m.dependencies.size();
    out->training = {m.training.passes, m.training.rows, m.training.rejected,
                     m.training.nan_missing};
  });
}

apri_status apri_model_class_name(const apri_model* model, size_t index,
                                  const char** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    const auto& classes = model->model.outcomes.classes;
    if (index >= classes.size())
      throw apri::Error(apri::ErrorKind::kInvalidArgument, "class index out of range");
    *out = classes[index].c_str();
  });
}

apri_status apri_posterior(const apri_model* model, const char* const* names,
                           const char* const* values, size_t count, double* probs,
                           size_t probs_len) {
  return guarded([&] {
    require(model, "model");
    require(probs, "probs");
    if (count > 0) {
      require(names, "names");
      require(values, "values");
    }
    const auto& m = model->model;
    if (probs_len != m.outcomes.classes.size())
      throw apri::Error(apri::ErrorKind::kInvalidArgument,
                        "probs must hold one entry per class");
    std::vector<std::pair<std::string, std::string>> pairs;
    for (size_t i = 0; i < count; ++i) {
      require(names[i], "name");
      require(values[i], "value");
      pairs.emplace_back(names[i], values[i]);
    }
    const auto post = apri::posterior(m, apri::make_case(m, pairs));
    std::copy(post.probs.begin(), post.probs.end(), probs);
  });
}

apri_status apri_classify_file(const apri_model* model, const char* data_path,
                               double threshold, const char* positive,
                               const char* out_path, apri_classify_summary* summary) {
  return guarded([&] {
    require(model, "model");
    require(data_path, "data_path");
    require(out_path, "out_path");
    const auto& m = model->model;
    const auto pos = positive_index(m, positive);
    auto ds = open_dataset(data_path, m.schema);
    OutFile out(out_path);
    const auto s = apri::write_classifications(m, ds, threshold, pos, out.stream);
    out.commit();
    if (summary) *summary = {s.records, s.positives, s.rejected};
  });
}

apri_status apri_evaluate_file(const char* pred_path, const char* data_path,
                               const char* positive, const char* class_column,
                               const double* threshold, const char* out_json,
                               const char* out_csv, apri_fcv_row* row) {
  return guarded([&] {
    require(pred_path, "pred_path");
    require(data_path, "data_path");
    require(positive, "positive");
    apri::EvaluateOptions opts;
    opts.positive = positive;
    if (class_column) opts.class_column = class_column;
    if (threshold) opts.threshold = *threshold;
    const auto ev = apri::evaluate_files(pred_path, data_path, opts);
    apri::ReportMeta meta;
    meta.dataset = data_path;
    meta.predictions = pred_path;
    meta.positive = positive;
    if (threshold) meta.grid = {*threshold};
    write_reports(meta, std::span<const apri::FCVRow>(&ev.row, 1), out_json, out_csv);
    fill_row(ev.row, row);
  });
}

apri_status apri_grid_parse(const char* text, double* grid, size_t capacity,
                            size_t* count) {
  return guarded([&] {
    require(text, "text");
    require(count, "count");
    const auto g = apri::parse_grid(text);
    *count = g.size();
    if (grid) {
      if (capacity < g.size())
        throw apri::Error(apri::ErrorKind::kInvalidArgument, "grid buffer too small");
      std::copy(g.begin(), g.end(), grid);
    }
  });
}

apri_status apri_sweep_file(const apri_model* model, const char* data_path,
                            const double* grid, size_t grid_len, const char* positive,
                            const char* out_json, const char* out_csv, size_t* rows) {
  return guarded([&] {
    require(model, "model");
    require(data_path, "data_path");
    require(grid, "grid");
    const auto& m = model->model;
    const auto pos = positive_index(m, positive);
    auto ds = open_dataset(data_path, m.schema);
    const std::span<const double> g(grid, grid_len);
    const auto result = apri::sweep_dataset(m, ds, g, pos);
    apri::ReportMeta meta;
    meta.dataset = data_path;
    meta.positive = m.outcomes.classes[pos];
    meta.grid.assign(g.begin(), g.end());
    write_reports(meta, result.rows, out_json, out_csv);
    if (rows) *rows = result.rows.size();
  });
}

apri_status apri_baseline_file(apri_discriminant kind, const apri_schema* schema,
                               const char* train_path, const char* score_path,
                               double ridge, const char* out_path,
                               apri_baseline_summary* summary) {
  return guarded([&] {
    require(schema, "schema");
    require(train_path, "train_path");
    require(out_path, "out_path");
    if (kind != APRI_DISCRIMINANT_LINEAR && kind != APRI_DISCRIMINANT_QUADRATIC)
      throw apri::Error(apri::ErrorKind::kInvalidArgument, "unknown discriminant kind");
    auto train = open_dataset(train_path, schema->schema);
    auto score = open_dataset(score_path ? score_path : train_path, schema->schema);
    OutFile out(out_path);
    const auto s = apri::run_baseline(
        schema->schema, train, score,
        kind == APRI_DISCRIMINANT_LINEAR ? apri::DiscriminantKind::kLinear
                                         : apri::DiscriminantKind::kQuadratic,
        ridge, out.stream);
    out.commit();
    if (summary) *summary = {s.n1, s.n2, s.dropped, s.records, s.positives};
  });
}

apri_status apri_generate(const char* config_path, const char* out_dir,
                          apri_gen_summary* summary) {
  return guarded([&] {
    require(config_path, "config_path");
    require(out_dir, "out_dir");
    const auto s = apri::generate_to_dir(apri::load_gen_config(config_path), out_dir);
    if (summary) *summary = {s.rows, s.positives};
  });
}

}  // extern "C"
