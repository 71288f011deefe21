/* Copyright 2026 The APRI Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *     http://www.apache.org/licenses/LICENSE-2.0
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef APRI_APRI_H_
#define APRI_APRI_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(APRI_BUILDING_LIBRARY)
#    define APRI_API __declspec(dllexport)
#  else
#    define APRI_API __declspec(dllimport)
#  endif
#else
#  define APRI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Opaque handles. */
typedef struct apri_schema apri_schema;
typedef struct apri_model apri_model;

typedef enum apri_status {
  APRI_OK = 0,
  APRI_ERR_INVALID_ARGUMENT = 1,
  APRI_ERR_IO = 2,
  APRI_ERR_PARSE = 3,
  APRI_ERR_DATA = 4,
  APRI_ERR_TRAINING = 5,
  APRI_ERR_SIZE = 6,
  APRI_ERR_SINGULAR = 7,
  APRI_ERR_INTERNAL = 99
} apri_status;

typedef enum apri_discriminant {
  APRI_DISCRIMINANT_LINEAR = 0,
  APRI_DISCRIMINANT_QUADRATIC = 1
} apri_discriminant;

typedef struct apri_pass_stats {
  uint64_t passes;
  uint64_t rows;
  uint64_t rejected;
  uint64_t nan_missing;
} apri_pass_stats;

typedef struct apri_model_info {
  size_t classes;
  size_t candidates;    /* field nodes scored against the class */
  size_t fields;        /* selected field nodes */
  size_t dependencies;  /* field-to-field edges */
  apri_pass_stats training;
} apri_model_info;

typedef struct apri_classify_summary {
  uint64_t records;
  uint64_t positives;
  uint64_t rejected;
} apri_classify_summary;

typedef struct apri_fcv_row {
  int has_threshold;
  double threshold;
  double f_pct;
  double c_pct;
  char volume[32];
  uint64_t tp, fp, tn, fn;
  double accuracy;
} apri_fcv_row;

typedef struct apri_baseline_summary {
  size_t n1, n2;
  uint64_t dropped;
  uint64_t records;
  uint64_t positives;
} apri_baseline_summary;

typedef struct apri_gen_summary {
  uint64_t rows;
  uint64_t positives;
} apri_gen_summary;

/* Message for the last failed call on this thread ("" if none). */
APRI_API const char* apri_last_error(void);
APRI_API const char* apri_status_name(apri_status status);

APRI_API apri_status apri_schema_load(const char* path, apri_schema** out);
APRI_API apri_status apri_schema_parse(const char* text, apri_schema** out);
APRI_API void apri_schema_free(apri_schema* schema);
/* Name of the class column; lives as long as the schema. */
APRI_API apri_status apri_schema_class_name(const apri_schema* schema,
                                            const char** out);

/* Four-pass training. stats may be NULL. */
APRI_API apri_status apri_train(const apri_schema* schema, const char* data_path,
                                apri_model** out, apri_pass_stats* stats);
APRI_API apri_status apri_model_save(const apri_model* model, const char* path);
APRI_API apri_status apri_model_load(const char* path, apri_model** out);
APRI_API void apri_model_free(apri_model* model);
APRI_API apri_status apri_model_info_get(const apri_model* model,
                                         apri_model_info* out);
/* The returned string lives as long as the model. */
APRI_API apri_status apri_model_class_name(const apri_model* model, size_t index,
                                           const char** out);

/* Posterior for one case given (node name, raw value) pairs. probs must hold
 * one entry per class, in model class order. */
APRI_API apri_status apri_posterior(const apri_model* model,
                                    const char* const* names,
                                    const char* const* values, size_t count,
                                    double* probs, size_t probs_len);

/* Writes the classification CSV. positive may be NULL for the model default. */
APRI_API apri_status apri_classify_file(const apri_model* model,
                                        const char* data_path, double threshold,
                                        const char* positive, const char* out_path,
                                        apri_classify_summary* summary);

/* Compares a classification CSV with a data file. class_column and threshold
 * may be NULL; out_json and out_csv may each be NULL. */
APRI_API apri_status apri_evaluate_file(const char* pred_path, const char* data_path,
                                        const char* positive,
                                        const char* class_column,
                                        const double* threshold,
                                        const char* out_json, const char* out_csv,
                                        apri_fcv_row* row);

/* Parses "a:b:step". With grid == NULL only count is filled. */
APRI_API apri_status apri_grid_parse(const char* text, double* grid,
                                     size_t capacity, size_t* count);

APRI_API apri_status apri_sweep_file(const apri_model* model, const char* data_path,
                                     const double* grid, size_t grid_len,
                                     const char* positive, const char* out_json,
                                     const char* out_csv, size_t* rows);

/* Fits on train_path and scores score_path (train_path when NULL). */
APRI_API apri_status apri_baseline_file(apri_discriminant kind,
                                        const apri_schema* schema,
                                        const char* train_path,
                                        const char* score_path, double ridge,
                                        const char* out_path,
                                        apri_baseline_summary* summary);

/* Writes data.csv, schema.txt and truth.json into out_dir. */
APRI_API apri_status apri_generate(const char* config_path, const char* out_dir,
                                   apri_gen_summary* summary);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* APRI_APRI_H_ */
