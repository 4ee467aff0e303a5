#ifndef LAZYRULES_H
#define LAZYRULES_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Values for [`LrParams::mode`].
#define LR_MODE_EXACT 0

#define LR_MODE_LEVELS 1

#define LR_MODE_LEVELS_ALL 2

typedef enum LrStatus {
  LR_STATUS_OK = 0,
  LR_STATUS_NULL_POINTER = 1,
  LR_STATUS_INVALID_UTF8 = 2,
  LR_STATUS_IO = 3,
  LR_STATUS_PARSE = 4,
  LR_STATUS_INVALID_PARAMETER = 5,
  LR_STATUS_OUT_OF_RANGE = 6,
  LR_STATUS_DATA = 7,
  LR_STATUS_PANIC = 8,
} LrStatus;

// A parsed dataset.
typedef struct LrDataset LrDataset;

// One prediction with its accepted rules rendered as text.
typedef struct LrPrediction LrPrediction;

// A finished evaluation.
typedef struct LrReport LrReport;

// Search and encoding parameters. Start from [`lr_params_default`].
typedef struct LrParams {
  double lambda;
  double c_min;
  double c_min_mism;
  uint32_t max_terms;
  double kappa;
  double eps;
  // One of the `LR_MODE_*` values.
  uint32_t mode;
} LrParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Default parameters: level encoding, λ 0.75, c_min 0.08, c_min_mism
// 0.02, 8 terms, κ 0.98, ε 0.
struct LrParams lr_params_default(void);

// Message for the last failing call on this thread, or null after a
// successful one. Valid until the next call on this thread.
const char *lr_last_error_message(void);

// # Safety
// `s` must be null or a string returned by this library.
void lr_string_free(char *s);

// Parses CSV text against schema text.
//
// # Safety
// `csv` and `schema` must be NUL-terminated; `out` must be writable.
enum LrStatus lr_dataset_parse(const char *csv, const char *schema, struct LrDataset **out);

// Reads and parses a CSV file and its schema file.
//
// # Safety
// Paths must be NUL-terminated; `out` must be writable.
enum LrStatus lr_dataset_load(const char *csv_path,
                              const char *schema_path,
                              struct LrDataset **out);

// # Safety
// `d` must be null or a handle from this library, not yet freed.
void lr_dataset_free(struct LrDataset *d);

// # Safety
// `d` must be a live dataset handle; `out` must be writable.
enum LrStatus lr_dataset_rows(const struct LrDataset *d, size_t *out);

// Name of class 0 (the first declared value) or class 1, as an owned string.
//
// # Safety
// `d` must be a live dataset handle; `out` must be writable.
enum LrStatus lr_dataset_class_name(const struct LrDataset *d, uint32_t class_index, char **out);

// Predicts row `row` of `d` from every other labeled row. A null
// `params` means the defaults.
//
// # Safety
// `d` must be a live dataset handle; `params` null or valid; `out` writable.
enum LrStatus lr_predict_row(const struct LrDataset *d,
                             size_t row,
                             const struct LrParams *params,
                             struct LrPrediction **out);

// Predicts row `row` of `test` from every labeled row of `train`. The two
// datasets must share a schema.
//
// # Safety
// Handles must be live; `params` null or valid; `out` writable.
enum LrStatus lr_predict_with(const struct LrDataset *train,
                              const struct LrDataset *test,
                              size_t row,
                              const struct LrParams *params,
                              struct LrPrediction **out);

// # Safety
// `p` must be null or a handle from this library, not yet freed.
void lr_prediction_free(struct LrPrediction *p);

// Predicted class: 0 for the first declared class value, 1 for the other.
//
// # Safety
// `p` must be a live prediction handle; `out` must be writable.
enum LrStatus lr_prediction_class(const struct LrPrediction *p, uint32_t *out);

// # Safety
// `p` must be a live prediction handle; `out` must be writable.
enum LrStatus lr_prediction_probability(const struct LrPrediction *p, double *out);

// Writes 1 when the class prior decided, 0 when the combined rule did.
//
// # Safety
// `p` must be a live prediction handle; `out` must be writable.
enum LrStatus lr_prediction_is_fallback(const struct LrPrediction *p, int32_t *out);

// # Safety
// `p` must be a live prediction handle; `out` must be writable.
enum LrStatus lr_prediction_rule_count(const struct LrPrediction *p, size_t *out);

// Accepted rule `index` as text. The string belongs to the handle and
// lives as long as it does.
//
// # Safety
// `p` must be a live prediction handle; `out` must be writable.
enum LrStatus lr_prediction_rule(const struct LrPrediction *p, size_t index, const char **out);

// Stratified k-fold cross-validation.
//
// # Safety
// `d` must be a live dataset handle; `params` null or valid; `out` writable.
enum LrStatus lr_evaluate_cv(const struct LrDataset *d,
                             const struct LrParams *params,
                             uint32_t folds,
                             uint64_t seed,
                             struct LrReport **out);

// Leave-one-out over every row. Datasets above `cap` rows are refused
// unless `force` is nonzero.
//
// # Safety
// `d` must be a live dataset handle; `params` null or valid; `out` writable.
enum LrStatus lr_evaluate_loocv(const struct LrDataset *d,
                                const struct LrParams *params,
                                size_t cap,
                                int32_t force,
                                struct LrReport **out);

// # Safety
// Handles must be live; `params` null or valid; `out` writable.
enum LrStatus lr_evaluate_train_test(const struct LrDataset *train,
                                     const struct LrDataset *test,
                                     const struct LrParams *params,
                                     struct LrReport **out);

// # Safety
// `r` must be null or a handle from this library, not yet freed.
void lr_report_free(struct LrReport *r);

// # Safety
// `r` must be a live report handle; `out` must be writable.
enum LrStatus lr_report_correctness(const struct LrReport *r, double *out);

// Confusion counts as `t[actual][predicted]`, index 0 = first declared
// class, written row-major into `out[4]`.
//
// # Safety
// `r` must be a live report handle; `out` must hold four values.
enum LrStatus lr_report_confusion(const struct LrReport *r, uint64_t *out);

// Mean search nodes per test row.
//
// # Safety
// `r` must be a live report handle; `out` must be writable.
enum LrStatus lr_report_mean_nodes(const struct LrReport *r, double *out);

// The full text report, as an owned string.
//
// # Safety
// `r` must be a live report handle; `out` must be writable.
enum LrStatus lr_report_render(const struct LrReport *r, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LAZYRULES_H */
