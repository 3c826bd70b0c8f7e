/* texkit C interface. Generated by cbindgen from texkit-ffi; do not edit. */

#ifndef TEXKIT_H
#define TEXKIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a texkit call. Zero means success; anything else is a
 * failure category, with detail available from `txk_last_error_message`.
 */
typedef enum TxkStatus {
  TXK_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  TXK_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  TXK_STATUS_UTF8 = 2,
  /**
   * Filesystem failure.
   */
  TXK_STATUS_IO = 3,
  /**
   * Unreadable or structurally invalid file content.
   */
  TXK_STATUS_FORMAT = 4,
  /**
   * An argument or configuration value is out of range.
   */
  TXK_STATUS_INVALID = 5,
  /**
   * Input data violates a processing precondition.
   */
  TXK_STATUS_DATA = 6,
  /**
   * Numeric failure while fitting a model.
   */
  TXK_STATUS_TRAINING = 7,
  /**
   * An internal panic was caught at the boundary.
   */
  TXK_STATUS_PANIC = 8,
} TxkStatus;

/**
 * Opaque run configuration handle.
 */
typedef struct TxkConfig TxkConfig;

/**
 * Opaque trained-model handle.
 */
typedef struct TxkModel TxkModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string.
 */
const char *txk_version(void);

/**
 * Length of a feature vector.
 */
size_t txk_feature_count(void);

/**
 * Name of feature `index` in table column order, or NULL when out of
 * range. The pointer is static.
 */
const char *txk_feature_name(size_t index);

/**
 * Message for the most recent failure on the calling thread. Empty until
 * a call fails; valid until the next failure on this thread.
 */
const char *txk_last_error_message(void);

/**
 * New configuration with built-in defaults. Free with `txk_config_free`.
 */
struct TxkConfig *txk_config_new(void);

/**
 * Loads a TOML configuration file into `*out`.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum TxkStatus txk_config_load(const char *path, struct TxkConfig **out);

/**
 * Replaces the master seed, re-propagating it to every stage.
 *
 * # Safety
 * `config` must come from `txk_config_new` or `txk_config_load`.
 */
enum TxkStatus txk_config_set_seed(struct TxkConfig *config, uint64_t seed);

/**
 * Releases a configuration handle. NULL is a no-op.
 *
 * # Safety
 * `config` must be unfreed and must not be used afterwards.
 */
void txk_config_free(struct TxkConfig *config);

/**
 * Runs the full pipeline on one image file and writes its
 * `txk_feature_count()` features into `out_features`.
 *
 * # Safety
 * `out_features` must point to at least `txk_feature_count()` doubles.
 */
enum TxkStatus txk_extract_features(const struct TxkConfig *config,
                                    const char *image_path,
                                    double *out_features);

/**
 * Fits classifier `variant` (lr, svm, knn, dt or rf) on a feature table
 * file and stores the handle in `*out`.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be writable.
 */
enum TxkStatus txk_model_train(const struct TxkConfig *config,
                               const char *table_path,
                               const char *variant,
                               struct TxkModel **out);

/**
 * Loads a model file saved by `txk_model_save` or the CLI into `*out`.
 *
 * # Safety
 * `path` must be NUL-terminated; `out` must be writable.
 */
enum TxkStatus txk_model_load(const char *path, struct TxkModel **out);

/**
 * Writes a model to a file readable by `txk_model_load` and the CLI.
 *
 * # Safety
 * `model` must be a live handle; `path` must be NUL-terminated.
 */
enum TxkStatus txk_model_save(const struct TxkModel *model, const char *path);

/**
 * Releases a model handle. NULL is a no-op.
 *
 * # Safety
 * `model` must be unfreed and must not be used afterwards.
 */
void txk_model_free(struct TxkModel *model);

/**
 * Number of classes the model distinguishes; 0 for NULL.
 *
 * # Safety
 * `model` must be NULL or a live handle.
 */
size_t txk_model_class_count(const struct TxkModel *model);

/**
 * Name of class `index`, or NULL when out of range. The pointer stays
 * valid for the lifetime of the model handle.
 *
 * # Safety
 * `model` must be NULL or a live handle.
 */
const char *txk_model_class_name(const struct TxkModel *model, size_t index);

/**
 * Classifies one feature vector of `txk_feature_count()` doubles.
 * `*out_label` receives the class index; when `out_scores` is non-NULL it
 * receives one score per class.
 *
 * # Safety
 * `features` must point to `txk_feature_count()` doubles; `out_scores`,
 * when non-NULL, to `txk_model_class_count(model)` doubles.
 */
enum TxkStatus txk_model_predict(const struct TxkModel *model,
                                 const double *features,
                                 size_t *out_label,
                                 double *out_scores);

/**
 * Runs the pipeline on one image file and classifies it; a composition
 * of `txk_extract_features` and `txk_model_predict`.
 *
 * # Safety
 * As for `txk_extract_features` and `txk_model_predict`.
 */
enum TxkStatus txk_predict_image(const struct TxkConfig *config,
                                 const struct TxkModel *model,
                                 const char *image_path,
                                 size_t *out_label,
                                 double *out_scores);

/**
 * Runs the configured evaluation protocol for `variant` on a feature
 * table file and writes the JSON report to `report_path`.
 *
 * # Safety
 * String arguments must be NUL-terminated.
 */
enum TxkStatus txk_evaluate(const struct TxkConfig *config,
                            const char *table_path,
                            const char *variant,
                            const char *report_path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TEXKIT_H */
