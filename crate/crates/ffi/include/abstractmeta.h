#ifndef ABSTRACTMETA_H
#define ABSTRACTMETA_H

/* Generated by cbindgen; do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Status codes shared by every entry point.
 */
typedef enum AmfStatus {
  AMF_OK = 0,
  AMF_ERR_NULL_POINTER = 1,
  AMF_ERR_INVALID_UTF8 = 2,
  AMF_ERR_IO = 3,
  AMF_ERR_PARSE = 4,
  AMF_ERR_INVALID_INPUT = 5,
  AMF_ERR_SHAPE = 6,
  AMF_ERR_BUFFER_TOO_SMALL = 7,
  AMF_ERR_CONFIG = 8,
  AMF_ERR_NETWORK = 9,
  AMF_ERR_NUMERIC = 10,
  AMF_ERR_PANIC = 11,
} AmfStatus;

/**
 * A trained network checkpoint.
 */
typedef struct AmfCheckpoint AmfCheckpoint;

/**
 * A loaded classification dataset.
 */
typedef struct AmfDataset AmfDataset;

/**
 * A named meta-feature vector.
 */
typedef struct AmfMetaFeatures AmfMetaFeatures;

/**
 * Posterior masses of a correlated t-test.
 */
typedef struct AmfBayesResult {
  double left;
  double rope;
  double right;
  double mean;
  double sd;
} AmfBayesResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. Valid until
 * the next call on the same thread.
 */
const char *amf_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *amf_version(void);

/**
 * Loads a CSV dataset whose class column is `target`.
 *
 * # Safety
 * `path` and `target` must be NUL-terminated strings; `out` must be writable.
 */
enum AmfStatus amf_dataset_load_csv(const char *path, const char *target, struct AmfDataset **out);

/**
 * Loads an ARFF dataset; a null `target` selects the last nominal attribute.
 *
 * # Safety
 * `path` must be a NUL-terminated string, `target` null or NUL-terminated,
 * and `out` writable.
 */
enum AmfStatus amf_dataset_load_arff(const char *path, const char *target, struct AmfDataset **out);

/**
 * Writes instance, feature and class counts; any out pointer may be null.
 *
 * # Safety
 * `ds` must come from a dataset loader and not yet be freed.
 */
enum AmfStatus amf_dataset_shape(const struct AmfDataset *ds,
                                 size_t *n_instances,
                                 size_t *n_features,
                                 size_t *n_classes);

/**
 * # Safety
 * `ds` must be null or a live handle; it is invalid afterwards.
 */
void amf_dataset_free(struct AmfDataset *ds);

/**
 * Extracts the default meta-feature battery with the given seed.
 *
 * # Safety
 * `ds` must be a live dataset handle and `out` writable.
 */
enum AmfStatus amf_metafeatures_extract(const struct AmfDataset *ds,
                                        uint64_t seed,
                                        struct AmfMetaFeatures **out);

/**
 * Number of meta-features in `mf`; 0 for a null handle.
 *
 * # Safety
 * `mf` must be null or a live handle.
 */
size_t amf_metafeatures_len(const struct AmfMetaFeatures *mf);

/**
 * Copies the values (NaN marks a missing measure) into `buf`. `written`
 * always receives the required length; a short buffer yields
 * `AMF_ERR_BUFFER_TOO_SMALL` without copying.
 *
 * # Safety
 * `mf` must be a live handle, `buf` valid for `capacity` doubles (or null
 * when `capacity` is 0) and `written` writable.
 */
enum AmfStatus amf_metafeatures_values(const struct AmfMetaFeatures *mf,
                                       double *buf,
                                       size_t capacity,
                                       size_t *written);

/**
 * Name of meta-feature `index`, or null when out of range. The string lives
 * as long as `mf`.
 *
 * # Safety
 * `mf` must be null or a live handle.
 */
const char *amf_metafeatures_name(const struct AmfMetaFeatures *mf, size_t index);

/**
 * # Safety
 * `mf` must be null or a live handle; it is invalid afterwards.
 */
void amf_metafeatures_free(struct AmfMetaFeatures *mf);

/**
 * Multiclass AUC from an `n x n_classes` row-major score matrix.
 *
 * # Safety
 * `scores` must hold `n * n_classes` doubles, `labels` `n` entries, and
 * `out` must be writable.
 */
enum AmfStatus amf_auc_multiclass(const double *scores,
                                  size_t n,
                                  size_t n_classes,
                                  const size_t *labels,
                                  double *out);

/**
 * Bayesian correlated t-test on `n` paired differences.
 *
 * # Safety
 * `diffs` must hold `n` doubles and `out` must be writable.
 */
enum AmfStatus amf_bayes_correlated_ttest(const double *diffs,
                                          size_t n,
                                          double rho,
                                          double rope_halfwidth,
                                          struct AmfBayesResult *out);

/**
 * Loads a JSON network checkpoint.
 *
 * # Safety
 * `path` must be NUL-terminated and `out` writable.
 */
enum AmfStatus amf_checkpoint_load(const char *path, struct AmfCheckpoint **out);

/**
 * Input width and latent width of the checkpointed network; either out
 * pointer may be null.
 *
 * # Safety
 * `ckpt` must be a live handle.
 */
enum AmfStatus amf_checkpoint_dims(const struct AmfCheckpoint *ckpt,
                                   size_t *input_dim,
                                   size_t *latent_width);

/**
 * Abstract meta-features for an `n x d` row-major matrix of raw traditional
 * features. The checkpoint's scaler, if any, is applied first. `out` must
 * hold `n * latent_width` doubles.
 *
 * # Safety
 * `x` must hold `n * d` doubles and `out` `capacity` doubles.
 */
enum AmfStatus amf_checkpoint_extract_latent(const struct AmfCheckpoint *ckpt,
                                             const double *x,
                                             size_t n,
                                             size_t d,
                                             double *out,
                                             size_t capacity);

/**
 * # Safety
 * `ckpt` must be null or a live handle; it is invalid afterwards.
 */
void amf_checkpoint_free(struct AmfCheckpoint *ckpt);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ABSTRACTMETA_H */
