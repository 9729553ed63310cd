#ifndef TSVD_H
#define TSVD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>
#include <stdbool.h>

/**
 * Result code of every fallible call.
 */
typedef enum TsvdStatus {
  TSVD_STATUS_OK = 0,
  TSVD_STATUS_NULL_POINTER = 1,
  TSVD_STATUS_INVALID_ARGUMENT = 2,
  TSVD_STATUS_DIMENSION = 3,
  TSVD_STATUS_FORMAT = 4,
  TSVD_STATUS_IO = 5,
  TSVD_STATUS_NUMERICAL = 6,
  TSVD_STATUS_INFEASIBLE = 7,
  TSVD_STATUS_BUFFER_TOO_SMALL = 8,
  TSVD_STATUS_PANIC = 9,
} TsvdStatus;

/**
 * Compression method selector; values match the serialized method tag.
 */
typedef enum TsvdMethod {
  TSVD_METHOD_SVD = 0,
  TSVD_METHOD_TSVD = 1,
  TSVD_METHOD_TSVD_TUBAL = 2,
} TsvdMethod;

/**
 * Opaque real tensor.
 */
typedef struct TsvdTensor TsvdTensor;

/**
 * Outcome of [`tsvd_compress`].
 */
typedef struct TsvdCompressInfo {
  double ratio;
  double achieved_ratio;
  /**
   * `-INFINITY` for an exact reconstruction.
   */
  double rse_db;
  size_t stored_scalars;
} TsvdCompressInfo;

/**
 * ADMM settings; obtain defaults from [`tsvd_admm_config_default`].
 */
typedef struct TsvdAdmmConfig {
  double rho;
  size_t max_iter;
  double tol_primal;
  double tol_fit;
  bool positivity;
} TsvdAdmmConfig;

/**
 * Outcome of [`tsvd_complete`].
 */
typedef struct TsvdSolveInfo {
  size_t iterations;
  bool converged;
  double final_primal_residual;
} TsvdSolveInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *tsvd_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *tsvd_version(void);

/**
 * Creates a tensor from `numel` column-major values.
 *
 * # Safety
 * `dims` must point to `order` values and `data` to `numel` values.
 */
enum TsvdStatus tsvd_tensor_new(const size_t *dims,
                                size_t order,
                                const double *data,
                                size_t numel,
                                struct TsvdTensor **out);

/**
 * Creates a zero tensor.
 *
 * # Safety
 * `dims` must point to `order` values.
 */
enum TsvdStatus tsvd_tensor_zeros(const size_t *dims, size_t order, struct TsvdTensor **out);

/**
 * Identity tensor of size `n × n × n3`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum TsvdStatus tsvd_tensor_identity(size_t n, size_t n3, struct TsvdTensor **out);

/**
 * Releases a tensor. NULL is ignored.
 *
 * # Safety
 * `t` must come from this library and not be used afterwards.
 */
void tsvd_tensor_free(struct TsvdTensor *t);

/**
 * Number of modes, or 0 for NULL.
 *
 * # Safety
 * `t` must be NULL or a live handle.
 */
size_t tsvd_tensor_order(const struct TsvdTensor *t);

/**
 * Number of entries, or 0 for NULL.
 *
 * # Safety
 * `t` must be NULL or a live handle.
 */
size_t tsvd_tensor_numel(const struct TsvdTensor *t);

/**
 * Copies the extents into `out[0..cap]`.
 *
 * # Safety
 * `out` must point to `cap` writable values.
 */
enum TsvdStatus tsvd_tensor_dims(const struct TsvdTensor *t, size_t *out, size_t cap);

/**
 * Copies the column-major entries into `out[0..cap]`.
 *
 * # Safety
 * `out` must point to `cap` writable values.
 */
enum TsvdStatus tsvd_tensor_copy_data(const struct TsvdTensor *t, double *out, size_t cap);

/**
 * Reads a TSR1 tensor file.
 *
 * # Safety
 * `path` must be a NUL-terminated string.
 */
enum TsvdStatus tsvd_tensor_read(const char *path, struct TsvdTensor **out);

/**
 * Writes a TSR1 tensor file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `t` a live handle.
 */
enum TsvdStatus tsvd_tensor_write(const struct TsvdTensor *t, const char *path);

/**
 * `a ∗ b`.
 *
 * # Safety
 * Handles must be live; `out` must be valid.
 */
enum TsvdStatus tsvd_t_product(const struct TsvdTensor *a,
                               const struct TsvdTensor *b,
                               struct TsvdTensor **out);

/**
 * Tensor transpose of an order-3 tensor.
 *
 * # Safety
 * `a` must be live; `out` must be valid.
 */
enum TsvdStatus tsvd_transpose(const struct TsvdTensor *a, struct TsvdTensor **out);

/**
 * Tensor nuclear norm.
 *
 * # Safety
 * `t` must be live; `out` must be valid.
 */
enum TsvdStatus tsvd_tnn(const struct TsvdTensor *t, double *out);

/**
 * Tensor tubal norm.
 *
 * # Safety
 * `t` must be live; `out` must be valid.
 */
enum TsvdStatus tsvd_ttn(const struct TsvdTensor *t, double *out);

/**
 * Tubal rank with relative tolerance `tol`.
 *
 * # Safety
 * `t` must be live; `out` must be valid.
 */
enum TsvdStatus tsvd_tubal_rank(const struct TsvdTensor *t, double tol, size_t *out);

/**
 * Per-slice ranks, one per frontal slice, copied into `out[0..cap]`.
 *
 * # Safety
 * `t` must be live; `out` must point to `cap` writable values.
 */
enum TsvdStatus tsvd_multi_rank(const struct TsvdTensor *t, double tol, size_t *out, size_t cap);

/**
 * Best tubal-rank-`k` approximation.
 *
 * # Safety
 * `t` must be live; `out` must be valid.
 */
enum TsvdStatus tsvd_truncate(const struct TsvdTensor *t, size_t k, struct TsvdTensor **out);

/**
 * Compresses an order-3 tensor and returns the reconstruction.
 *
 * # Safety
 * `t` must be live; `out` and `info` must be valid (`info` may be NULL).
 */
enum TsvdStatus tsvd_compress(const struct TsvdTensor *t,
                              enum TsvdMethod method,
                              size_t k,
                              struct TsvdTensor **out,
                              struct TsvdCompressInfo *info);

/**
 * Default ADMM settings.
 */
struct TsvdAdmmConfig tsvd_admm_config_default(void);

/**
 * Completes `observed` on the entries where `mask` is 1; `mask` must hold
 * only zeros and ones and share the dims of `observed`. `cfg` may be NULL
 * for defaults and `info` may be NULL.
 *
 * # Safety
 * Handles must be live; pointers must be valid or NULL where allowed.
 */
enum TsvdStatus tsvd_complete(const struct TsvdTensor *observed,
                              const struct TsvdTensor *mask,
                              const struct TsvdAdmmConfig *cfg,
                              struct TsvdTensor **out,
                              struct TsvdSolveInfo *info);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TSVD_H */
