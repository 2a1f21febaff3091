#ifndef Z4AP_H
#define Z4AP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum Z4apStatus {
  Z4AP_STATUS_OK = 0,
  Z4AP_STATUS_NULL_POINTER = 1,
  Z4AP_STATUS_INVALID_ARGUMENT = 2,
  Z4AP_STATUS_PARSE_ERROR = 3,
  Z4AP_STATUS_TOO_LARGE = 4,
  Z4AP_STATUS_NOT_PROGRESSION_FREE = 5,
  Z4AP_STATUS_IO_ERROR = 6,
  Z4AP_STATUS_BUFFER_TOO_SMALL = 7,
  Z4AP_STATUS_INTERNAL = 99,
} Z4apStatus;

/**
 * A set of elements of `Z_4^n`.
 */
typedef struct Z4apPointSet Z4apPointSet;

/**
 * Outcome of an exact search.
 */
typedef struct Z4apSearchResult Z4apSearchResult;

/**
 * Rich-coset counts for one epsilon.
 */
typedef struct Z4apRichCosetReport {
  size_t n;
  size_t rich_count;
  /**
   * log2 of the richness threshold.
   */
  double threshold_log2;
  /**
   * log2 of the bound on the number of rich cosets.
   */
  double bound_log2;
  /**
   * The threshold exceeds the coset size.
   */
  bool vacuous;
  /**
   * rich_count is below the bound.
   */
  bool holds;
} Z4apRichCosetReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or NULL. Valid until the
 * next call into this library on the same thread.
 */
const char *z4ap_last_error(void);

/**
 * Parses a set from text in the set file format.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum Z4apStatus z4ap_point_set_parse(const char *text, struct Z4apPointSet **out);

/**
 * Reads a set file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum Z4apStatus z4ap_point_set_read_file(const char *path, struct Z4apPointSet **out);

/**
 * # Safety
 * `set` must come from this library and not have been freed; NULL is ignored.
 */
void z4ap_point_set_free(struct Z4apPointSet *set);

/**
 * Number of elements; 0 for NULL.
 *
 * # Safety
 * `set` must be NULL or a live handle.
 */
size_t z4ap_point_set_len(const struct Z4apPointSet *set);

/**
 * Ambient dimension `n`; 0 for NULL.
 *
 * # Safety
 * `set` must be NULL or a live handle.
 */
size_t z4ap_point_set_dim(const struct Z4apPointSet *set);

/**
 * Copies the digits of element `index` (lexicographic order) into
 * `digits`, which must hold `n` bytes.
 *
 * # Safety
 * `set` must be a live handle; `digits` must point to `cap` writable bytes.
 */
enum Z4apStatus z4ap_point_set_element(const struct Z4apPointSet *set,
                                       size_t index,
                                       uint8_t *digits,
                                       size_t cap);

/**
 * Decides progression-freeness. When the set has a progression and
 * `witness` is non-NULL, the triple `(a, b, c)` with `a + b = 2c` is
 * written there as `3n` digits.
 *
 * # Safety
 * `set` must be a live handle, `result` writable, and `witness` either
 * NULL or `cap` writable bytes.
 */
enum Z4apStatus z4ap_is_progression_free(const struct Z4apPointSet *set,
                                         bool *result,
                                         uint8_t *witness,
                                         size_t cap);

/**
 * The constant `γ` and its maximizer, to tolerance `tol`.
 *
 * # Safety
 * `gamma` must be writable; `eps_star` may be NULL.
 */
enum Z4apStatus z4ap_gamma(double tol, double *gamma, double *eps_star);

/**
 * `4^{γn}`.
 */
double z4ap_theorem_bound(size_t n);

/**
 * `(n + 2) · 4^{γn}`.
 */
double z4ap_finite_bound(size_t n);

/**
 * Exact maximum progression-free set in `Z_4^n` by branch-and-bound.
 *
 * # Safety
 * `out` must be writable.
 */
enum Z4apStatus z4ap_exact_r3(size_t n, uint64_t budget, struct Z4apSearchResult **out);

/**
 * # Safety
 * `r` must be NULL or a live handle.
 */
void z4ap_search_result_free(struct Z4apSearchResult *r);

/**
 * # Safety
 * `r` must be NULL or a live handle.
 */
size_t z4ap_search_result_best_size(const struct Z4apSearchResult *r);

/**
 * Whether the size is proven maximal.
 *
 * # Safety
 * `r` must be NULL or a live handle.
 */
bool z4ap_search_result_exact(const struct Z4apSearchResult *r);

/**
 * # Safety
 * `r` must be NULL or a live handle.
 */
uint64_t z4ap_search_result_nodes(const struct Z4apSearchResult *r);

/**
 * A new set handle holding a copy of the witness.
 *
 * # Safety
 * `r` must be a live handle; `out` must be writable.
 */
enum Z4apStatus z4ap_search_result_witness(const struct Z4apSearchResult *r,
                                           struct Z4apPointSet **out);

/**
 * Rich-coset counts for `ε = eps_num / eps_den`.
 *
 * # Safety
 * `set` must be a live handle; `out` must be writable.
 */
enum Z4apStatus z4ap_rich_coset_report(const struct Z4apPointSet *set,
                                       int64_t eps_num,
                                       int64_t eps_den,
                                       struct Z4apRichCosetReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* Z4AP_H */
