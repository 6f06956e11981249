#ifndef OPCALC_H
#define OPCALC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OpcalcStatus {
  OPCALC_STATUS_OK = 0,
  OPCALC_STATUS_MATH_FAILURE = 1,
  OPCALC_STATUS_INPUT_ERROR = 2,
  OPCALC_STATUS_CUTOFF_OVERFLOW = 3,
  OPCALC_STATUS_NULL_POINTER = 4,
  OPCALC_STATUS_PANIC = 5,
} OpcalcStatus;

/**
 * Opaque nonformality certificate.
 */
typedef struct OpcalcCertificate OpcalcCertificate;

/**
 * Opaque E1 dimension table.
 */
typedef struct OpcalcE1Table OpcalcE1Table;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Frees a string returned by this library. Null is a no-op.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void opcalc_string_free(char *s);

/**
 * Message of the last failed call on this thread, or null. Caller frees.
 */
char *opcalc_last_error(void);

/**
 * Runs the CLI in-process. `argv` excludes the program name. The rendered
 * output goes to `*output` (caller frees). Returns the exit code.
 *
 * # Safety
 * `argv` must point to `argc` valid C strings; `output` may be null.
 */
int32_t opcalc_run(uintptr_t argc, const char *const *argv, char **output);

/**
 * Builds the nonformality certificate for `operad` ("S" or "sc").
 *
 * # Safety
 * `operad` is a valid C string, `out` a valid pointer.
 */
enum OpcalcStatus opcalc_certificate_new(const char *operad, struct OpcalcCertificate **out);

/**
 * # Safety
 * `c` is null or a live handle.
 */
void opcalc_certificate_free(struct OpcalcCertificate *c);

/**
 * 1 if every check passed, 0 otherwise (also for null).
 *
 * # Safety
 * `c` is null or a live handle.
 */
int32_t opcalc_certificate_is_nonformal(const struct OpcalcCertificate *c);

/**
 * # Safety
 * `c` is null or a live handle.
 */
uintptr_t opcalc_certificate_check_count(const struct OpcalcCertificate *c);

/**
 * 1 pass, 0 fail, -1 out of range / null.
 *
 * # Safety
 * `c` is null or a live handle.
 */
int32_t opcalc_certificate_check_passed(const struct OpcalcCertificate *c, uintptr_t i);

/**
 * Name of check `i`, or null. Caller frees.
 *
 * # Safety
 * `c` is null or a live handle.
 */
char *opcalc_certificate_check_name(const struct OpcalcCertificate *c, uintptr_t i);

/**
 * Whole certificate as JSON. Caller frees.
 *
 * # Safety
 * `c` is null or a live handle.
 */
char *opcalc_certificate_json(const struct OpcalcCertificate *c);

/**
 * E1 dimension table of Cobar(sc) for (c^k, o^n → out); `out` is 'c' or 'o'.
 *
 * # Safety
 * `table` must be a valid pointer.
 */
enum OpcalcStatus opcalc_e1_table_new(uintptr_t k,
                                      uintptr_t n,
                                      char out,
                                      int64_t min_degree,
                                      int64_t max_degree,
                                      uintptr_t tree_bound,
                                      struct OpcalcE1Table **table);

/**
 * # Safety
 * `t` is null or a live handle.
 */
void opcalc_e1_table_free(struct OpcalcE1Table *t);

/**
 * # Safety
 * `t` is null or a live handle.
 */
uintptr_t opcalc_e1_table_row_count(const struct OpcalcE1Table *t);

/**
 * Reads row `i`. Both routes are reported; they agree by construction.
 *
 * # Safety
 * `t` is null or a live handle; the out pointers are valid.
 */
enum OpcalcStatus opcalc_e1_table_row(const struct OpcalcE1Table *t,
                                      uintptr_t i,
                                      int64_t *degree,
                                      uint64_t *route_trees,
                                      uint64_t *route_cobar);

/**
 * # Safety
 * `t` is null or a live handle.
 */
int64_t opcalc_e1_table_euler(const struct OpcalcE1Table *t);

/**
 * Table as CSV. Caller frees.
 *
 * # Safety
 * `t` is null or a live handle.
 */
char *opcalc_e1_table_csv(const struct OpcalcE1Table *t);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPCALC_H */
