#ifndef IMPVALS_H
#define IMPVALS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ImpStatus {
  IMP_STATUS_OK = 0,
  IMP_STATUS_NULL_ARGUMENT = 1,
  IMP_STATUS_INVALID_UTF8 = 2,
  IMP_STATUS_PARSE_ERROR = 3,
  IMP_STATUS_UNKNOWN_VARIABLE = 4,
  IMP_STATUS_UNKNOWN_MEASURE = 5,
  IMP_STATUS_LIMIT_EXCEEDED = 6,
  IMP_STATUS_COUNTER_ERROR = 7,
  IMP_STATUS_BUFFER_TOO_SMALL = 8,
  IMP_STATUS_INTERNAL = 9,
} ImpStatus;

/**
 * Opaque handle: a manager and one function in it.
 */
typedef struct ImpSession ImpSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a propositional formula such as `x | (y ^ !z)`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ImpStatus imp_session_from_formula(const char *text, struct ImpSession **out);

/**
 * Parses DIMACS CNF text; variables are named `x1..xn`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ImpStatus imp_session_from_dimacs(const char *text, struct ImpSession **out);

/**
 * # Safety
 * `session` must come from this library and not be used afterwards. NULL is ignored.
 */
void imp_session_free(struct ImpSession *session);

/**
 * Number of variables, 0 for NULL.
 *
 * # Safety
 * `session` must be NULL or a live session.
 */
size_t imp_session_num_vars(const struct ImpSession *session);

/**
 * Largest support the HKR games accept.
 *
 * # Safety
 * `session` must be NULL or a live session.
 */
enum ImpStatus imp_session_set_n_limit(struct ImpSession *session, size_t n_limit);

/**
 * Name of variable `index` (0-based).
 *
 * # Safety
 * `session` must be a live session; `buf` must hold `len` bytes or be NULL.
 */
enum ImpStatus imp_var_name(const struct ImpSession *session,
                            size_t index,
                            char *buf,
                            size_t len,
                            size_t *needed);

/**
 * Index of the variable called `name`.
 *
 * # Safety
 * `session` must be a live session, `name` a NUL-terminated string, `index` valid.
 */
enum ImpStatus imp_var_index(const struct ImpSession *session, const char *name, size_t *index);

/**
 * Importance of variable `index` under `measure` (e.g. `influence`,
 * `blame:exp`, `mblame:frac`, `cgm:dominating:shapley`), written as an exact
 * fraction like `5/8`. Float-valued measures give a decimal.
 *
 * # Safety
 * `session` must be a live session, `measure` a NUL-terminated string, `buf`
 * must hold `len` bytes or be NULL.
 */
enum ImpStatus imp_value(struct ImpSession *session,
                         const char *measure,
                         size_t index,
                         char *buf,
                         size_t len,
                         size_t *needed);

/**
 * Same as [`imp_value`] but as a double.
 *
 * # Safety
 * `session` must be a live session, `measure` a NUL-terminated string, `out` valid.
 */
enum ImpStatus imp_value_f64(struct ImpSession *session,
                             const char *measure,
                             size_t index,
                             double *out);

/**
 * Message of the last failure on this thread. Valid until the next call
 * into the library from this thread.
 */
const char *imp_last_error(void);

const char *imp_status_name(enum ImpStatus status);

const char *imp_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IMPVALS_H */
