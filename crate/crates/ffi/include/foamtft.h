#ifndef FOAMTFT_H
#define FOAMTFT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes; the numbering matches the command-line exit codes.
typedef enum FtftStatus {
  FTFT_STATUS_OK = 0,
  FTFT_STATUS_VERIFICATION_FAILED = 1,
  FTFT_STATUS_PARSE = 2,
  FTFT_STATUS_IO = 3,
  FTFT_STATUS_MISSING_CLASS = 4,
  FTFT_STATUS_NOT_COMPOSABLE = 5,
  FTFT_STATUS_INVALID_INPUT = 6,
  FTFT_STATUS_DEGENERATE = 7,
  FTFT_STATUS_NULL_ARGUMENT = 8,
  FTFT_STATUS_INVALID_UTF8 = 9,
  FTFT_STATUS_INTERNAL = 70,
} FtftStatus;

// An opaque graph-Cardy-Frobenius theory.
typedef struct FtftTheory FtftTheory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a theory in the text format.
//
// # Safety
// `text_in` is a NUL-terminated string; `out` is writable. On success
// `*out` owns a handle to release with [`ftft_theory_free`].
enum FtftStatus ftft_theory_parse(const char *text_in, struct FtftTheory **out);

// Builds a theory from the text of a cover file (groups, actions, palette
// and working set). With `unverified` nonzero the crosscap checks are not
// enforced.
//
// # Safety
// As [`ftft_theory_parse`].
enum FtftStatus ftft_theory_build(const char *cover_text, int unverified, struct FtftTheory **out);

// Releases a theory. Null is ignored.
//
// # Safety
// `t` is null or a handle not yet freed.
void ftft_theory_free(struct FtftTheory *t);

// Canonical text of the theory.
//
// # Safety
// `t` is a live handle; `out` is writable and receives a string to release
// with [`ftft_string_free`].
enum FtftStatus ftft_theory_serialize(const struct FtftTheory *t, char **out);

// Runs every axiom check. `*all_hold` is set to 1 when all pass and 0
// otherwise; `report` may be null, else it receives the report text.
//
// # Safety
// `t` is a live handle; `all_hold` is writable; `report` is null or writable.
enum FtftStatus ftft_theory_verify(const struct FtftTheory *t, int *all_hold, char **report);

// Evaluates the single film or foam of `surface_text` with the labels of
// `labels_text` (may be null when nothing needs a label). `*value` receives
// the result as `p/q`.
//
// # Safety
// `t` is a live handle; the strings are NUL-terminated or, for
// `labels_text`, null; `value` is writable.
enum FtftStatus ftft_eval(const struct FtftTheory *t,
                          const char *surface_text,
                          const char *labels_text,
                          char **value);

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call into this library.
const char *ftft_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` is null or a string from this library not yet freed.
void ftft_string_free(char *s);

// Library version, a static string.
const char *ftft_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FOAMTFT_H */
