/* C interface to the hoggsim library. Generated by cbindgen; do not edit. */

#ifndef HOGGSIM_H
#define HOGGSIM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of any fallible call.
typedef enum HoggStatus {
  HOGG_STATUS_OK = 0,
  // A required pointer argument was null.
  HOGG_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  HOGG_STATUS_INVALID_UTF8 = 2,
  // Formula text did not parse.
  HOGG_STATUS_PARSE_ERROR = 3,
  // The inputs parsed but name an unsupported or inconsistent problem.
  HOGG_STATUS_DOMAIN_ERROR = 4,
  // A caller buffer had the wrong length.
  HOGG_STATUS_BAD_LENGTH = 5,
  // An index argument was out of range.
  HOGG_STATUS_INDEX_OUT_OF_RANGE = 6,
} HoggStatus;

// A parsed formula. Opaque; release with `hogg_formula_free`.
typedef struct HoggFormula HoggFormula;

// A completed search run. Opaque; release with `hogg_search_free`.
typedef struct HoggSearchResult HoggSearchResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static string; do not free.
const char *hogg_version(void);

// Message from the most recent failure on this thread, empty if none yet.
// The pointer stays valid until the next failing call on the same thread;
// do not free it.
const char *hogg_last_error(void);

// Parse formula text (e.g. "1, -2" or "n=3; 2") into a handle written to
// `out`.
//
// # Safety
// `text` must point to a NUL-terminated string and `out` to writable
// pointer storage.
enum HoggStatus hogg_formula_parse(const char *text, struct HoggFormula **out);

// Release a formula handle. Null is a no-op.
//
// # Safety
// `f` must be null or a pointer from `hogg_formula_parse` not yet freed.
void hogg_formula_free(struct HoggFormula *f);

// Number of variables, or 0 for a null handle.
//
// # Safety
// `f` must be null or a live formula handle.
size_t hogg_formula_var_count(const struct HoggFormula *f);

// Number of clauses, or 0 for a null handle.
//
// # Safety
// `f` must be null or a live formula handle.
size_t hogg_formula_clause_count(const struct HoggFormula *f);

// Write the canonical formula text to `out` as a heap string; release it
// with `hogg_string_free`.
//
// # Safety
// `f` must be a live formula handle and `out` writable pointer storage.
enum HoggStatus hogg_formula_to_text(const struct HoggFormula *f, char **out);

// Release a string produced by this library. Null is a no-op.
//
// # Safety
// `s` must be null or a string pointer this library returned, not yet
// freed.
void hogg_string_free(char *s);

// Run the single-step search and write a result handle to `out`.
//
// # Safety
// `f` must be a live formula handle and `out` writable pointer storage.
enum HoggStatus hogg_search_run(const struct HoggFormula *f, struct HoggSearchResult **out);

// Release a search result handle. Null is a no-op.
//
// # Safety
// `r` must be null or a pointer from `hogg_search_run` not yet freed.
void hogg_search_free(struct HoggSearchResult *r);

// State dimension (2^n), or 0 for a null handle.
//
// # Safety
// `r` must be null or a live result handle.
size_t hogg_search_dim(const struct HoggSearchResult *r);

// Whether the instance was satisfiable 1-SAT with distinct clause
// variables, making the search exact. False for a null handle.
//
// # Safety
// `r` must be null or a live result handle.
bool hogg_search_guaranteed(const struct HoggSearchResult *r);

// Copy the answer-state amplitudes into `out` interleaved as
// re0, im0, re1, im1, ...; `len` must be exactly 2 * dim.
//
// # Safety
// `r` must be a live result handle and `out` must point to `len` writable
// doubles.
enum HoggStatus hogg_search_amplitudes(const struct HoggSearchResult *r, double *out, size_t len);

// Copy the measurement probabilities into `out`; `len` must be exactly dim.
//
// # Safety
// `r` must be a live result handle and `out` must point to `len` writable
// doubles.
enum HoggStatus hogg_search_probabilities(const struct HoggSearchResult *r,
                                          double *out,
                                          size_t len);

// Number of decoded solutions, or 0 for a null handle.
//
// # Safety
// `r` must be null or a live result handle.
size_t hogg_search_solution_count(const struct HoggSearchResult *r);

// Write the basis index of decoded solution `i` to `out`. The bit at
// position n-1-k of the index holds variable k+1.
//
// # Safety
// `r` must be a live result handle and `out` writable u64 storage.
enum HoggStatus hogg_search_solution_index(const struct HoggSearchResult *r,
                                           size_t i,
                                           uint64_t *out);

// Serialize the full result as JSON into a heap string written to `out`;
// release it with `hogg_string_free`.
//
// # Safety
// `r` must be a live result handle and `out` writable pointer storage.
enum HoggStatus hogg_search_to_json(const struct HoggSearchResult *r, char **out);

// Verify every formula on `n` variables; writes how many passed and how
// many exist.
//
// # Safety
// `out_passed` and `out_total` must be writable size_t storage.
enum HoggStatus hogg_sweep(size_t n, size_t *out_passed, size_t *out_total);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOGGSIM_H */
