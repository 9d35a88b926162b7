#ifndef RSRA_H
#define RSRA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RsraBoundKind {
  RSRA_BOUND_KIND_EXACT = 0,
  /**
   * No logical operator up to the cap; the value is cap + 1.
   */
  RSRA_BOUND_KIND_AT_LEAST = 1,
  /**
   * No nontrivial logical operator at all.
   */
  RSRA_BOUND_KIND_INFINITE = 2,
} RsraBoundKind;

typedef enum RsraExponent {
  RSRA_EXPONENT_D_MINUS_ONE = 0,
  RSRA_EXPONENT_D = 1,
} RsraExponent;

typedef enum RsraStatus {
  RSRA_STATUS_OK = 0,
  RSRA_STATUS_NULL_ARGUMENT = 1,
  RSRA_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed code, path or fixture text.
   */
  RSRA_STATUS_PARSE_ERROR = 3,
  /**
   * Arguments out of range or inconsistent with each other.
   */
  RSRA_STATUS_INVALID_ARGUMENT = 4,
  /**
   * No distance-preserving path within the retry budget, or an endpoint
   * code below the requested distance.
   */
  RSRA_STATUS_SEARCH_FAILED = 5,
  RSRA_STATUS_INTERNAL = 6,
  RSRA_STATUS_PANIC = 7,
} RsraStatus;

/**
 * Opaque stabilizer code.
 */
typedef struct RsraCode RsraCode;

/**
 * Opaque conversion path.
 */
typedef struct RsraPath RsraPath;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *rsra_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *rsra_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void rsra_string_free(char *s);

/**
 * Parses a catalog name (`steane7`, `perfect5`, `shor9`), a
 * `perm(name,cycles)` expression, or code text in the line or JSON format.
 *
 * # Safety
 * `spec` must be a nul-terminated string; `out` must be writable.
 */
enum RsraStatus rsra_code_parse(const char *spec, struct RsraCode **out);

/**
 * # Safety
 * `code` must come from this library and not have been freed. Null is ignored.
 */
void rsra_code_free(struct RsraCode *code);

/**
 * # Safety
 * `code` must be a live handle; `out` must be writable.
 */
enum RsraStatus rsra_code_n(const struct RsraCode *code, size_t *out);

/**
 * # Safety
 * `code` must be a live handle; `out` must be writable.
 */
enum RsraStatus rsra_code_k(const struct RsraCode *code, size_t *out);

/**
 * Least weight of a nontrivial logical operator, searched up to `cap`.
 *
 * # Safety
 * `code` must be a live handle; `kind` and `value` must be writable.
 */
enum RsraStatus rsra_code_distance(const struct RsraCode *code,
                                   size_t cap,
                                   enum RsraBoundKind *kind,
                                   size_t *value);

/**
 * Randomized search for a path from `source` to `target` with `m`
 * ancillas on which every code has distance at least `min_distance`.
 * `out_retry` (may be null) receives the index of the successful draw.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum RsraStatus rsra_search(const struct RsraCode *source,
                            const struct RsraCode *target,
                            size_t m,
                            uint64_t seed,
                            size_t max_retries,
                            size_t min_distance,
                            struct RsraPath **out,
                            size_t *out_retry);

/**
 * Builds the path of a printed table: `table1`, `table2` or `table3`.
 *
 * # Safety
 * `name` must be a nul-terminated string; `out` must be writable.
 */
enum RsraStatus rsra_fixture_path(const char *name, struct RsraPath **out);

/**
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum RsraStatus rsra_path_from_json(const char *json, struct RsraPath **out);

/**
 * # Safety
 * `path` must come from this library and not have been freed. Null is ignored.
 */
void rsra_path_free(struct RsraPath *path);

/**
 * # Safety
 * `path` must be a live handle; `out` must be writable.
 */
enum RsraStatus rsra_path_to_json(const struct RsraPath *path, char **out);

/**
 * # Safety
 * `path` must be a live handle; `out` must be writable.
 */
enum RsraStatus rsra_path_num_steps(const struct RsraPath *path, size_t *out);

/**
 * Checks adjacency of every step and that every code has distance at
 * least `d`.
 *
 * # Safety
 * `path` must be a live handle; `out_pass` must be writable.
 */
enum RsraStatus rsra_path_verify(const struct RsraPath *path, size_t d, bool *out_pass);

/**
 * Runs `trials` seeded trials for each of the `+Z` and `+X` logical states.
 *
 * # Safety
 * `path` must be a live handle; outputs must be writable.
 */
enum RsraStatus rsra_path_simulate(const struct RsraPath *path,
                                   size_t trials,
                                   uint64_t seed,
                                   size_t *out_passed,
                                   size_t *out_total);

/**
 * Number of controlled-Pauli gates in the measurement gadgets.
 *
 * # Safety
 * `path` must be a live handle; `out` must be writable.
 */
enum RsraStatus rsra_path_gate_count(const struct RsraPath *path, size_t *out);

/**
 * Measurement gadgets of the path as JSON.
 *
 * # Safety
 * `path` must be a live handle; `out` must be writable.
 */
enum RsraStatus rsra_path_circuit_json(const struct RsraPath *path, char **out);

/**
 * Rebuilds a printed table and runs its distance, simulation and gate
 * count checks. `out_gates` may be null.
 *
 * # Safety
 * `name` must be a nul-terminated string; `out_pass` must be writable.
 */
enum RsraStatus rsra_reproduce(const char *name, uint64_t seed, bool *out_pass, size_t *out_gates);

/**
 * Upper bound on the probability that a random draw fails, for `n`
 * qubits, `m` ancillas, distance `d` and an exchanged block of size `gc`.
 *
 * # Safety
 * `out` must be writable.
 */
enum RsraStatus rsra_failure_bound(size_t n,
                                   size_t m,
                                   size_t d,
                                   size_t gc,
                                   enum RsraExponent exponent,
                                   double *out);

/**
 * Least `m` whose failure bound is below `epsilon`.
 *
 * # Safety
 * `out` must be writable.
 */
enum RsraStatus rsra_min_ancilla(size_t n,
                                 size_t d,
                                 double epsilon,
                                 enum RsraExponent exponent,
                                 size_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RSRA_H */
