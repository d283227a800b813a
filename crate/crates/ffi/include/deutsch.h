#ifndef DEUTSCH_FFI_H
#define DEUTSCH_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum DeutschStatus {
  DEUTSCH_STATUS_OK = 0,
  DEUTSCH_STATUS_NULL_POINTER = 1,
  DEUTSCH_STATUS_INVALID_UTF8 = 2,
  DEUTSCH_STATUS_LAYOUT = 3,
  DEUTSCH_STATUS_DEGENERATE_STATE = 4,
  DEUTSCH_STATUS_NOT_NORMALIZED = 5,
  DEUTSCH_STATUS_NOT_UNITARY = 6,
  DEUTSCH_STATUS_DOMAIN = 7,
  DEUTSCH_STATUS_INCOMPLETE_ORACLE = 8,
  DEUTSCH_STATUS_IMPOSSIBLE_OUTCOME = 9,
  DEUTSCH_STATUS_PROMISE_VIOLATION = 10,
  DEUTSCH_STATUS_NOT_BLOCK_DIAGONAL = 11,
  DEUTSCH_STATUS_STRUCTURE = 12,
  DEUTSCH_STATUS_FORMAT = 13,
  DEUTSCH_STATUS_BUFFER_TOO_SMALL = 14,
  DEUTSCH_STATUS_PANIC = 15,
} DeutschStatus;

typedef enum DeutschClass {
  DEUTSCH_CLASS_CONSTANT = 0,
  DEUTSCH_CLASS_BALANCED = 1,
  DEUTSCH_CLASS_NEITHER = 2,
} DeutschClass;

/**
 * Opaque pure state.
 */
typedef struct DeutschState DeutschState;

/**
 * Opaque four-stage trace of one run.
 */
typedef struct DeutschTrace DeutschTrace;

/**
 * Readout of a quantum run.
 */
typedef struct DeutschVerdict {
  uint8_t outcome_bit;
  enum DeutschClass classification;
  uintptr_t evaluations_used;
} DeutschVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *deutsch_version(void);

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call into the library on this thread.
 */
const char *deutsch_last_error_message(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void deutsch_string_free(char *s);

/**
 * Basis state `label` (bits in layout order) on `layout`.
 *
 * # Safety
 * `layout` and `label` must be NUL-terminated strings; `out` must be writable.
 */
enum DeutschStatus deutsch_state_basis(const char *layout,
                                       const char *label,
                                       struct DeutschState **out);

/**
 * State from `len` = 2^qubits amplitudes split into real and imaginary arrays.
 *
 * # Safety
 * `re` and `im` must each point to `len` doubles.
 */
enum DeutschStatus deutsch_state_from_amplitudes(const char *layout,
                                                 const double *re,
                                                 const double *im,
                                                 uintptr_t len,
                                                 struct DeutschState **out);

/**
 * # Safety
 * `state` must be NULL or a handle from this library not yet freed.
 */
void deutsch_state_free(struct DeutschState *state);

/**
 * Number of amplitudes (2^qubits), or 0 for NULL.
 *
 * # Safety
 * `state` must be NULL or a live handle.
 */
uintptr_t deutsch_state_dim(const struct DeutschState *state);

/**
 * Copies amplitudes into `re` / `im`, each of capacity `len`.
 *
 * # Safety
 * `re` and `im` must each have room for `len` doubles.
 */
enum DeutschStatus deutsch_state_amplitudes(const struct DeutschState *state,
                                            double *re,
                                            double *im,
                                            uintptr_t len);

/**
 * Applies a `dim` x `dim` row-major unitary to `targets` and returns a new state.
 *
 * # Safety
 * `re`/`im` must hold `dim*dim` doubles and `targets` `ntargets` entries.
 */
enum DeutschStatus deutsch_state_apply(const struct DeutschState *state,
                                       const double *re,
                                       const double *im,
                                       uintptr_t dim,
                                       const uintptr_t *targets,
                                       uintptr_t ntargets,
                                       struct DeutschState **out);

/**
 * Born probability of `outcome` on `register`.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` writable.
 */
enum DeutschStatus deutsch_state_probability(const struct DeutschState *state,
                                             const char *register_,
                                             const char *outcome,
                                             double *out);

/**
 * Projects `register` onto `outcome`; writes the probability and the
 * renormalized post-measurement state.
 *
 * # Safety
 * String arguments must be NUL-terminated; out-parameters writable.
 */
enum DeutschStatus deutsch_state_measure(const struct DeutschState *state,
                                         const char *register_,
                                         const char *outcome,
                                         double *out_probability,
                                         struct DeutschState **out_state);

/**
 * Seeded sampling; writes a JSON object `{outcome: count}`.
 *
 * # Safety
 * `register` must be NUL-terminated; `out_json` writable.
 */
enum DeutschStatus deutsch_state_sample(const struct DeutschState *state,
                                        const char *register_,
                                        uintptr_t shots,
                                        uint64_t seed,
                                        char **out_json);

/**
 * Reduced density matrix of `register`, row-major into `re`/`im` of capacity `len`.
 * Writes the matrix dimension to `out_dim`.
 *
 * # Safety
 * `re` and `im` must have room for `len` doubles.
 */
enum DeutschStatus deutsch_state_partial_trace(const struct DeutschState *state,
                                               const char *register_,
                                               double *re,
                                               double *im,
                                               uintptr_t len,
                                               uintptr_t *out_dim);

/**
 * State dump JSON (nonzero amplitudes, 15 significant digits).
 *
 * # Safety
 * `stage` must be NUL-terminated; `out_json` writable.
 */
enum DeutschStatus deutsch_state_to_json(const struct DeutschState *state,
                                         const char *stage,
                                         char **out_json);

/**
 * Rebuilds a state from a dump.
 *
 * # Safety
 * `json` must be NUL-terminated; `out` writable.
 */
enum DeutschStatus deutsch_state_from_json(const char *json, struct DeutschState **out);

/**
 * Runs the algorithm for `setting` ("00".."11") with the argument register
 * prepared in `initial_a`.
 *
 * # Safety
 * `setting` must be NUL-terminated; out-parameters writable.
 */
enum DeutschStatus deutsch_run(const char *setting,
                               uint8_t initial_a,
                               struct DeutschTrace **out_trace,
                               struct DeutschVerdict *out_verdict);

/**
 * Runs the algorithm with the setting register in uniform superposition.
 *
 * # Safety
 * `out_trace` must be writable.
 */
enum DeutschStatus deutsch_run_superposed(uint8_t initial_a, struct DeutschTrace **out_trace);

/**
 * Copy of stage `index` (0 input, 1 after H_A, 2 after H_f, 3 after the second H_A).
 *
 * # Safety
 * `trace` must be a live handle; `out` writable.
 */
enum DeutschStatus deutsch_trace_stage(const struct DeutschTrace *trace,
                                       uintptr_t index,
                                       struct DeutschState **out);

/**
 * Oracle applications recorded by the run, or 0 for NULL.
 *
 * # Safety
 * `trace` must be NULL or a live handle.
 */
uintptr_t deutsch_trace_oracle_applications(const struct DeutschTrace *trace);

/**
 * # Safety
 * `trace` must be NULL or a handle from this library not yet freed.
 */
void deutsch_trace_free(struct DeutschTrace *trace);

/**
 * Constant / balanced / neither for `len` values in {0, 1}.
 *
 * # Safety
 * `values` must point to `len` bytes.
 */
enum DeutschClass deutsch_classify(const uint8_t *values, uintptr_t len);

/**
 * Deutsch-Jozsa on the truth table `values` (length 2^n, n <= 8).
 *
 * # Safety
 * `values` must point to `len` bytes; `out` writable.
 */
enum DeutschStatus deutsch_jozsa(const uint8_t *values, uintptr_t len, struct DeutschVerdict *out);

/**
 * Worst-case classical query count for `n` argument bits.
 *
 * # Safety
 * `out` must be writable.
 */
enum DeutschStatus deutsch_classical_query_count(uint32_t n, uint64_t *out);

/**
 * Runs every self-check. Writes the failure count and, when `out_json` is
 * not NULL, the per-check report.
 *
 * # Safety
 * `out_failed` must be writable; `out_json` NULL or writable.
 */
enum DeutschStatus deutsch_verify(uintptr_t *out_failed, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEUTSCH_FFI_H */
