#ifndef SHAPCIRC_H
#define SHAPCIRC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a `shapcirc_*` call.
 */
typedef enum ShapcircStatus {
  /**
   * Success; any `out` parameter has been written.
   */
  SHAPCIRC_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  SHAPCIRC_STATUS_NULL_ARGUMENT = 1,
  /**
   * The input failed to parse or validate; see `shapcirc_last_error`.
   */
  SHAPCIRC_STATUS_INVALID_INPUT = 2,
  /**
   * An internal invariant failed; see `shapcirc_last_error`.
   */
  SHAPCIRC_STATUS_PANIC = 3,
} ShapcircStatus;

/**
 * Coefficient family used when scoring a variable.
 */
typedef enum ShapcircCoefficient {
  /**
   * `c(k, ℓ) = 1/(k·C(k−1, ℓ))`.
   */
  SHAPCIRC_COEFFICIENT_SHAPLEY = 0,
  /**
   * `c(k, ℓ) = 1`.
   */
  SHAPCIRC_COEFFICIENT_BANZHAF = 1,
  /**
   * `c(k, ℓ) = 2^(1−k)`.
   */
  SHAPCIRC_COEFFICIENT_PENROSE = 2,
} ShapcircCoefficient;

/**
 * Opaque handle to a parsed deterministic-decomposable circuit.
 */
typedef struct ShapcircCircuit ShapcircCircuit;

/**
 * Opaque handle to a variable-probability assignment.
 */
typedef struct ShapcircProbabilities ShapcircProbabilities;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; never freed by the caller.
 */
const char *shapcirc_version(void);

/**
 * Message for the most recent error on this thread (empty after a
 * success). The pointer stays valid until the next `shapcirc_*` call on
 * the same thread; never freed by the caller.
 */
const char *shapcirc_last_error(void);

/**
 * Parse a circuit from its text format into a fresh handle.
 *
 * # Safety
 * `text` must be NUL-terminated; `out` must be a valid pointer.
 */
enum ShapcircStatus shapcirc_circuit_parse(const char *text, struct ShapcircCircuit **out);

/**
 * Release a circuit handle (null is a no-op).
 *
 * # Safety
 * `c` must come from [`shapcirc_circuit_parse`] and not be freed twice.
 */
void shapcirc_circuit_free(struct ShapcircCircuit *c);

/**
 * Number of variables in the circuit's universe.
 *
 * # Safety
 * `c` must be a live circuit handle; `out` must be a valid pointer.
 */
enum ShapcircStatus shapcirc_circuit_num_vars(const struct ShapcircCircuit *c, uint32_t *out);

/**
 * Parse a probability assignment (one `<var> <value>` pair per line).
 *
 * # Safety
 * `text` must be NUL-terminated; `out` must be a valid pointer.
 */
enum ShapcircStatus shapcirc_probabilities_parse(const char *text,
                                                 struct ShapcircProbabilities **out);

/**
 * Release a probabilities handle (null is a no-op).
 *
 * # Safety
 * `p` must come from [`shapcirc_probabilities_parse`] and not be freed
 * twice.
 */
void shapcirc_probabilities_free(struct ShapcircProbabilities *p);

/**
 * Expected value of the circuit, rounded to the nearest double.
 *
 * # Safety
 * `c` and `p` must be live handles; `out` must be a valid pointer.
 */
enum ShapcircStatus shapcirc_ev(const struct ShapcircCircuit *c,
                                const struct ShapcircProbabilities *p,
                                double *out);

/**
 * Expected value of the circuit as an exact `"numerator/denominator"`
 * string owned by the caller.
 *
 * # Safety
 * `c` and `p` must be live handles; `out` must be a valid pointer.
 */
enum ShapcircStatus shapcirc_ev_rational(const struct ShapcircCircuit *c,
                                         const struct ShapcircProbabilities *p,
                                         char **out);

/**
 * Expected score of variable `var`, rounded to the nearest double.
 *
 * # Safety
 * `c` and `p` must be live handles; `out` must be a valid pointer.
 */
enum ShapcircStatus shapcirc_score(const struct ShapcircCircuit *c,
                                   const struct ShapcircProbabilities *p,
                                   uint32_t var,
                                   enum ShapcircCoefficient coeff,
                                   double *out);

/**
 * Expected score of variable `var` as an exact
 * `"numerator/denominator"` string owned by the caller.
 *
 * # Safety
 * `c` and `p` must be live handles; `out` must be a valid pointer.
 */
enum ShapcircStatus shapcirc_score_rational(const struct ShapcircCircuit *c,
                                            const struct ShapcircProbabilities *p,
                                            uint32_t var,
                                            enum ShapcircCoefficient coeff,
                                            char **out);

/**
 * Release a string returned by this library (null is a no-op).
 *
 * # Safety
 * `s` must come from a `shapcirc_*` call and not be freed twice.
 */
void shapcirc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SHAPCIRC_H */
