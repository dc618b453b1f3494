#ifndef PREDICTIVE_THEORY_H
#define PREDICTIVE_THEORY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define PT_FLAG_ZERO_SUM_FALLBACK 1

#define PT_FLAG_NON_SEPARABLE_FALLBACK (1 << 1)

#define PT_FLAG_RECURSION_GUARD (1 << 2)

#define PT_FLAG_DIVISION_SHIELD (1 << 3)

/**
 * Result of a call. The parse, validation and situation codes match the
 * `ptheory` exit codes.
 */
typedef enum {
  PT_STATUS_OK = 0,
  PT_STATUS_PARSE = 2,
  PT_STATUS_VALIDATION = 3,
  PT_STATUS_SITUATION = 4,
  PT_STATUS_NULL_POINTER = 10,
  PT_STATUS_INVALID_UTF8 = 11,
  PT_STATUS_OUT_OF_RANGE = 12,
  PT_STATUS_PANIC = 13,
} PtStatus;

typedef enum {
  PT_VALIDITY_VALID = 0,
  PT_VALIDITY_INVALID = 1,
  /**
   * The enumeration cap was reached before any violation turned up.
   */
  PT_VALIDITY_INCOMPLETE = 2,
} PtValidity;

/**
 * One prediction: target values with exact and floating probabilities.
 */
typedef struct PtPrediction PtPrediction;

/**
 * A checked theory.
 */
typedef struct PtTheory PtTheory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or an empty string.
 * Valid until the next failing call on the same thread.
 */
const char *pt_last_error_message(void);

/**
 * Parses and checks theory source text.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` a writable pointer.
 */
PtStatus pt_theory_parse(const char *source, PtTheory **out);

/**
 * # Safety
 * `theory` must come from [`pt_theory_parse`] and not be freed already.
 */
void pt_theory_free(PtTheory *theory);

/**
 * Number of rules, or 0 for a null handle.
 *
 * # Safety
 * `theory` must be null or a live handle.
 */
size_t pt_theory_rule_count(const PtTheory *theory);

/**
 * Checks that every situation has a separable MSR set, visiting at most
 * `cap` situations. Returns [`PtStatus::Validation`] when the theory is
 * invalid, with the first witness in the error message.
 *
 * # Safety
 * `theory` must be a live handle and `out` null or writable.
 */
PtStatus pt_theory_validate(const PtTheory *theory, uint64_t cap, PtValidity *out);

/**
 * Predicts the target distribution for a situation such as
 * `"A = true, B = true"`. Arithmetic is exact.
 *
 * # Safety
 * `theory` must be a live handle, `situation` a NUL-terminated string and
 * `out` a writable pointer.
 */
PtStatus pt_query(const PtTheory *theory, const char *situation, PtPrediction **out);

/**
 * # Safety
 * `prediction` must come from [`pt_query`] and not be freed already.
 */
void pt_prediction_free(PtPrediction *prediction);

/**
 * Number of target values, or 0 for a null handle.
 *
 * # Safety
 * `prediction` must be null or a live handle.
 */
size_t pt_prediction_len(const PtPrediction *prediction);

/**
 * The `index`-th target value, or null when out of range.
 *
 * # Safety
 * `prediction` must be null or a live handle.
 */
const char *pt_prediction_value(const PtPrediction *prediction, size_t index);

/**
 * The `index`-th probability as an exact fraction such as `"27/34"`, or
 * null when out of range.
 *
 * # Safety
 * `prediction` must be null or a live handle.
 */
const char *pt_prediction_exact(const PtPrediction *prediction, size_t index);

/**
 * # Safety
 * `prediction` must be a live handle and `out` writable.
 */
PtStatus pt_prediction_probability(const PtPrediction *prediction, size_t index, double *out);

/**
 * Heuristic events behind the prediction as `PT_FLAG_*` bits.
 *
 * # Safety
 * `prediction` must be null or a live handle.
 */
uint32_t pt_prediction_flags(const PtPrediction *prediction);

/**
 * The full derivation as JSON. Release with [`pt_string_free`]. Null for
 * a null handle.
 *
 * # Safety
 * `prediction` must be null or a live handle.
 */
char *pt_prediction_to_json(const PtPrediction *prediction);

/**
 * # Safety
 * `s` must be null or come from a function documented to return an owned
 * string.
 */
void pt_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* PREDICTIVE_THEORY_H */
