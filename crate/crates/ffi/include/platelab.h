#ifndef PLATELAB_H
#define PLATELAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum PlStatus {
  PL_STATUS_OK = 0,
  PL_STATUS_NULL_POINTER = 1,
  PL_STATUS_INVALID_UTF8 = 2,
  PL_STATUS_INVALID_INPUT = 3,
  PL_STATUS_NUMERICAL = 4,
  PL_STATUS_VERIFICATION_FAILED = 5,
  PL_STATUS_PANIC = 6,
} PlStatus;

// Opaque problem handle.
typedef struct PlProblem PlProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a problem from JSON into a new handle stored at `out`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum PlStatus pl_problem_from_json(const char *json, struct PlProblem **out);

// Replaces the quadrature settings of a handle with a JSON QuadConfig;
// missing fields take their defaults.
//
// # Safety
// `p` must come from [`pl_problem_from_json`]; `json` must be NUL-terminated.
enum PlStatus pl_problem_set_quadrature(struct PlProblem *p, const char *json);

// Releases a handle; null is ignored.
//
// # Safety
// `p` must come from [`pl_problem_from_json`] and not be used afterwards.
void pl_problem_free(struct PlProblem *p);

// Spatial dimension of a problem, 0 for a null handle.
//
// # Safety
// `p` must be null or a live handle.
size_t pl_problem_dimension(const struct PlProblem *p);

// ‖u(t)‖² and its quadrature error estimate; `err` may be null.
//
// # Safety
// `p` must be a live handle and `value` a valid pointer.
enum PlStatus pl_norm_sq(const struct PlProblem *p, double t, double *value, double *err);

// ‖u(t)‖² at `count` increasing times into `values`.
//
// # Safety
// `times` and `values` must point to `count` doubles.
enum PlStatus pl_norm_sq_series(const struct PlProblem *p,
                                const double *times,
                                size_t count,
                                double *values);

// E(t) = ½(‖u_t‖² + ‖(−Δ)^{σ/2}u‖²).
//
// # Safety
// `p` must be a live handle and `value` a valid pointer.
enum PlStatus pl_energy(const struct PlProblem *p, double t, double *value);

// Residual of the energy identity for the time antiderivative.
//
// # Safety
// `p` must be a live handle and `value` a valid pointer.
enum PlStatus pl_identity_residual(const struct PlProblem *p, double t, double *value);

// Low and high frequency parts of ‖u(t)‖² split at (δ₀²/t)^{1/σ}.
//
// # Safety
// `p` must be a live handle; `low` and `high` valid pointers.
enum PlStatus pl_frequency_split(const struct PlProblem *p,
                                 double t,
                                 double delta0,
                                 double *low,
                                 double *high);

// Brute-force tensor-grid value of ‖u(t)‖² on [−R, R]ⁿ with spacing h.
//
// # Safety
// `p` must be a live handle and `value` a valid pointer.
enum PlStatus pl_tensor_oracle(const struct PlProblem *p,
                               double t,
                               double box_radius,
                               double step,
                               double *value);

// Runs a scenario (or `all`) and stores the JSON report array at `report`.
// `n` selects the dimension of dimensional scenarios; 0 runs all of them.
// Returns `VerificationFailed` when any report fails; the report is still set.
//
// # Safety
// `id` must be NUL-terminated; `report` a valid pointer. Free the report with
// [`pl_string_free`].
enum PlStatus pl_verify(const char *id, size_t n, char **report);

// Releases a string returned by the library; null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void pl_string_free(char *s);

// Message of the last failure on this thread, empty after a success. The
// pointer stays valid until the next call on the same thread.
const char *pl_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PLATELAB_H */
