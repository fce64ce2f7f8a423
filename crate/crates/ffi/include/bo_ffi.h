#ifndef BO_FFI_H
#define BO_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BoHilbertPath {
  BO_HILBERT_PATH_SPECTRAL = 0,
  BO_HILBERT_PATH_DIRECT = 1,
} BoHilbertPath;

typedef enum BoStatus {
  BO_STATUS_OK = 0,
  BO_STATUS_NULL_POINTER = 1,
  BO_STATUS_INVALID_ARGUMENT = 2,
  BO_STATUS_LENGTH_MISMATCH = 3,
  BO_STATUS_NON_FINITE = 4,
  BO_STATUS_NO_CONVERGENCE = 5,
  BO_STATUS_DIVERGENCE = 6,
  BO_STATUS_BLOW_UP = 7,
  BO_STATUS_NUMERICAL_GUARD = 8,
  BO_STATUS_PANIC = 99,
} BoStatus;

/**
 * Periodic Hilbert kernel for a fixed odd size.
 */
typedef struct BoKernel BoKernel;

/**
 * Periodic solver state: grid, current values, elapsed time and settings.
 */
typedef struct BoSolver BoSolver;

/**
 * Diagnostics of one implicit step.
 */
typedef struct BoStepInfo {
  double dt;
  size_t iterations;
  double final_contraction_ratio;
  double max_contraction_ratio;
} BoStepInfo;

/**
 * Summary of a multi-step evolution.
 */
typedef struct BoEvolveInfo {
  size_t steps;
  size_t total_iterations;
  double lambda;
  double dt;
  double relative_l2_drift;
} BoEvolveInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len - 1` bytes) and returns the full message length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t bo_last_error_message(char *buf, size_t len);

/**
 * Static description of a status code.
 */
const char *bo_status_string(enum BoStatus status);

/**
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum BoStatus bo_kernel_new(size_t n_points, struct BoKernel **out);

/**
 * # Safety
 * `kernel` must be null or a handle from [`bo_kernel_new`] not yet freed.
 */
void bo_kernel_free(struct BoKernel *kernel);

/**
 * # Safety
 * `kernel` must be a live handle; `u` and `out` must hold `len` doubles.
 */
enum BoStatus bo_hilbert_periodic(const struct BoKernel *kernel,
                                  enum BoHilbertPath path,
                                  const double *u,
                                  double *out,
                                  size_t len);

/**
 * Line transform of `len` samples; `out` receives `3 * len` values on the
 * input grid padded by one input width on each side.
 *
 * # Safety
 * `u` must hold `len` doubles and `out` must hold `out_len` doubles.
 */
enum BoStatus bo_hilbert_line(const double *u, size_t len, double *out, size_t out_len);

/**
 * Samples the periodic one-soliton at the points `x`.
 *
 * # Safety
 * `x` and `out` must hold `len` doubles.
 */
enum BoStatus bo_one_soliton_sample(double c,
                                    double l_domain,
                                    double t,
                                    const double *x,
                                    double *out,
                                    size_t len);

/**
 * Solver on the periodic grid of `n_points` (odd) cells over `[a, b)`,
 * starting from zero with the default step-size and iteration settings.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum BoStatus bo_solver_new(size_t n_points, double a, double b, struct BoSolver **out);

/**
 * # Safety
 * `solver` must be null or a handle from [`bo_solver_new`] not yet freed.
 */
void bo_solver_free(struct BoSolver *solver);

/**
 * # Safety
 * `solver` must be a live handle.
 */
size_t bo_solver_len(const struct BoSolver *solver);

/**
 * Grid coordinates `x_j`.
 *
 * # Safety
 * `solver` must be a live handle; `out` must hold `len` doubles.
 */
enum BoStatus bo_solver_coordinates(const struct BoSolver *solver, double *out, size_t len);

/**
 * Replaces the state and resets the elapsed time to `t`.
 *
 * # Safety
 * `solver` must be a live handle; `u` must hold `len` doubles.
 */
enum BoStatus bo_solver_set_state(struct BoSolver *solver, const double *u, size_t len, double t);

/**
 * # Safety
 * `solver` must be a live handle; `out` must hold `len` doubles.
 */
enum BoStatus bo_solver_get_state(const struct BoSolver *solver, double *out, size_t len);

/**
 * # Safety
 * `solver` must be a live handle.
 */
double bo_solver_time(const struct BoSolver *solver);

/**
 * Fixed-point stopping rule used by later steps.
 *
 * # Safety
 * `solver` must be a live handle.
 */
enum BoStatus bo_solver_set_fixed_point(struct BoSolver *solver,
                                        double rel_tolerance,
                                        size_t max_iterations,
                                        double divergence_guard);

/**
 * Step-size rule for [`bo_solver_evolve`]: a fixed `lambda = dt/dx` when
 * `lambda > 0`, otherwise `factor / |u0|_h2` with `factor` in (0, 1].
 *
 * # Safety
 * `solver` must be a live handle.
 */
enum BoStatus bo_solver_set_lambda(struct BoSolver *solver, double lambda, double factor);

/**
 * One Crank-Nicolson step of size `dt`. The state is left unchanged on error.
 *
 * # Safety
 * `solver` must be a live handle; `info` may be null.
 */
enum BoStatus bo_solver_step(struct BoSolver *solver, double dt, struct BoStepInfo *info);

/**
 * Advances the state by `duration`, landing exactly on the end time.
 *
 * # Safety
 * `solver` must be a live handle; `info` may be null.
 */
enum BoStatus bo_solver_evolve(struct BoSolver *solver, double duration, struct BoEvolveInfo *info);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BO_FFI_H */
