#ifndef TORUS_MHD_H
#define TORUS_MHD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Frequency region of a mode.
typedef enum TmhdRegion {
  TMHD_REGION_S1 = 1,
  TMHD_REGION_S2 = 2,
  TMHD_REGION_S3 = 3,
} TmhdRegion;

// Status codes shared by every function.
typedef enum TmhdStatus {
  TMHD_STATUS_OK = 0,
  TMHD_STATUS_NULL_POINTER = 1,
  TMHD_STATUS_CONFIG = 2,
  TMHD_STATUS_CONTRACT = 3,
  TMHD_STATUS_DIVERGENCE = 4,
  TMHD_STATUS_CFL = 5,
  TMHD_STATUS_IO = 6,
  TMHD_STATUS_PANIC = 7,
} TmhdStatus;

// Certified background field.
typedef struct TmhdBackground TmhdBackground;

// Solver plus its current state.
typedef struct TmhdSimulation TmhdSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message into `buf` (NUL-terminated, truncated to
// `len`). Returns the full message length, 0 when there is none.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t tmhd_last_error(char *buf, size_t len);

// Minimum of `|b̃·k| |k|^r` over `0 < |k|_∞ ≤ k_max`; `argmin` receives `n` entries.
//
// # Safety
// `b_tilde` and `argmin` must hold `n` elements; `c_hat` must be writable.
enum TmhdStatus tmhd_estimate_constant(const double *b_tilde,
                                       size_t n,
                                       double r,
                                       size_t k_max,
                                       double *c_hat,
                                       int64_t *argmin);

// Region of mode `k` (length `n`) for background `b_tilde`.
//
// # Safety
// `k` and `b_tilde` must hold `n` elements; `region` must be writable.
enum TmhdStatus tmhd_classify_mode(const int64_t *k,
                                   const double *b_tilde,
                                   size_t n,
                                   enum TmhdRegion *region);

// Scalar propagator kernels `L₁(t)`, `L₂(t)` of mode `k`.
//
// # Safety
// `k` and `b_tilde` must hold `n` elements; `l1`, `l2` must be writable.
enum TmhdStatus tmhd_kernel_values(const int64_t *k,
                                   const double *b_tilde,
                                   size_t n,
                                   double t,
                                   double *l1,
                                   double *l2);

// Checks the region bounds on both kernels; `ok` is 1 when they hold.
//
// # Safety
// `k` and `b_tilde` must hold `n` elements; `ok`, `slack` must be writable.
enum TmhdStatus tmhd_kernel_bound_check(const int64_t *k,
                                        const double *b_tilde,
                                        size_t n,
                                        double t,
                                        int32_t *ok,
                                        double *slack);

// Certifies `b_tilde` with exponent `r` over `|k|_∞ ≤ k_cert`. A null
// `b_tilde` selects the golden vector of dimension `n`.
//
// # Safety
// `b_tilde` must be null or hold `n` elements; `out` must be writable.
enum TmhdStatus tmhd_background_new(const double *b_tilde,
                                    size_t n,
                                    double r,
                                    size_t k_cert,
                                    struct TmhdBackground **out);

// Certified constant of the background.
//
// # Safety
// `bg` must come from [`tmhd_background_new`]; `c_hat` must be writable.
enum TmhdStatus tmhd_background_c_hat(const struct TmhdBackground *bg, double *c_hat);

// # Safety
// `bg` must be null or come from [`tmhd_background_new`], and is invalid afterwards.
void tmhd_background_free(struct TmhdBackground *bg);

// Random small solenoidal data on an `N`-point grid, ready to step.
//
// `case_code` is 0 for `(μ, ν) = (0, 1)` and 1 for `(1, 0)`. The data lives on
// shells `|k| ≤ 4` with `‖u‖_{H^7} + ‖b‖_{H^7} = amplitude`.
//
// # Safety
// `bg` must come from [`tmhd_background_new`]; `out` must be writable.
enum TmhdStatus tmhd_simulation_new(const struct TmhdBackground *bg,
                                    size_t points,
                                    uint8_t case_code,
                                    double dt,
                                    double amplitude,
                                    uint64_t seed,
                                    struct TmhdSimulation **out);

// Advances by `steps` steps. On failure the state is left at the last good step.
//
// # Safety
// `sim` must come from [`tmhd_simulation_new`].
enum TmhdStatus tmhd_simulation_step(struct TmhdSimulation *sim, size_t steps);

// Time, energy `½(‖u‖²+‖b‖²)` and `‖u‖_{H^s} + ‖b‖_{H^s}` of the current state.
//
// # Safety
// `sim` must come from [`tmhd_simulation_new`]; the out pointers must be writable.
enum TmhdStatus tmhd_simulation_observe(const struct TmhdSimulation *sim,
                                        double s,
                                        double *t,
                                        double *energy,
                                        double *norm);

// Largest divergence residual and mean-mode magnitude of the current state.
//
// # Safety
// `sim` must come from [`tmhd_simulation_new`]; the out pointers must be writable.
enum TmhdStatus tmhd_simulation_invariants(const struct TmhdSimulation *sim,
                                           double *divergence,
                                           double *mean);

// # Safety
// `sim` must be null or come from [`tmhd_simulation_new`], and is invalid afterwards.
void tmhd_simulation_free(struct TmhdSimulation *sim);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TORUS_MHD_H */
