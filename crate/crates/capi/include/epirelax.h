/* C interface to the epirelax layered mixed-norm solver. */

#ifndef EPIRELAX_H
#define EPIRELAX_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. Zero is success; `ERX_MAX_ITER` still fills outputs.
typedef enum ErxStatus {
  ERX_OK = 0,
  ERX_MAX_ITER = 1,
  ERX_NULL_POINTER = 2,
  ERX_INVALID_INPUT = 3,
  ERX_SHAPE = 4,
  ERX_CONFIG = 5,
  ERX_UNSUPPORTED = 6,
  ERX_DIVERGED = 7,
  ERX_INTERNAL = 8,
} ErxStatus;

// Opaque handle: the real/imaginary DFT splitting for `rows × cols`
// matrices, reusable across [`erx_asnn`] calls.
typedef struct ErxDft ErxDft;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version string of the underlying library; static storage, never freed.
const char *erx_version(void);

// Message for the most recent failure in this thread. Valid until the next
// failing call on the same thread; never null.
const char *erx_last_error(void);

// Soft thresholding: `out[i] = sign(x[i]) · max(|x[i]| − gamma, 0)`.
//
// # Safety
// `x` and `out` must point to `n` readable / writable doubles.
enum ErxStatus erx_prox_l1(const double *x, size_t n, double gamma, double *out);

// Euclidean projection onto `{v : ‖v‖₁ ≤ radius}`.
//
// # Safety
// `x` and `out` must point to `n` readable / writable doubles.
enum ErxStatus erx_project_l1_ball(const double *x, size_t n, double radius, double *out);

// Projection onto the epigraph of the `ℓ1` norm: nearest `(y, η)` with
// `‖y‖₁ ≤ η` to `(x, xi)`.
//
// # Safety
// `x` and `y_out` must point to `n` doubles; `eta_out` to one double.
enum ErxStatus erx_epi_project_l1(const double *x,
                                  size_t n,
                                  double xi,
                                  double *y_out,
                                  double *eta_out);

// Builds the DFT splitting. `dims_d` is 1 for per-column 1-D transforms or
// 2 when each column stores a square image (so `rows` must be a square).
//
// # Safety
// `out` must be a valid location for one pointer. The handle must be
// released with [`erx_dft_free`].
enum ErxStatus erx_dft_new(size_t rows, size_t cols, size_t dims_d, struct ErxDft **out);

// Releases a handle from [`erx_dft_new`]. Null is a no-op.
//
// # Safety
// `h` must be null or a pointer returned by [`erx_dft_new`], not yet freed.
void erx_dft_free(struct ErxDft *h);

// Nuclear norm of the entrywise DFT amplitudes of `x` (column-major,
// `rows × cols` matching the handle).
//
// # Safety
// `h` must be a live [`erx_dft_new`] handle; `x` must hold `rows × cols`
// doubles; `out` one double.
enum ErxStatus erx_asnn(const struct ErxDft *h, const double *x, double *out);

// Recovers a `width × height` RGB image (column-major planes, 3·N doubles)
// from `m_rows` compressive measurements `y` taken by the seeded
// measurement operator. `reg` selects the regularizer: 0 relaxed VTV,
// 1 direct VTV, 2 decorrelated VTV, 3 patch structure tensor. Returns
// `ERX_OK` on convergence, `ERX_MAX_ITER` when the budget ran out (the
// iterate is still written).
//
// # Safety
// `y` must hold `m_rows` doubles, `x_out` `3·width·height` doubles, and
// `iters_out` (optional, may be null) one `size_t`.
enum ErxStatus erx_recover_image(const double *y,
                                 size_t m_rows,
                                 size_t width,
                                 size_t height,
                                 int32_t reg,
                                 double luma_weight,
                                 size_t patch,
                                 uint64_t op_seed,
                                 double eps_fid,
                                 double eps_stop,
                                 size_t max_iter,
                                 double *x_out,
                                 size_t *iters_out);

// Splits a column-major `rows × cols` matrix into low-rank `L` and sparse
// `S` parts. `mode` 0 penalizes the nuclear norm of `L` itself; mode 1
// penalizes the nuclear norm of `L`'s per-column DFT amplitudes, which is
// invariant to circular shifts. `l1_eps` budgets `‖S‖₁`. Returns `ERX_OK`
// or `ERX_MAX_ITER`, both with outputs written.
//
// # Safety
// `x`, `l_out`, and `s_out` must hold `rows × cols` doubles; `iters_out`
// (optional, may be null) one `size_t`.
enum ErxStatus erx_rpca(const double *x,
                        size_t rows,
                        size_t cols,
                        int32_t mode,
                        double l1_eps,
                        double eps_stop,
                        size_t max_iter,
                        double *l_out,
                        double *s_out,
                        size_t *iters_out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* EPIRELAX_H */
