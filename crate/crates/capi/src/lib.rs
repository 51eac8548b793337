//! C interface: flat entry points over the prox/epigraph primitives, the
//! image-recovery pipeline, and the low-rank + sparse decomposition, plus an
//! opaque handle for the DFT split operator so amplitude-spectrum evaluations
//! can reuse one factorization.
//!
//! Conventions: every fallible call returns an [`ErxStatus`]; `ERX_OK` and
//! `ERX_MAX_ITER` both fill their outputs (the latter flags an exhausted
//! iteration budget). On any other status the thread-local message behind
//! [`erx_last_error`] describes the failure. Buffers are caller-allocated;
//! matrices are column-major `f64`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use epirelax::image::{measurement_op, ImagePlane, PatchConfig};
use epirelax::linalg::DenseMatrix;
use epirelax::pds::SolveStatus;
use epirelax::prox::{project_l1_ball, prox_l1};
use epirelax::recovery::{recover_full, RecoveryConfig, Regularizer};
use epirelax::rpca::{asnn, build_dft_split, frpca_solve_full, DftSplitOperator, RpcaConfig, RpcaMode};
use epirelax::{epigraph, Error};

/// Result codes. Zero is success; `ERX_MAX_ITER` still fills outputs.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ErxStatus {
    ErxOk = 0,
    ErxMaxIter = 1,
    ErxNullPointer = 2,
    ErxInvalidInput = 3,
    ErxShape = 4,
    ErxConfig = 5,
    ErxUnsupported = 6,
    ErxDiverged = 7,
    ErxInternal = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let clean = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = clean);
}

fn status_of(err: &Error) -> ErxStatus {
    match err {
        Error::InvalidInput(_) | Error::Parse { .. } => ErxStatus::ErxInvalidInput,
        Error::Shape(_) => ErxStatus::ErxShape,
        Error::Config(_) => ErxStatus::ErxConfig,
        Error::Unsupported(_) => ErxStatus::ErxUnsupported,
        Error::Diverged { .. } => ErxStatus::ErxDiverged,
        Error::Io(_) => ErxStatus::ErxInternal,
    }
}

fn fail(err: Error) -> ErxStatus {
    set_error(&err.to_string());
    status_of(&err)
}

/// Runs a closure behind the unwind barrier every entry point needs.
fn guarded(f: impl FnOnce() -> ErxStatus) -> ErxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            ErxStatus::ErxInternal
        }
    }
}

/// Version string of the underlying library; static storage, never freed.
#[no_mangle]
pub extern "C" fn erx_version() -> *const c_char {
    concat!("epirelax ", env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure in this thread. Valid until the next
/// failing call on the same thread; never null.
#[no_mangle]
pub extern "C" fn erx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

unsafe fn slice_in<'a>(p: *const f64, n: usize) -> Option<&'a [f64]> {
    if p.is_null() && n > 0 {
        None
    } else {
        Some(std::slice::from_raw_parts(p, n))
    }
}

unsafe fn slice_out<'a>(p: *mut f64, n: usize) -> Option<&'a mut [f64]> {
    if p.is_null() && n > 0 {
        None
    } else {
        Some(std::slice::from_raw_parts_mut(p, n))
    }
}

fn null_ptr() -> ErxStatus {
    set_error("null pointer argument");
    ErxStatus::ErxNullPointer
}

/// Soft thresholding: `out[i] = sign(x[i]) · max(|x[i]| − gamma, 0)`.
///
/// # Safety
/// `x` and `out` must point to `n` readable / writable doubles.
#[no_mangle]
pub unsafe extern "C" fn erx_prox_l1(
    x: *const f64,
    n: usize,
    gamma: f64,
    out: *mut f64,
) -> ErxStatus {
    guarded(|| {
        let (Some(xs), Some(os)) = (slice_in(x, n), slice_out(out, n)) else {
            return null_ptr();
        };
        if !gamma.is_finite() || gamma < 0.0 {
            set_error("gamma must be finite and nonnegative");
            return ErxStatus::ErxConfig;
        }
        os.copy_from_slice(&prox_l1(xs, gamma));
        ErxStatus::ErxOk
    })
}

/// Euclidean projection onto `{v : ‖v‖₁ ≤ radius}`.
///
/// # Safety
/// `x` and `out` must point to `n` readable / writable doubles.
#[no_mangle]
pub unsafe extern "C" fn erx_project_l1_ball(
    x: *const f64,
    n: usize,
    radius: f64,
    out: *mut f64,
) -> ErxStatus {
    guarded(|| {
        let (Some(xs), Some(os)) = (slice_in(x, n), slice_out(out, n)) else {
            return null_ptr();
        };
        if !radius.is_finite() || radius < 0.0 {
            set_error("radius must be finite and nonnegative");
            return ErxStatus::ErxConfig;
        }
        os.copy_from_slice(&project_l1_ball(xs, radius));
        ErxStatus::ErxOk
    })
}

/// Projection onto the epigraph of the `ℓ1` norm: nearest `(y, η)` with
/// `‖y‖₁ ≤ η` to `(x, xi)`.
///
/// # Safety
/// `x` and `y_out` must point to `n` doubles; `eta_out` to one double.
#[no_mangle]
pub unsafe extern "C" fn erx_epi_project_l1(
    x: *const f64,
    n: usize,
    xi: f64,
    y_out: *mut f64,
    eta_out: *mut f64,
) -> ErxStatus {
    guarded(|| {
        let (Some(xs), Some(ys)) = (slice_in(x, n), slice_out(y_out, n)) else {
            return null_ptr();
        };
        if eta_out.is_null() {
            return null_ptr();
        }
        if !xi.is_finite() {
            set_error("xi must be finite");
            return ErxStatus::ErxInvalidInput;
        }
        let (y, eta) = epigraph::epi_project_l1(xs, xi);
        ys.copy_from_slice(&y);
        *eta_out = eta;
        ErxStatus::ErxOk
    })
}

/// Opaque handle: the real/imaginary DFT splitting for `rows × cols`
/// matrices, reusable across [`erx_asnn`] calls.
pub struct ErxDft {
    op: DftSplitOperator,
}

/// Builds the DFT splitting. `dims_d` is 1 for per-column 1-D transforms or
/// 2 when each column stores a square image (so `rows` must be a square).
///
/// # Safety
/// `out` must be a valid location for one pointer. The handle must be
/// released with [`erx_dft_free`].
#[no_mangle]
pub unsafe extern "C" fn erx_dft_new(
    rows: usize,
    cols: usize,
    dims_d: usize,
    out: *mut *mut ErxDft,
) -> ErxStatus {
    guarded(|| {
        if out.is_null() {
            return null_ptr();
        }
        match build_dft_split(rows, cols, dims_d) {
            Ok(op) => {
                *out = Box::into_raw(Box::new(ErxDft { op }));
                ErxStatus::ErxOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Releases a handle from [`erx_dft_new`]. Null is a no-op.
///
/// # Safety
/// `h` must be null or a pointer returned by [`erx_dft_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn erx_dft_free(h: *mut ErxDft) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Nuclear norm of the entrywise DFT amplitudes of `x` (column-major,
/// `rows × cols` matching the handle).
///
/// # Safety
/// `h` must be a live [`erx_dft_new`] handle; `x` must hold `rows × cols`
/// doubles; `out` one double.
#[no_mangle]
pub unsafe extern "C" fn erx_asnn(
    h: *const ErxDft,
    x: *const f64,
    out: *mut f64,
) -> ErxStatus {
    guarded(|| {
        if h.is_null() || out.is_null() {
            return null_ptr();
        }
        let op = &(*h).op;
        let Some(xs) = slice_in(x, op.m() * op.n()) else {
            return null_ptr();
        };
        let mat = match DenseMatrix::from_data(op.m(), op.n(), xs.to_vec()) {
            Ok(m) => m,
            Err(e) => return fail(e),
        };
        match asnn(&mat, op) {
            Ok(v) => {
                *out = v;
                ErxStatus::ErxOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Recovers a `width × height` RGB image (column-major planes, 3·N doubles)
/// from `m_rows` compressive measurements `y` taken by the seeded
/// measurement operator. `reg` selects the regularizer: 0 relaxed VTV,
/// 1 direct VTV, 2 decorrelated VTV, 3 patch structure tensor. Returns
/// `ERX_OK` on convergence, `ERX_MAX_ITER` when the budget ran out (the
/// iterate is still written).
///
/// # Safety
/// `y` must hold `m_rows` doubles, `x_out` `3·width·height` doubles, and
/// `iters_out` (optional, may be null) one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn erx_recover_image(
    y: *const f64,
    m_rows: usize,
    width: usize,
    height: usize,
    reg: i32,
    luma_weight: f64,
    patch: usize,
    op_seed: u64,
    eps_fid: f64,
    eps_stop: f64,
    max_iter: usize,
    x_out: *mut f64,
    iters_out: *mut usize,
) -> ErxStatus {
    guarded(|| {
        let n3 = 3 * width * height;
        let (Some(ys), Some(xs)) = (slice_in(y, m_rows), slice_out(x_out, n3)) else {
            return null_ptr();
        };
        let regularizer = match reg {
            0 => Regularizer::Vtv,
            1 => Regularizer::VtvDirect,
            2 => Regularizer::Dvtv,
            3 => Regularizer::Dstv,
            _ => {
                set_error("reg must be 0..=3");
                return ErxStatus::ErxConfig;
            }
        };
        let run = || -> Result<(ImagePlane, usize, SolveStatus), Error> {
            let phi = measurement_op(m_rows, n3, op_seed)?;
            let mut cfg = RecoveryConfig::new(regularizer, width, height)?;
            cfg.w = luma_weight;
            cfg.patch = PatchConfig::new(patch)?;
            cfg.eps_fid = eps_fid;
            cfg.eps_stop = eps_stop;
            cfg.max_iter = max_iter;
            let ((img, trace), status) = recover_full(ys, phi, &cfg)?;
            Ok((img, trace.residual.len(), status))
        };
        match run() {
            Ok((img, iters, status)) => {
                xs.copy_from_slice(img.pixels());
                if !iters_out.is_null() {
                    *iters_out = iters;
                }
                match status {
                    SolveStatus::Converged => ErxStatus::ErxOk,
                    SolveStatus::MaxIter => ErxStatus::ErxMaxIter,
                }
            }
            Err(e) => fail(e),
        }
    })
}

/// Splits a column-major `rows × cols` matrix into low-rank `L` and sparse
/// `S` parts. `mode` 0 penalizes the nuclear norm of `L` itself; mode 1
/// penalizes the nuclear norm of `L`'s per-column DFT amplitudes, which is
/// invariant to circular shifts. `l1_eps` budgets `‖S‖₁`. Returns `ERX_OK`
/// or `ERX_MAX_ITER`, both with outputs written.
///
/// # Safety
/// `x`, `l_out`, and `s_out` must hold `rows × cols` doubles; `iters_out`
/// (optional, may be null) one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn erx_rpca(
    x: *const f64,
    rows: usize,
    cols: usize,
    mode: i32,
    l1_eps: f64,
    eps_stop: f64,
    max_iter: usize,
    l_out: *mut f64,
    s_out: *mut f64,
    iters_out: *mut usize,
) -> ErxStatus {
    guarded(|| {
        let mn = rows * cols;
        let (Some(xs), Some(ls), Some(ss)) =
            (slice_in(x, mn), slice_out(l_out, mn), slice_out(s_out, mn))
        else {
            return null_ptr();
        };
        let mode = match mode {
            0 => RpcaMode::SignalDomain,
            1 => RpcaMode::FrequencyDomain,
            _ => {
                set_error("mode must be 0 (signal) or 1 (frequency)");
                return ErxStatus::ErxConfig;
            }
        };
        let run = || -> Result<(DenseMatrix, DenseMatrix, usize, SolveStatus), Error> {
            let mat = DenseMatrix::from_data(rows, cols, xs.to_vec())?;
            let mut cfg = RpcaConfig::new(mode);
            cfg.l1_eps = l1_eps;
            cfg.eps_stop = eps_stop;
            cfg.max_iter = max_iter;
            let ((l, s, trace), status) = frpca_solve_full(&mat, &cfg)?;
            Ok((l, s, trace.residual.len(), status))
        };
        match run() {
            Ok((l, s, iters, status)) => {
                ls.copy_from_slice(l.data());
                ss.copy_from_slice(s.data());
                if !iters_out.is_null() {
                    *iters_out = iters;
                }
                match status {
                    SolveStatus::Converged => ErxStatus::ErxOk,
                    SolveStatus::MaxIter => ErxStatus::ErxMaxIter,
                }
            }
            Err(e) => fail(e),
        }
    })
}
