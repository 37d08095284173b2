//! C ABI for `locspec`.
//!
//! Every function returns an `int32_t` status (`LS_OK` or a negative
//! `LS_ERR_*` code) and writes results through out-pointers. Objects are
//! opaque handles created by `ls_*_new`-style functions and released with the
//! matching `ls_*_free`. The message of the most recent failure on the calling
//! thread is available from [`ls_last_error`]. Panics never cross the
//! boundary; they are reported as `LS_ERR_PANIC`.
//!
//! Matrices are passed row-major. Multi-indices are arrays of `uint32_t` whose
//! length is the dimension of the frame or mask they are used with.

#![allow(clippy::missing_safety_doc)]

use locspec::eigenvalues::{eig_disc, eig_weighted};
use locspec::opmatrix::{assemble_localization, diagonalize, AssemblyMask, OperatorMatrix, Window};
use locspec::phasespace::FramePhase;
use locspec::reinhardt::MaskSpec;
use locspec::specfun::{complex_hermite, hermite, laguerre, MultiIndex};
use locspec::symplectic::{williamson, LagrangianFrame};
use locspec::Error;
use num_complex::Complex64;
use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

pub const LS_OK: i32 = 0;
pub const LS_ERR_NULL: i32 = -1;
pub const LS_ERR_DOMAIN: i32 = -2;
pub const LS_ERR_DIMENSION: i32 = -3;
pub const LS_ERR_FRAME: i32 = -4;
pub const LS_ERR_NOT_SYMPLECTIC: i32 = -5;
pub const LS_ERR_NOT_POSITIVE_DEFINITE: i32 = -6;
pub const LS_ERR_NOT_POLYRADIAL: i32 = -7;
pub const LS_ERR_QUADRATURE: i32 = -8;
pub const LS_ERR_UNSUPPORTED: i32 = -9;
pub const LS_ERR_CONFIG: i32 = -10;
/// Output buffer shorter than required.
pub const LS_ERR_BUFFER: i32 = -11;
pub const LS_ERR_PANIC: i32 = -12;

/// Complex number with the layout of C99 `double _Complex`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LsComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for LsComplex {
    fn from(z: Complex64) -> Self {
        LsComplex { re: z.re, im: z.im }
    }
}

impl From<LsComplex> for Complex64 {
    fn from(z: LsComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// A Lagrangian frame `(Q, P)`.
pub struct LsFrame(LagrangianFrame);

/// A phase-space mask: polyradial or the square `[-a, a]^2`.
pub struct LsMask(AssemblyMask);

/// An assembled operator matrix together with its eigenvalues.
pub struct LsOperator {
    op: OperatorMatrix,
    eigenvalues: Vec<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

enum Failure {
    Null(&'static str),
    Buffer { needed: usize },
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn code_of(e: &Error) -> i32 {
    match e {
        Error::Domain(_) => LS_ERR_DOMAIN,
        Error::Dimension { .. } => LS_ERR_DIMENSION,
        Error::InvalidFrame(_) => LS_ERR_FRAME,
        Error::NotSymplectic { .. } => LS_ERR_NOT_SYMPLECTIC,
        Error::NotPositiveDefinite(_) => LS_ERR_NOT_POSITIVE_DEFINITE,
        Error::NotPolyradial { .. } => LS_ERR_NOT_POLYRADIAL,
        Error::Quadrature { .. } => LS_ERR_QUADRATURE,
        Error::Unsupported(_) => LS_ERR_UNSUPPORTED,
        Error::Config(_) | Error::Io(_) | Error::Json(_) => LS_ERR_CONFIG,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LS_OK,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            LS_ERR_NULL
        }
        Ok(Err(Failure::Buffer { needed })) => {
            set_error(format!("output buffer too small: {needed} elements needed"));
            LS_ERR_BUFFER
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            code_of(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            LS_ERR_PANIC
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn index(p: *const u32, d: usize, what: &'static str) -> Result<MultiIndex, Failure> {
    Ok(MultiIndex(slice(p, d, what)?.iter().map(|&v| v as usize).collect()))
}

unsafe fn complex_matrix(p: *const LsComplex, d: usize, what: &'static str) -> Result<nalgebra::DMatrix<Complex64>, Failure> {
    let s = slice(p, d * d, what)?;
    Ok(nalgebra::DMatrix::from_row_iterator(d, d, s.iter().map(|&z| z.into())))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`) and returns the full message length in bytes.
#[no_mangle]
pub unsafe extern "C" fn ls_last_error(buf: *mut c_char, len: usize) -> i32 {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len() as i32
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ls_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Hermite function `phi_n(t)`, normalized with `phi_0(t) = 2^{1/4} e^{-pi t^2}`.
#[no_mangle]
pub unsafe extern "C" fn ls_hermite(n: u32, t: f64, result: *mut f64) -> i32 {
    guard(|| {
        *out(result, "result")? = hermite(n as usize, t);
        Ok(())
    })
}

/// Generalized Laguerre polynomial `L_k^alpha(t)`.
#[no_mangle]
pub unsafe extern "C" fn ls_laguerre(k: u32, alpha: f64, t: f64, result: *mut f64) -> i32 {
    guard(|| {
        *out(result, "result")? = laguerre(k as usize, alpha, t);
        Ok(())
    })
}

/// Complex Hermite polynomial `H_{n,k}(z)`.
#[no_mangle]
pub unsafe extern "C" fn ls_complex_hermite(n: u32, k: u32, z: LsComplex, result: *mut LsComplex) -> i32 {
    guard(|| {
        *out(result, "result")? = complex_hermite(n as usize, k as usize, z.into()).into();
        Ok(())
    })
}

/// Frame from row-major `d x d` matrices `q` and `p`.
#[no_mangle]
pub unsafe extern "C" fn ls_frame_new(d: usize, q: *const LsComplex, p: *const LsComplex, frame: *mut *mut LsFrame) -> i32 {
    guard(|| {
        let slot = out(frame, "frame")?;
        let f = LagrangianFrame::new(complex_matrix(q, d, "q")?, complex_matrix(p, d, "p")?)?;
        *slot = Box::into_raw(Box::new(LsFrame(f)));
        Ok(())
    })
}

/// The frame `(I, iI)` whose wavepackets are the Hermite functions.
#[no_mangle]
pub unsafe extern "C" fn ls_frame_standard(d: usize, frame: *mut *mut LsFrame) -> i32 {
    guard(|| {
        let slot = out(frame, "frame")?;
        if d == 0 {
            return Err(Error::Domain("dimension must be positive".into()).into());
        }
        *slot = Box::into_raw(Box::new(LsFrame(LagrangianFrame::standard(d))));
        Ok(())
    })
}

/// The two-dimensional frame with zero-diagonal `Q^{-1} conj(Q)`.
#[no_mangle]
pub unsafe extern "C" fn ls_frame_zero_diagonal(frame: *mut *mut LsFrame) -> i32 {
    guard(|| {
        *out(frame, "frame")? = Box::into_raw(Box::new(LsFrame(LagrangianFrame::zero_diagonal_example())));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ls_frame_dim(frame: *const LsFrame, d: *mut usize) -> i32 {
    guard(|| {
        *out(d, "d")? = get(frame, "frame")?.0.dim();
        Ok(())
    })
}

/// Releases a frame. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ls_frame_free(frame: *mut LsFrame) {
    if !frame.is_null() {
        drop(Box::from_raw(frame));
    }
}

/// Hagedorn wavepacket `phi_k[Q, P](t)`; `k` and `t` have the frame's dimension.
#[no_mangle]
pub unsafe extern "C" fn ls_wavepacket_eval(frame: *const LsFrame, k: *const u32, t: *const f64, result: *mut LsComplex) -> i32 {
    guard(|| {
        let f = &get(frame, "frame")?.0;
        let d = f.dim();
        let v = locspec::hagedorn::wavepacket_eval(f, &index(k, d, "k")?, slice(t, d, "t")?)?;
        *out(result, "result")? = v.into();
        Ok(())
    })
}

/// `V_{phi_k[Q,P]} phi_n[Q,P](z)` in closed form, `z_j = x_j + i w_j`.
#[no_mangle]
pub unsafe extern "C" fn ls_hagedorn_stft(
    frame: *const LsFrame,
    n: *const u32,
    k: *const u32,
    z: *const LsComplex,
    result: *mut LsComplex,
) -> i32 {
    guard(|| {
        let f = &get(frame, "frame")?.0;
        let d = f.dim();
        let zs: Vec<Complex64> = slice(z, d, "z")?.iter().map(|&c| c.into()).collect();
        let v = FramePhase::new(f)?.stft(&index(n, d, "n")?, &index(k, d, "k")?, &zs)?;
        *out(result, "result")? = v.into();
        Ok(())
    })
}

/// Polyradial mask from its JSON description, e.g.
/// `{"d":1,"constant":0,"profile":{"kind":"indicator","scale":1,"shadow":{"kind":"ball","d":1,"radius":1}}}`.
#[no_mangle]
pub unsafe extern "C" fn ls_mask_from_json(json: *const c_char, mask: *mut *mut LsMask) -> i32 {
    guard(|| {
        let slot = out(mask, "mask")?;
        if json.is_null() {
            return Err(Failure::Null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| Error::Config(format!("mask JSON is not UTF-8: {e}")))?;
        let raw: MaskSpec = serde_json::from_str(text).map_err(Error::from)?;
        let m = MaskSpec::new(raw.d, raw.constant, raw.profile)?;
        *slot = Box::into_raw(Box::new(LsMask(m.into())));
        Ok(())
    })
}

/// Indicator of the disc `|z| <= radius` in the phase plane.
#[no_mangle]
pub unsafe extern "C" fn ls_mask_disc(radius: f64, mask: *mut *mut LsMask) -> i32 {
    guard(|| {
        let slot = out(mask, "mask")?;
        *slot = Box::into_raw(Box::new(LsMask(MaskSpec::disc(radius)?.into())));
        Ok(())
    })
}

/// Indicator of the square `[-a, a]^2` in the phase plane (not polyradial).
#[no_mangle]
pub unsafe extern "C" fn ls_mask_square(half_side: f64, mask: *mut *mut LsMask) -> i32 {
    guard(|| {
        let slot = out(mask, "mask")?;
        if !(half_side > 0.0 && half_side.is_finite()) {
            return Err(Error::Domain(format!("half side must be positive, got {half_side}")).into());
        }
        *slot = Box::into_raw(Box::new(LsMask(AssemblyMask::Square { half_side })));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ls_mask_dim(mask: *const LsMask, d: *mut usize) -> i32 {
    guard(|| {
        *out(d, "d")? = get(mask, "mask")?.0.dim();
        Ok(())
    })
}

/// Releases a mask. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ls_mask_free(mask: *mut LsMask) {
    if !mask.is_null() {
        drop(Box::from_raw(mask));
    }
}

/// Eigenvalue for `phi_n` of the disc localization operator with window `phi_k`.
#[no_mangle]
pub unsafe extern "C" fn ls_eig_disc(n: u32, k: u32, radius: f64, result: *mut f64) -> i32 {
    guard(|| {
        let slot = out(result, "result")?;
        *slot = eig_disc(n as usize, k as usize, radius)?;
        Ok(())
    })
}

/// Eigenvalue for `phi_n` with window `phi_k` and a polyradial mask.
#[no_mangle]
pub unsafe extern "C" fn ls_eig_weighted(mask: *const LsMask, n: *const u32, k: *const u32, result: *mut f64) -> i32 {
    guard(|| {
        let slot = out(result, "result")?;
        let m = match &get(mask, "mask")?.0 {
            AssemblyMask::Polyradial(m) => m,
            AssemblyMask::Square { .. } => {
                return Err(Error::Unsupported("closed-form eigenvalues need a polyradial mask".into()).into())
            }
        };
        *slot = eig_weighted(&index(n, m.d, "n")?, &index(k, m.d, "k")?, m)?;
        Ok(())
    })
}

/// Assembles the localization operator on the first `n_basis` basis elements
/// per axis. With a null `frame` the window is the Hermite function `phi_k`,
/// otherwise the Hagedorn wavepacket `phi_k[Q, P]`.
#[no_mangle]
pub unsafe extern "C" fn ls_assemble_localization(
    mask: *const LsMask,
    frame: *const LsFrame,
    k: *const u32,
    n_basis: usize,
    operator: *mut *mut LsOperator,
) -> i32 {
    guard(|| {
        let slot = out(operator, "operator")?;
        let m = &get(mask, "mask")?.0;
        let d = m.dim();
        let k = index(k, d, "k")?;
        let window = match frame.as_ref() {
            None => Window::Hermite(k),
            Some(f) => Window::Hagedorn { frame: f.0.clone(), k },
        };
        let op = assemble_localization(m, &window, n_basis)?;
        let eigenvalues = diagonalize(&op).values;
        *slot = Box::into_raw(Box::new(LsOperator { op, eigenvalues }));
        Ok(())
    })
}

/// Number of basis elements (rows) of the operator matrix.
#[no_mangle]
pub unsafe extern "C" fn ls_operator_dim(operator: *const LsOperator, dim: *mut usize) -> i32 {
    guard(|| {
        *out(dim, "dim")? = get(operator, "operator")?.op.dim();
        Ok(())
    })
}

/// Row-major matrix entries `<A phi_n, phi_m>` into `buf` of length `len >= dim^2`.
#[no_mangle]
pub unsafe extern "C" fn ls_operator_entries(operator: *const LsOperator, buf: *mut LsComplex, len: usize) -> i32 {
    guard(|| {
        let op = &get(operator, "operator")?.op;
        let n = op.dim();
        if buf.is_null() {
            return Err(Failure::Null("buf"));
        }
        if len < n * n {
            return Err(Failure::Buffer { needed: n * n });
        }
        let dst = std::slice::from_raw_parts_mut(buf, n * n);
        for r in 0..n {
            for c in 0..n {
                dst[r * n + c] = op.entries[(r, c)].into();
            }
        }
        Ok(())
    })
}

/// Eigenvalues in descending order into `buf` of length `len >= dim`.
#[no_mangle]
pub unsafe extern "C" fn ls_operator_eigenvalues(operator: *const LsOperator, buf: *mut f64, len: usize) -> i32 {
    guard(|| {
        let vals = &get(operator, "operator")?.eigenvalues;
        if buf.is_null() {
            return Err(Failure::Null("buf"));
        }
        if len < vals.len() {
            return Err(Failure::Buffer { needed: vals.len() });
        }
        std::slice::from_raw_parts_mut(buf, vals.len()).copy_from_slice(vals);
        Ok(())
    })
}

/// Releases an operator. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ls_operator_free(operator: *mut LsOperator) {
    if !operator.is_null() {
        drop(Box::from_raw(operator));
    }
}

/// Williamson normal form `M = T K T^T` of a symmetric positive definite
/// row-major `2d x 2d` matrix. Writes `T` (row-major, `4d^2` values) and the
/// `d` symplectic eigenvalues in ascending order.
#[no_mangle]
pub unsafe extern "C" fn ls_williamson(d: usize, m: *const f64, t: *mut f64, k: *mut f64) -> i32 {
    guard(|| {
        let n = 2 * d;
        let src = slice(m, n * n, "m")?;
        if t.is_null() {
            return Err(Failure::Null("t"));
        }
        if k.is_null() {
            return Err(Failure::Null("k"));
        }
        let w = williamson(&nalgebra::DMatrix::from_row_slice(n, n, src))?;
        let t_out = std::slice::from_raw_parts_mut(t, n * n);
        for r in 0..n {
            for c in 0..n {
                t_out[r * n + c] = w.t.matrix()[(r, c)];
            }
        }
        std::slice::from_raw_parts_mut(k, d).copy_from_slice(&w.k);
        Ok(())
    })
}
