//! Dense matrices of localization and mixed-state localization operators in
//! truncated Hermite or Hagedorn bases, their diagonalization, and the
//! double-orthogonality check.

use crate::eigenvalues::{u_cutoff, EigenvalueTable, Method, StateSymbol};
use crate::error::{Error, Result};
use crate::phasespace::{FramePhase, PhaseGrid};
use crate::quad::{Integral, Tolerance};
use crate::reinhardt::{iterated_integral, MaskSpec, Profile, ShadowRegion};
use crate::specfun::MultiIndex;
use crate::symplectic::{frame_to_symplectic, LagrangianFrame, SymplecticMatrix};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::io::Write;

/// Largest basis size per axis accepted for `d = 1` and `d = 2`.
pub const MAX_BASIS: [usize; 2] = [32, 8];
/// Extra basis elements assembled in `d = 1` to measure leakage out of the truncation.
const LEAKAGE_PAD: usize = 2;
/// Eigenpairs whose dominant index lies this close to the truncation edge are untrusted.
const EDGE_MARGIN: usize = 2;

/// Analysis window of a localization operator.
#[derive(Clone, Debug)]
pub enum Window {
    /// Hermite function `phi_k`; the basis is the Hermite basis.
    Hermite(MultiIndex),
    /// Hagedorn wavepacket `phi_k[Q, P]`; the basis is the Hagedorn basis of the
    /// same frame and the mask is transported, `F o T^{-1}`.
    Hagedorn { frame: LagrangianFrame, k: MultiIndex },
}

impl Window {
    pub fn dim(&self) -> usize {
        match self {
            Window::Hermite(k) => k.dim(),
            Window::Hagedorn { k, .. } => k.dim(),
        }
    }

    fn index(&self) -> &MultiIndex {
        match self {
            Window::Hermite(k) | Window::Hagedorn { k, .. } => k,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Window::Hermite(k) => format!("hermite:{k}"),
            Window::Hagedorn { k, .. } => format!("hagedorn:{k}"),
        }
    }
}

/// Masks accepted by the assembly: polyradial ones, and the square
/// `[-a, a]^2` in `d = 1`, which is not a Reinhardt domain.
#[derive(Clone, Debug)]
pub enum AssemblyMask {
    Polyradial(MaskSpec),
    Square { half_side: f64 },
}

impl From<MaskSpec> for AssemblyMask {
    fn from(m: MaskSpec) -> Self {
        AssemblyMask::Polyradial(m)
    }
}

impl AssemblyMask {
    pub fn dim(&self) -> usize {
        match self {
            AssemblyMask::Polyradial(m) => m.d,
            AssemblyMask::Square { .. } => 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    pub quadrature_error: f64,
    pub converged: bool,
    pub hermitian_residual: f64,
    /// Largest `|A_{mn}|` with `n` in the basis and `m` just outside it (`d = 1`).
    pub leakage: Option<f64>,
    pub evaluations: usize,
}

#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub basis: Vec<MultiIndex>,
    pub descriptor: String,
    /// `entries[(m, n)] = <A phi_n, phi_m>`
    pub entries: DMatrix<Complex64>,
    pub diagnostics: Diagnostics,
}

/// Indices `0..n` in `d = 1`, the box `n` per axis otherwise.
pub fn basis_indices(d: usize, n_basis: usize) -> Result<Vec<MultiIndex>> {
    if n_basis == 0 {
        return Err(Error::Config("basis size must be positive".into()));
    }
    match d {
        1 | 2 if n_basis > MAX_BASIS[d - 1] => Err(Error::Config(format!(
            "basis size {n_basis} exceeds the limit {} for d = {d}",
            MAX_BASIS[d - 1]
        ))),
        1 | 2 => Ok(MultiIndex::in_box(d, n_basis - 1)),
        _ => Err(Error::Unsupported(format!("matrix assembly for d = {d}"))),
    }
}

fn pair_count(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Upper-triangle pairs `(i, j)`, `i <= j`, in row-major order.
fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect()
}

fn hermitian_from_pairs(n: usize, values: &[f64], diag_shift: f64) -> DMatrix<Complex64> {
    let mut a = DMatrix::zeros(n, n);
    for (p, &(i, j)) in pairs(n).iter().enumerate() {
        let v = Complex64::new(values[2 * p], values[2 * p + 1]);
        a[(i, j)] = v;
        a[(j, i)] = v.conj();
    }
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re + diag_shift, 0.0);
    }
    a
}

fn hermitian_residual(a: &DMatrix<Complex64>) -> f64 {
    (a - a.adjoint()).norm()
}

/// Work items per parallel chunk. Fixed so sums do not depend on the thread count.
const CHUNK: usize = 64;

/// `sum_i term(i)` over `0..count` for vector-valued terms, parallel over fixed
/// chunks and combined in order, so the result is bitwise reproducible.
fn chunked_sum<T>(count: usize, dim: usize, term: T) -> Vec<f64>
where
    T: Fn(usize, &mut [f64], &mut [f64]) + Sync,
{
    let partial: Vec<Vec<f64>> = (0..count.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![0.0; dim];
            let mut buf = vec![0.0; dim];
            for i in c * CHUNK..((c + 1) * CHUNK).min(count) {
                term(i, &mut acc, &mut buf);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; dim];
    for p in &partial {
        total.iter_mut().zip(p).for_each(|(t, v)| *t += v);
    }
    total
}

/// Integrates `F_0(tau(z)) fill(z)` over `C^d` for a polyradial mask, with
/// `fill` writing the pair values (re, im interleaved) at `z`.
///
/// Radii are integrated adaptively in `u_j = pi r_j^2`, where shadows of balls
/// have flat boundaries; angles use a trapezoid rule with `n_theta` nodes per
/// axis, exact for trigonometric polynomials of degree below `n_theta`.
fn polycylindrical<Fill>(mask: &MaskSpec, fill: &Fill, dim: usize, n_theta: usize, degree: usize) -> Result<Integral>
where
    Fill: Fn(&[Complex64], &mut [f64]) + Sync,
{
    let d = mask.d;
    let nodes = n_theta.pow(d as u32);
    let weight = (n_theta as f64).powi(-(d as i32));
    let angles: Vec<(f64, f64)> = (0..n_theta).map(|t| (2.0 * PI * t as f64 / n_theta as f64).sin_cos()).collect();
    let angular = |u: &[f64], out: &mut [f64]| {
        let r: Vec<f64> = u.iter().map(|v| (v / PI).sqrt()).collect();
        let sum = chunked_sum(nodes, dim, |node, acc, buf| {
            let mut z = vec![Complex64::new(0.0, 0.0); d];
            let mut rest = node;
            for (j, zj) in z.iter_mut().enumerate() {
                let (s, c) = angles[rest % n_theta];
                rest /= n_theta;
                *zj = Complex64::new(r[j] * c, r[j] * s);
            }
            fill(&z, buf);
            acc.iter_mut().zip(buf.iter()).for_each(|(a, b)| *a += b);
        });
        // dz_j = r_j dr_j dtheta_j = du_j dtheta_j / 2 pi
        out.iter_mut().zip(&sum).for_each(|(o, s)| *o = s * weight);
    };
    if mask.is_dirac() {
        let mut out = vec![0.0; dim];
        fill(&vec![Complex64::new(0.0, 0.0); d], &mut out);
        return Ok(Integral { value: out, error: 0.0, converged: true, evaluations: 1 });
    }
    mask.integrate_profile_u(&vec![1.0 / PI; d], u_cutoff(degree), angular, dim)
}

/// Iterated adaptive integration of `fill` over the square `[-a, a]^2`.
fn square_cartesian<Fill>(a: f64, fill: &Fill, dim: usize) -> Integral
where
    Fill: Fn(&[Complex64], &mut [f64]) + Sync,
{
    iterated_integral(
        |_: &[f64]| vec![(-a, a)],
        2,
        |p, out| fill(&[Complex64::new(p[0], p[1])], out),
        dim,
        Tolerance::new(1e-15, 1e-12),
    )
}

/// STFT pair values `V_g phi_j(z) conj(V_g phi_i(z))` for a window.
struct StftPairs {
    phase: FramePhase,
    transport: Option<SymplecticMatrix>,
    k: MultiIndex,
    basis: Vec<MultiIndex>,
}

impl StftPairs {
    fn new(window: &Window, basis: Vec<MultiIndex>) -> Result<Self> {
        Ok(match window {
            Window::Hermite(k) => StftPairs { phase: FramePhase::standard(k.dim()), transport: None, k: k.clone(), basis },
            Window::Hagedorn { frame, k } => StftPairs {
                phase: FramePhase::new(frame)?,
                transport: Some(frame_to_symplectic(frame)),
                k: k.clone(),
                basis,
            },
        })
    }

    /// Evaluates at `z = T w` when transported, so the mask is read at `w`.
    fn fill(&self, w: &[Complex64], out: &mut [f64]) {
        let z = match &self.transport {
            Some(t) => t.apply_complex(w),
            None => w.to_vec(),
        };
        let zeta = self.phase.zeta(&z);
        let v: Vec<Complex64> = self.basis.iter().map(|n| self.phase.stft_with_zeta(n, &self.k, &z, &zeta)).collect();
        for (p, (i, j)) in pairs(v.len()).into_iter().enumerate() {
            let e = v[j] * v[i].conj();
            out[2 * p] = e.re;
            out[2 * p + 1] = e.im;
        }
    }
}

fn finish(
    full_basis: Vec<MultiIndex>,
    n_keep: usize,
    integral: Integral,
    shift: f64,
    descriptor: String,
) -> OperatorMatrix {
    let n_full = full_basis.len();
    let full = hermitian_from_pairs(n_full, &integral.value, shift);
    let leakage = (n_full > n_keep).then(|| {
        let mut worst: f64 = 0.0;
        for m in n_keep..n_full {
            for n in 0..n_keep {
                worst = worst.max(full[(m, n)].norm());
            }
        }
        worst
    });
    let entries = full.view((0, 0), (n_keep, n_keep)).into_owned();
    let diagnostics = Diagnostics {
        quadrature_error: integral.error,
        converged: integral.converged,
        hermitian_residual: hermitian_residual(&entries),
        leakage,
        evaluations: integral.evaluations,
    };
    OperatorMatrix { basis: full_basis[..n_keep].to_vec(), descriptor, entries, diagnostics }
}

/// Matrix of the localization operator with mask `F` and the given window,
/// `A_{mn} = c delta_{mn} + int F_0(tau(z)) V_g phi_n(z) conj(V_g phi_m(z)) dz`,
/// in the first `n_basis` basis functions per axis.
pub fn assemble_localization(mask: &AssemblyMask, window: &Window, n_basis: usize) -> Result<OperatorMatrix> {
    let d = window.dim();
    if mask.dim() != d {
        return Err(Error::Dimension { expected: d, got: mask.dim() });
    }
    let basis = basis_indices(d, n_basis)?;
    let n_keep = basis.len();
    let full_basis = if d == 1 { basis_indices(1, n_basis + LEAKAGE_PAD).unwrap_or(basis) } else { basis };
    let nb = full_basis.len();
    let dim = 2 * pair_count(nb);
    let kmax = window.index().iter().cloned().max().unwrap_or(0);
    let max_entry = full_basis.iter().flat_map(|b| b.iter().cloned()).max().unwrap_or(0);
    let pairs_eval = StftPairs::new(window, full_basis.clone())?;
    let fill = |z: &[Complex64], out: &mut [f64]| pairs_eval.fill(z, out);
    let descriptor = window.label();

    match mask {
        AssemblyMask::Polyradial(m) => {
            // Products V_n conj(V_m) carry the angular frequency n - m per axis.
            let n_theta = max_entry + 6;
            let integral = polycylindrical(m, &fill, dim, n_theta, 2 * (max_entry + kmax))?;
            Ok(finish(full_basis, n_keep, integral, m.constant, descriptor))
        }
        AssemblyMask::Square { half_side } => {
            if !matches!(window, Window::Hermite(_)) {
                return Err(Error::Unsupported("the square mask is assembled with Hermite windows only".into()));
            }
            if !(*half_side > 0.0) {
                return Err(Error::Config(format!("square half-side must be positive, got {half_side}")));
            }
            let integral = square_cartesian(*half_side, &fill, dim);
            Ok(finish(full_basis, n_keep, integral, 0.0, descriptor))
        }
    }
}

/// Grid used to sample `F * a_S` for smooth state symbols.
pub fn mixed_grid() -> PhaseGrid {
    PhaseGrid::default_for(1)
}

/// Angular trapezoid nodes in the convolution `F_0 * a_S`.
const CONVOLUTION_THETA: usize = 128;

/// `(F_0 * a)(x, w)` for a polyradial `F_0` (`d = 1`) in polar coordinates
/// around the origin.
fn mask_convolution(mask: &MaskSpec, a: &(dyn Fn(f64, f64) -> f64 + Sync), x: f64, w: f64) -> f64 {
    let tol = Tolerance::new(1e-15, 1e-11);
    let angular = |s: f64| -> f64 {
        let mut acc = 0.0;
        for t in 0..CONVOLUTION_THETA {
            let (sn, cs) = (2.0 * PI * t as f64 / CONVOLUTION_THETA as f64).sin_cos();
            acc += a(x - s * cs, w - s * sn);
        }
        acc * 2.0 * PI / CONVOLUTION_THETA as f64 * s
    };
    let radial = |lo: f64, hi: f64| crate::quad::integrate_scalar(|s| mask.profile_at(&[s]) * angular(s), lo, hi, tol).scalar();
    match &mask.profile {
        Profile::Zero | Profile::Dirac => 0.0,
        Profile::Indicator { shadow, .. } => shadow.sections(&[]).iter().map(|&(lo, hi)| radial(lo, hi)).sum(),
        Profile::RadialTable { table } => radial(0.0, table.last().unwrap().0),
        _ => crate::quad::integrate_to_infinity(|s, o| o[0] = mask.profile_at(&[s]) * angular(s), 0.0, 1, tol).scalar(),
    }
}

/// Matrix of the mixed-state localization operator `F * S`,
/// `A_{mn} = int F(z) Q_S(phi_n, phi_m)(z) dz = int (F * a_S)(z) W(phi_n, phi_m)(z) dz`.
///
/// The parity state pairs `F` with cross-Wigner distributions directly, in any
/// dimension. Smooth symbols (`d = 1`) sample `F * a_S` on [`mixed_grid`] by
/// polar quadrature and integrate against `W(phi_n, phi_m)` with the
/// trapezoid rule, which is spectrally accurate for these decaying functions.
pub fn assemble_mixed(mask: &MaskSpec, state: &StateSymbol, n_basis: usize) -> Result<OperatorMatrix> {
    let d = mask.d;
    if let Some(sd) = state.dim() {
        if sd != d {
            return Err(Error::Dimension { expected: d, got: sd });
        }
    }
    let basis = basis_indices(d, n_basis)?;
    let n_keep = basis.len();
    let full_basis = if d == 1 { basis_indices(1, n_basis + LEAKAGE_PAD).unwrap_or(basis) } else { basis };
    let nb = full_basis.len();
    let dim = 2 * pair_count(nb);
    let max_entry = full_basis.iter().flat_map(|b| b.iter().cloned()).max().unwrap_or(0);
    let phase = FramePhase::standard(d);
    let wigner_fill = |z: &[Complex64], out: &mut [f64]| {
        for (p, (i, j)) in pairs(nb).into_iter().enumerate() {
            let e = phase.wigner(&full_basis[j], &full_basis[i], z).expect("dimensions checked");
            out[2 * p] = e.re;
            out[2 * p + 1] = e.im;
        }
    };
    let shift = mask.constant * state.mass();

    if let StateSymbol::Parity = state {
        if mask.is_dirac() {
            return Err(Error::Unsupported("a point-mass mask cannot be paired with the parity state".into()));
        }
        let integral = polycylindrical(mask, &wigner_fill, dim, max_entry + 6, 2 * max_entry)?;
        return Ok(finish(full_basis, n_keep, integral, shift, "parity".into()));
    }
    if d != 1 {
        return Err(Error::Unsupported("smooth state symbols are assembled for d = 1".into()));
    }
    let a = |x: f64, w: f64| state.value_1d(x, w).expect("non-parity symbols have values");
    let grid = mixed_grid();
    let h = grid.step();
    // W(phi_n, phi_m) is negligible beyond this radius.
    let r_cut = (u_cutoff(2 * max_entry) / (2.0 * PI)).sqrt();
    let points: Vec<(f64, f64)> = (0..grid.len())
        .map(|lin| {
            let p = grid.point(lin);
            (p[0], p[1])
        })
        .filter(|(x, w)| x.hypot(*w) <= r_cut)
        .collect();
    let g: Vec<f64> = points
        .par_iter()
        .map(|&(x, w)| if mask.is_dirac() { a(x, w) } else { mask_convolution(mask, &a, x, w) })
        .collect();
    let value = chunked_sum(points.len(), dim, |i, acc, buf| {
        let (x, w) = points[i];
        wigner_fill(&[Complex64::new(x, w)], buf);
        acc.iter_mut().zip(buf.iter()).for_each(|(s, b)| *s += g[i] * b);
    })
    .into_iter()
    .map(|v| v * h * h)
    .collect();
    let integral = Integral { value, error: f64::NAN, converged: true, evaluations: points.len() };
    let mut op = finish(full_basis, n_keep, integral, shift, "state".into());
    op.diagnostics.quadrature_error = f64::NAN;
    Ok(op)
}

/// Eigen-decomposition of an [`OperatorMatrix`], eigenvalues descending.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: DMatrix<Complex64>,
    /// Basis position of the largest coefficient of each eigenvector.
    pub dominant: Vec<usize>,
    /// False for eigenpairs concentrated near the truncation edge.
    pub trusted: Vec<bool>,
    /// `max ||A v - lambda v||`
    pub residual: f64,
}

impl Spectrum {
    /// Angle between eigenvector `col` and the basis vector `e_idx`.
    pub fn basis_angle(&self, col: usize, idx: usize) -> f64 {
        let c = self.vectors[(idx, col)].norm().min(1.0);
        c.acos()
    }

    pub fn to_table(&self, op: &OperatorMatrix, mask_label: &str) -> EigenvalueTable {
        EigenvalueTable {
            indices: self.dominant.iter().map(|&i| op.basis[i].clone()).collect(),
            values: self.values.clone(),
            errors: vec![self.residual; self.values.len()],
            tag: op.descriptor.clone(),
            mask: mask_label.to_string(),
            method: Method::Matrix,
        }
    }
}

/// Hermitian eigen-decomposition. Ties are broken by the dominant
/// coefficient index so the order does not depend on the solver.
pub fn diagonalize(op: &OperatorMatrix) -> Spectrum {
    let a = (&op.entries + op.entries.adjoint()).map(|v| v * 0.5);
    let n = a.nrows();
    let eig = SymmetricEigen::new(a.clone());
    let dominant_of = |c: usize| -> usize {
        let col = eig.eigenvectors.column(c);
        let mut best = 0;
        for r in 0..n {
            if col[r].norm() > col[best].norm() + 1e-12 {
                best = r;
            }
        }
        best
    };
    let mut order: Vec<(f64, usize, usize)> = (0..n).map(|c| (eig.eigenvalues[c], dominant_of(c), c)).collect();
    order.sort_by(|x, y| {
        let tie = 1e-12 * x.0.abs().max(y.0.abs()).max(1.0);
        if (x.0 - y.0).abs() <= tie {
            x.1.cmp(&y.1)
        } else {
            y.0.total_cmp(&x.0)
        }
    });
    let mut vectors = DMatrix::zeros(n, n);
    let mut residual: f64 = 0.0;
    for (slot, &(lambda, _, c)) in order.iter().enumerate() {
        // Fix the phase so the dominant coefficient is real and positive.
        let col = eig.eigenvectors.column(c);
        let dom = col[order[slot].1];
        let phase = if dom.norm() > 0.0 { dom.conj() / dom.norm() } else { Complex64::new(1.0, 0.0) };
        for r in 0..n {
            vectors[(r, slot)] = col[r] * phase;
        }
        let v = vectors.column(slot);
        residual = residual.max((&a * v - v * Complex64::new(lambda, 0.0)).norm());
    }
    let n_axis = op.basis.first().map(|b| b.dim()).unwrap_or(1);
    let edge = if n == 0 { 0 } else { (n as f64).powf(1.0 / n_axis as f64).round() as usize };
    let trusted = order
        .iter()
        .map(|&(_, dom, _)| op.basis[dom].iter().all(|&v| v + EDGE_MARGIN < edge))
        .collect();
    Spectrum {
        values: order.iter().map(|o| o.0).collect(),
        vectors,
        dominant: order.iter().map(|o| o.1).collect(),
        trusted,
        residual,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalityReport {
    pub basis: Vec<String>,
    /// Diagonal of the Gram matrix with respect to `dz` (norms of `V_g phi_n`).
    pub plane_diagonal: Vec<f64>,
    /// Diagonal of the Gram matrix with respect to `F dz` (candidate eigenvalues).
    pub mask_diagonal: Vec<f64>,
    pub plane_offdiag: f64,
    pub mask_offdiag: f64,
    /// Position `(m, n)` of the largest off-diagonal entry of the `F dz` Gram matrix.
    pub worst_entry: (usize, usize),
    pub tolerance: f64,
    pub passed: bool,
}

fn max_offdiag(a: &DMatrix<Complex64>) -> (f64, (usize, usize)) {
    let mut best = (0.0, (0, 0));
    for m in 0..a.nrows() {
        for n in 0..a.ncols() {
            if m != n && a[(m, n)].norm() > best.0 {
                best = (a[(m, n)].norm(), (m, n));
            }
        }
    }
    best
}

/// Gram matrices of `{V_g phi_n}` with respect to `dz` and to `F(z) dz`.
/// The `dz` Gram matrix is integrated numerically over a disc large enough
/// that the omitted tail is negligible, not taken from orthogonality relations.
pub fn verify_double_orthogonality(window: &Window, mask: &AssemblyMask, n_basis: usize, tol: f64) -> Result<OrthogonalityReport> {
    let d = window.dim();
    let max_entry = n_basis + window.index().iter().cloned().max().unwrap_or(0) + LEAKAGE_PAD;
    let big = (u_cutoff(2 * max_entry) / PI).sqrt();
    let plane = MaskSpec::indicator(ShadowRegion::Ball { d, radius: big * (d as f64).sqrt() })?;
    let g_plane = assemble_localization(&AssemblyMask::Polyradial(plane), window, n_basis)?;
    let g_mask = assemble_localization(mask, window, n_basis)?;
    let (plane_offdiag, _) = max_offdiag(&g_plane.entries);
    let (mask_offdiag, worst_entry) = max_offdiag(&g_mask.entries);
    let diag = |a: &DMatrix<Complex64>| (0..a.nrows()).map(|i| a[(i, i)].re).collect::<Vec<f64>>();
    let plane_diagonal = diag(&g_plane.entries);
    let norm_err = plane_diagonal.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    Ok(OrthogonalityReport {
        basis: g_mask.basis.iter().map(|b| b.to_string()).collect(),
        mask_diagonal: diag(&g_mask.entries),
        plane_diagonal,
        plane_offdiag,
        mask_offdiag,
        worst_entry,
        tolerance: tol,
        passed: plane_offdiag <= tol && mask_offdiag <= tol && norm_err <= tol,
    })
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// One row per matrix row, columns `re_0, im_0, re_1, im_1, ...`.
    pub fn write_csv<W: Write>(&self, mut w: W, comment: Option<&str>) -> Result<()> {
        if let Some(c) = comment {
            writeln!(w, "# {c}")?;
        }
        let n = self.dim();
        let header: Vec<String> = (0..n).flat_map(|j| [format!("re_{j}"), format!("im_{j}")]).collect();
        writeln!(w, "{}", header.join(","))?;
        for m in 0..n {
            let row: Vec<String> = (0..n)
                .flat_map(|j| {
                    let v = self.entries[(m, j)];
                    [format!("{:.15e}", v.re), format!("{:.15e}", v.im)]
                })
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// JSON sidecar describing the basis and the assembly diagnostics.
    pub fn sidecar_json(&self) -> serde_json::Value {
        serde_json::json!({
            "descriptor": self.descriptor,
            "basis": self.basis.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            "diagnostics": self.diagnostics,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_limits() {
        assert_eq!(basis_indices(1, 4).unwrap().len(), 4);
        assert_eq!(basis_indices(2, 3).unwrap().len(), 9);
        assert!(basis_indices(1, 33).is_err());
        assert!(basis_indices(2, 9).is_err());
        assert!(basis_indices(3, 2).is_err());
    }

    #[test]
    fn full_plane_mask_is_the_identity() {
        let m = MaskSpec::full_plane(1, 1.0).unwrap();
        let op = assemble_localization(&m.into(), &Window::Hermite(MultiIndex(vec![0])), 5).unwrap();
        assert!((op.entries.clone() - DMatrix::identity(5, 5)).norm() < 1e-15);
    }

    #[test]
    fn diagonal_input_is_returned_sorted() {
        let basis = basis_indices(1, 3).unwrap();
        let entries = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(0.2, 0.0),
            Complex64::new(0.9, 0.0),
            Complex64::new(0.5, 0.0),
        ]));
        let op = OperatorMatrix {
            basis,
            descriptor: "test".into(),
            entries,
            diagnostics: Diagnostics { quadrature_error: 0.0, converged: true, hermitian_residual: 0.0, leakage: None, evaluations: 0 },
        };
        let s = diagonalize(&op);
        assert_eq!(s.values, vec![0.9, 0.5, 0.2]);
        assert_eq!(s.dominant, vec![1, 2, 0]);
        assert!(s.residual < 1e-14);
        assert!(s.basis_angle(0, 1) < 1e-7);
    }

    #[test]
    fn csv_dump_shape() {
        let m = MaskSpec::disc(1.0).unwrap();
        let op = assemble_localization(&m.into(), &Window::Hermite(MultiIndex(vec![0])), 3).unwrap();
        let mut buf = Vec::new();
        op.write_csv(&mut buf, None).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text.lines().next().unwrap().split(',').count(), 6);
        assert!(op.sidecar_json()["diagnostics"]["converged"].as_bool().unwrap());
    }
}
