//! Closed-form phase-space transforms of Hermite functions and Hagedorn
//! wavepackets.

use super::grid::{GridFunction, PhaseGrid};
use crate::error::{Error, Result};
use crate::specfun::{complex_hermite, factorial, laguerre, MultiIndex};
use crate::symplectic::LagrangianFrame;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

fn check_dims(n: &MultiIndex, k: &MultiIndex, z: &[Complex64]) -> Result<()> {
    if n.dim() != z.len() || k.dim() != z.len() {
        return Err(Error::Dimension { expected: z.len(), got: n.dim().max(k.dim()) });
    }
    Ok(())
}

/// `V_{phi_k} phi_n(z) = prod_j e^{-i pi x_j w_j} e^{-pi |z_j|^2 / 2} conj(H_{n_j,k_j}(z_j))`.
pub fn hermite_stft_closed(n: &MultiIndex, k: &MultiIndex, z: &[Complex64]) -> Result<Complex64> {
    check_dims(n, k, z)?;
    Ok(hermite_stft_unchecked(n, k, z))
}

pub(crate) fn hermite_stft_unchecked(n: &MultiIndex, k: &MultiIndex, z: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for (j, zj) in z.iter().enumerate() {
        let env = (-PI * zj.norm_sqr() / 2.0).exp();
        acc *= Complex64::from_polar(env, -PI * zj.re * zj.im) * complex_hermite(n.0[j], k.0[j], *zj).conj();
    }
    acc
}

/// Phase-space data of a frame: maps `z` to `zeta = T^{-1} z` read in `C^d`,
/// which equals `-i P^T x + i Q^T w`.
#[derive(Clone, Debug)]
pub struct FramePhase {
    q: DMatrix<Complex64>,
    p: DMatrix<Complex64>,
}

impl FramePhase {
    pub fn new(frame: &LagrangianFrame) -> Result<Self> {
        frame.validate()?;
        Ok(FramePhase { q: frame.q.clone(), p: frame.p.clone() })
    }

    pub fn standard(d: usize) -> Self {
        let f = LagrangianFrame::standard(d);
        FramePhase { q: f.q, p: f.p }
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn zeta(&self, z: &[Complex64]) -> Vec<Complex64> {
        let d = self.dim();
        let i = Complex64::i();
        (0..d)
            .map(|j| (0..d).map(|l| -i * self.p[(l, j)] * z[l].re + i * self.q[(l, j)] * z[l].im).sum())
            .collect()
    }

    /// `V_{phi_k[Q,P]} phi_n[Q,P](z) = e^{-pi i <x, w>} e^{-pi |zeta|^2 / 2} prod_j conj(H_{n_j,k_j}(zeta_j))`.
    pub fn stft(&self, n: &MultiIndex, k: &MultiIndex, z: &[Complex64]) -> Result<Complex64> {
        check_dims(n, k, z)?;
        let zeta = self.zeta(z);
        Ok(self.stft_with_zeta(n, k, z, &zeta))
    }

    pub(crate) fn stft_with_zeta(&self, n: &MultiIndex, k: &MultiIndex, z: &[Complex64], zeta: &[Complex64]) -> Complex64 {
        let xw: f64 = z.iter().map(|c| c.re * c.im).sum();
        let r2: f64 = zeta.iter().map(|c| c.norm_sqr()).sum();
        let mut acc = Complex64::from_polar((-PI * r2 / 2.0).exp(), -PI * xw);
        for (j, zj) in zeta.iter().enumerate() {
            acc *= complex_hermite(n.0[j], k.0[j], *zj).conj();
        }
        acc
    }

    /// `W(phi_n[Q,P], phi_k[Q,P])(z) = 2^d (-1)^{|k|} e^{-2 pi |zeta|^2} prod_j conj(H_{n_j,k_j}(2 zeta_j))`.
    ///
    /// The argument `2 zeta` is what the identity
    /// `W(f, g)(z) = 2^d e^{4 pi i <x, w>} V_{g(-.)} f(2z)` gives.
    pub fn wigner(&self, n: &MultiIndex, k: &MultiIndex, z: &[Complex64]) -> Result<Complex64> {
        check_dims(n, k, z)?;
        let zeta = self.zeta(z);
        let d = self.dim();
        let r2: f64 = zeta.iter().map(|c| c.norm_sqr()).sum();
        let sign = if k.total() % 2 == 0 { 1.0 } else { -1.0 };
        let mut acc = Complex64::new(sign * 2f64.powi(d as i32) * (-2.0 * PI * r2).exp(), 0.0);
        for (j, zj) in zeta.iter().enumerate() {
            acc *= complex_hermite(n.0[j], k.0[j], 2.0 * zj).conj();
        }
        Ok(acc)
    }
}

pub fn hagedorn_stft_closed(frame: &LagrangianFrame, n: &MultiIndex, k: &MultiIndex, z: &[Complex64]) -> Result<Complex64> {
    FramePhase::new(frame)?.stft(n, k, z)
}

pub fn hagedorn_wigner_closed(frame: &LagrangianFrame, n: &MultiIndex, k: &MultiIndex, z: &[Complex64]) -> Result<Complex64> {
    FramePhase::new(frame)?.wigner(n, k, z)
}

/// Cross-Wigner distribution `W(phi_n, phi_m)` of Hermite functions.
pub fn hermite_wigner_closed(n: &MultiIndex, m: &MultiIndex, z: &[Complex64]) -> Result<Complex64> {
    FramePhase::standard(z.len()).wigner(n, m, z)
}

/// An operator `S = sum c_{ab} phi_a (x) phi_b`, i.e. `S h = sum c_{ab} <h, phi_b> phi_a`,
/// over a finite Hermite basis.
#[derive(Clone, Debug)]
pub struct HermiteOperator {
    pub basis: Vec<MultiIndex>,
    pub coeffs: DMatrix<Complex64>,
}

impl HermiteOperator {
    pub fn new(basis: Vec<MultiIndex>, coeffs: DMatrix<Complex64>) -> Result<Self> {
        if coeffs.nrows() != basis.len() || coeffs.ncols() != basis.len() {
            return Err(Error::Dimension { expected: basis.len(), got: coeffs.nrows().max(coeffs.ncols()) });
        }
        let d = basis.first().map(|b| b.dim()).unwrap_or(0);
        if basis.iter().any(|b| b.dim() != d) {
            return Err(Error::Config("basis indices of mixed dimension".into()));
        }
        Ok(HermiteOperator { basis, coeffs })
    }

    /// Diagonal operator `sum w_a phi_a (x) phi_a`.
    pub fn diagonal(basis: Vec<MultiIndex>, weights: &[f64]) -> Result<Self> {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            weights.len(),
            weights.iter().map(|&w| Complex64::new(w, 0.0)),
        ));
        Self::new(basis, m)
    }

    pub fn trace(&self) -> Complex64 {
        self.coeffs.trace()
    }

    /// `F_W(S)(z) = e^{-pi i <x, w>} tr(pi(-z) S)`, using
    /// `<pi(-z) phi_a, phi_b> = conj(V_{phi_a} phi_b(-z))`.
    pub fn fourier_wigner_at(&self, z: &[Complex64]) -> Complex64 {
        let xw: f64 = z.iter().map(|c| c.re * c.im).sum();
        let minus: Vec<Complex64> = z.iter().map(|c| -c).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (ia, a) in self.basis.iter().enumerate() {
            for (ib, b) in self.basis.iter().enumerate() {
                let c = self.coeffs[(ia, ib)];
                if c != Complex64::new(0.0, 0.0) {
                    acc += c * hermite_stft_unchecked(b, a, &minus).conj();
                }
            }
        }
        acc * Complex64::from_polar(1.0, -PI * xw)
    }
}

pub fn fourier_wigner(op: &HermiteOperator, grid: &PhaseGrid) -> Result<GridFunction> {
    if op.basis.first().map(|b| b.dim()) != Some(grid.d) {
        return Err(Error::Dimension { expected: grid.d, got: op.basis.first().map(|b| b.dim()).unwrap_or(0) });
    }
    Ok(GridFunction::sample(*grid, |z| op.fourier_wigner_at(z)))
}

/// `gamma_E(z) = e^{-pi |z|^2 / E} / E` on the phase plane.
pub fn heat_kernel(e: f64, z: Complex64) -> f64 {
    (-PI * z.norm_sqr() / e).exp() / e
}

/// `(gamma_E * W(phi_n))(z) = ((E - 1/2)/(E + 1/2))^n L_n(pi |z|^2 / (1/4 - E^2)) gamma_{E + 1/2}(z)`
/// for `E > 1/2`.
pub fn heat_convolution_closed(n: usize, e: f64, z: Complex64) -> Result<f64> {
    if !(e > 0.5) {
        return Err(Error::Domain(format!("heat parameter must exceed 1/2, got {e}")));
    }
    let ratio = (e - 0.5) / (e + 0.5);
    let arg = PI * z.norm_sqr() / (0.25 - e * e);
    Ok(ratio.powi(n as i32) * laguerre(n, 0.0, arg) * heat_kernel(e + 0.5, z))
}

/// The `E -> 1/2` limit of [`heat_convolution_closed`]: `(pi |z|^2)^n / n! e^{-pi |z|^2}`.
pub fn heat_convolution_spectrogram_limit(n: usize, z: Complex64) -> f64 {
    let t = PI * z.norm_sqr();
    t.powi(n as i32) / factorial(n) * (-t).exp()
}

/// Tensor form of [`heat_convolution_closed`] on `C^d`.
pub fn heat_convolution_closed_multi(n: &MultiIndex, e: &[f64], z: &[Complex64]) -> Result<f64> {
    check_dims(n, n, z)?;
    if e.len() != z.len() {
        return Err(Error::Dimension { expected: z.len(), got: e.len() });
    }
    let mut acc = 1.0;
    for j in 0..z.len() {
        acc *= heat_convolution_closed(n.0[j], e[j], z[j])?;
    }
    Ok(acc)
}
