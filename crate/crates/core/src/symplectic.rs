//! Lagrangian frames, the real symplectic matrices they correspond to, and
//! Williamson's normal form for positive definite matrices.
//!
//! Phase space `R^{2d}` is ordered `(x_1..x_d, w_1..w_d)` and identified with
//! `C^d` through `z_j = x_j + i w_j`. The standard symplectic form is
//! `J = [[0, I], [-I, 0]]`.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Frame checks (`Q^T P - P^T Q = 0`, `Q* P - P* Q = 2i I`) use this Frobenius tolerance.
pub const FRAME_TOL: f64 = 1e-10;

pub fn j_matrix(d: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        j[(i, d + i)] = 1.0;
        j[(d + i, i)] = -1.0;
    }
    j
}

/// `||T^T J T - J||_F`.
pub fn symplectic_residual(t: &DMatrix<f64>) -> f64 {
    let d = t.nrows() / 2;
    let j = j_matrix(d);
    (t.transpose() * &j * t - j).norm()
}

/// Reads a real `2d` vector as the complex vector `x + i w`.
pub fn to_complex(v: &[f64]) -> Vec<Complex64> {
    let d = v.len() / 2;
    (0..d).map(|j| Complex64::new(v[j], v[d + j])).collect()
}

/// Inverse of [`to_complex`].
pub fn to_real(z: &[Complex64]) -> Vec<f64> {
    let mut v: Vec<f64> = z.iter().map(|c| c.re).collect();
    v.extend(z.iter().map(|c| c.im));
    v
}

/// A `2d x 2d` real matrix with `T^T J T = J`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticMatrix {
    m: DMatrix<f64>,
}

impl SymplecticMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() % 2 != 0 || m.nrows() == 0 {
            return Err(Error::Domain(format!(
                "symplectic matrix must be 2d x 2d, got {} x {}",
                m.nrows(),
                m.ncols()
            )));
        }
        let residual = symplectic_residual(&m);
        if residual > 1e-9 * m.norm_squared().max(1.0) {
            return Err(Error::NotSymplectic { residual });
        }
        Ok(SymplecticMatrix { m })
    }

    pub fn identity(d: usize) -> Self {
        SymplecticMatrix { m: DMatrix::identity(2 * d, 2 * d) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    /// `T^{-1} = -J T^T J`.
    pub fn inverse(&self) -> SymplecticMatrix {
        let j = j_matrix(self.dim());
        SymplecticMatrix { m: -(&j * self.m.transpose() * &j) }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (&self.m * DVector::from_column_slice(v)).as_slice().to_vec()
    }

    /// Applies the matrix to a point written in complex coordinates.
    pub fn apply_complex(&self, z: &[Complex64]) -> Vec<Complex64> {
        to_complex(&self.apply(&to_real(z)))
    }

    pub fn compose(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        SymplecticMatrix { m: &self.m * &other.m }
    }

    fn block(&self, r: usize, c: usize) -> DMatrix<f64> {
        let d = self.dim();
        self.m.view((r * d, c * d), (d, d)).into_owned()
    }
}

/// Pair `(Q, P)` of complex `d x d` matrices generating a Hagedorn family.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianFrame {
    pub q: DMatrix<Complex64>,
    pub p: DMatrix<Complex64>,
}

#[derive(Clone, Copy, Debug)]
pub struct FrameResiduals {
    /// `||Q^T P - P^T Q||_F`
    pub isotropy: f64,
    /// `||Q* P - P* Q - 2i I||_F`
    pub normalization: f64,
}

impl LagrangianFrame {
    /// Builds a frame and checks invertibility and both frame identities.
    pub fn new(q: DMatrix<Complex64>, p: DMatrix<Complex64>) -> Result<Self> {
        let frame = LagrangianFrame { q, p };
        frame.validate()?;
        Ok(frame)
    }

    pub fn standard(d: usize) -> Self {
        LagrangianFrame {
            q: DMatrix::identity(d, d),
            p: DMatrix::from_diagonal_element(d, d, Complex64::i()),
        }
    }

    /// Two-dimensional frame whose Hagedorn family is not a tensor product
    /// and whose `Q^{-1} conj(Q)` has zero diagonal.
    pub fn zero_diagonal_example() -> Self {
        let off = Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2);
        let one = Complex64::new(1.0, 0.0);
        let q = DMatrix::from_row_slice(2, 2, &[one, off, off, one]);
        let p = DMatrix::from_diagonal_element(2, 2, Complex64::new(-1.0, 1.0));
        LagrangianFrame { q, p }
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn residuals(&self) -> FrameResiduals {
        let d = self.dim();
        let iso = self.q.transpose() * &self.p - self.p.transpose() * &self.q;
        let two_i = DMatrix::from_diagonal_element(d, d, Complex64::new(0.0, 2.0));
        let norm = self.q.adjoint() * &self.p - self.p.adjoint() * &self.q - two_i;
        FrameResiduals { isotropy: iso.norm(), normalization: norm.norm() }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if self.q.ncols() != d || self.p.nrows() != d || self.p.ncols() != d || d == 0 {
            return Err(Error::InvalidFrame("Q and P must be square and of equal size".into()));
        }
        for (name, m) in [("Q", &self.q), ("P", &self.p)] {
            if m.clone().try_inverse().is_none() || m.determinant().norm() < 1e-14 {
                return Err(Error::InvalidFrame(format!("{name} is singular")));
            }
        }
        let r = self.residuals();
        if r.isotropy > FRAME_TOL || r.normalization > FRAME_TOL {
            return Err(Error::InvalidFrame(format!(
                "Q^T P - P^T Q residual {:.3e}, Q*P - P*Q - 2iI residual {:.3e}",
                r.isotropy, r.normalization
            )));
        }
        Ok(())
    }

    pub fn q_inverse(&self) -> DMatrix<Complex64> {
        self.q.clone().try_inverse().expect("validated frames have invertible Q")
    }
}

/// `T = [[Re Q, Im Q], [Re P, Im P]]`.
pub fn frame_to_symplectic(frame: &LagrangianFrame) -> SymplecticMatrix {
    let d = frame.dim();
    let mut m = DMatrix::zeros(2 * d, 2 * d);
    for r in 0..d {
        for c in 0..d {
            m[(r, c)] = frame.q[(r, c)].re;
            m[(r, d + c)] = frame.q[(r, c)].im;
            m[(d + r, c)] = frame.p[(r, c)].re;
            m[(d + r, d + c)] = frame.p[(r, c)].im;
        }
    }
    SymplecticMatrix { m }
}

/// Reads `T = [[A, B], [C, D]]` as the frame `Q = A + iB`, `P = C + iD`.
pub fn symplectic_to_frame(t: &SymplecticMatrix) -> Result<LagrangianFrame> {
    let (a, b, c, dd) = (t.block(0, 0), t.block(0, 1), t.block(1, 0), t.block(1, 1));
    let q = a.zip_map(&b, |re, im| Complex64::new(re, im));
    let p = c.zip_map(&dd, |re, im| Complex64::new(re, im));
    LagrangianFrame::new(q, p)
}

/// `M = T K T^T` with `K = diag(k_1..k_d, k_1..k_d)` and `k` ascending.
#[derive(Clone, Debug)]
pub struct WilliamsonForm {
    pub t: SymplecticMatrix,
    pub k: Vec<f64>,
}

impl WilliamsonForm {
    pub fn k_matrix(&self) -> DMatrix<f64> {
        let d = self.k.len();
        DMatrix::from_fn(2 * d, 2 * d, |r, c| if r == c { self.k[r % d] } else { 0.0 })
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.t.matrix() * self.k_matrix() * self.t.matrix().transpose()
    }
}

fn check_spd(m: &DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    if m.nrows() != m.ncols() || m.nrows() % 2 != 0 || m.nrows() == 0 {
        return Err(Error::NotPositiveDefinite(format!(
            "expected a 2d x 2d matrix, got {} x {}",
            m.nrows(),
            m.ncols()
        )));
    }
    let asym = (m - m.transpose()).norm();
    if asym > 1e-12 * m.norm().max(1.0) {
        return Err(Error::NotPositiveDefinite(format!("asymmetry {asym:.3e}")));
    }
    let sym = 0.5 * (m + m.transpose());
    let eig = SymmetricEigen::new(sym);
    let min = eig.eigenvalues.min();
    if min <= 0.0 {
        return Err(Error::NotPositiveDefinite(format!("smallest eigenvalue {min:.3e}")));
    }
    Ok(eig)
}

/// Williamson normal form of a symmetric positive definite `2d x 2d` matrix.
///
/// With `S = M^{1/2}`, the skew matrix `S J S` has eigenvalues `-+ i k_j`.
/// An eigenvector `a + ib` of the Hermitian matrix `i S J S` for `k_j > 0`
/// satisfies `S J S a = k_j b`, `S J S b = -k_j a`, and `sqrt(2) a`,
/// `sqrt(2) b` are orthonormal across all `j`. Collecting
/// `O = sqrt(2) [b_1..b_d | a_1..a_d]` gives `O^T S J S O = [[0, K], [-K, 0]]`,
/// so `T = S O K^{-1/2}` is symplectic and `T K T^T = M`.
pub fn williamson(m: &DMatrix<f64>) -> Result<WilliamsonForm> {
    let eig = check_spd(m)?;
    let n = m.nrows();
    let d = n / 2;
    let sqrt_vals = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let s = &eig.eigenvectors * sqrt_vals * eig.eigenvectors.transpose();
    let a = &s * j_matrix(d) * &s;
    let h = a.map(|v| Complex64::new(0.0, v));
    let ceig = SymmetricEigen::new(h);

    let mut pairs: Vec<(f64, usize)> = ceig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 0.0)
        .map(|(i, &l)| (l, i))
        .collect();
    if pairs.len() != d {
        return Err(Error::NotPositiveDefinite(format!(
            "expected {d} positive symplectic eigenvalues, found {}",
            pairs.len()
        )));
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

    let mut o = DMatrix::zeros(n, n);
    for (slot, &(_, idx)) in pairs.iter().enumerate() {
        let v = ceig.eigenvectors.column(idx);
        for r in 0..n {
            o[(r, slot)] = std::f64::consts::SQRT_2 * v[r].im;
            o[(r, d + slot)] = std::f64::consts::SQRT_2 * v[r].re;
        }
    }
    let k: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let scale = DMatrix::from_fn(n, n, |r, c| if r == c { 1.0 / k[r % d].sqrt() } else { 0.0 });
    let t = s * o * scale;
    let residual = symplectic_residual(&t);
    if residual > 1e-8 * t.norm_squared().max(1.0) {
        return Err(Error::NotSymplectic { residual });
    }
    Ok(WilliamsonForm { t: SymplecticMatrix { m: t }, k })
}

/// Symplectic eigenvalues of `M`, ascending.
pub fn symplectic_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    Ok(williamson(m)?.k)
}

/// Whether `M + (i / 4pi) J` is positive semidefinite, i.e. whether `g_M` is
/// the Weyl symbol of a density operator.
pub fn gaussian_admissible(m: &DMatrix<f64>) -> Result<bool> {
    check_spd(m)?;
    let d = m.nrows() / 2;
    let j = j_matrix(d);
    let h = DMatrix::from_fn(2 * d, 2 * d, |r, c| Complex64::new(m[(r, c)], j[(r, c)] / (4.0 * PI)));
    let min = SymmetricEigen::new(h).eigenvalues.min();
    Ok(min >= -1e-12 * m.norm().max(1.0))
}

/// Normalized Gaussian `g_M(z) = (2pi)^{-d} det(M)^{-1/2} exp(-<M^{-1} z, z> / 2)`.
#[derive(Clone, Debug)]
pub struct GaussianSymbol {
    inv: DMatrix<f64>,
    norm: f64,
    centre: Vec<f64>,
}

impl GaussianSymbol {
    pub fn new(m: &DMatrix<f64>) -> Result<Self> {
        check_spd(m)?;
        let d = m.nrows() / 2;
        let inv = m.clone().try_inverse().ok_or_else(|| Error::NotPositiveDefinite("singular".into()))?;
        let norm = (2.0 * PI).powi(-(d as i32)) / m.determinant().sqrt();
        Ok(GaussianSymbol { inv, norm, centre: vec![0.0; 2 * d] })
    }

    /// Covariance of the thermal state with mean energy `e` per mode:
    /// `(1/(4pi) + e/(2pi)) I`.
    pub fn thermal(d: usize, e: f64) -> Result<Self> {
        if e < 0.0 {
            return Err(Error::Domain(format!("thermal energy must be non-negative, got {e}")));
        }
        let k = 1.0 / (4.0 * PI) + e / (2.0 * PI);
        Self::new(&DMatrix::from_diagonal_element(2 * d, 2 * d, k))
    }

    /// The same Gaussian translated to `centre` (not polyradial unless the centre is 0).
    pub fn shifted(mut self, centre: Vec<f64>) -> Self {
        assert_eq!(centre.len(), self.centre.len());
        self.centre = centre;
        self
    }

    pub fn dim(&self) -> usize {
        self.centre.len() / 2
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        let y = DVector::from_iterator(v.len(), v.iter().zip(&self.centre).map(|(a, c)| a - c));
        let q = y.dot(&(&self.inv * &y));
        self.norm * (-0.5 * q).exp()
    }
}
