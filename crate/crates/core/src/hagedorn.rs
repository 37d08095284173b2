//! Hagedorn wavepackets `phi_k[Q, P]` generated from a Lagrangian frame.

use crate::error::{Error, Result};
use crate::specfun::MultiIndex;
use crate::symplectic::LagrangianFrame;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Step of the central differences used by the ladder-operator checks.
pub const LADDER_FD_STEP: f64 = 1e-4;

/// A frame with the matrices the evaluation needs precomputed.
#[derive(Clone, Debug)]
pub struct HagedornFamily {
    frame: LagrangianFrame,
    q_inv: DMatrix<Complex64>,
    /// `Q^{-1} conj(Q)`
    mixing: DMatrix<Complex64>,
    /// `P Q^{-1}`
    pq_inv: DMatrix<Complex64>,
    /// `2^{d/4} det(Q)^{-1/2}` on the principal branch.
    ground_const: Complex64,
}

impl HagedornFamily {
    pub fn new(frame: LagrangianFrame) -> Result<Self> {
        frame.validate()?;
        let d = frame.dim();
        let q_inv = frame.q_inverse();
        let mixing = &q_inv * frame.q.map(|c| c.conj());
        let pq_inv = &frame.p * &q_inv;
        let ground_const = 2f64.powf(d as f64 / 4.0) / frame.q.determinant().sqrt();
        Ok(HagedornFamily { frame, q_inv, mixing, pq_inv, ground_const })
    }

    pub fn standard(d: usize) -> Self {
        Self::new(LagrangianFrame::standard(d)).expect("the standard frame is valid")
    }

    pub fn frame(&self) -> &LagrangianFrame {
        &self.frame
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    /// `Q^{-1} conj(Q)`, the only frame data entering the polynomial prefactors.
    pub fn mixing_matrix(&self) -> &DMatrix<Complex64> {
        &self.mixing
    }

    fn check_point(&self, t: &[f64]) -> Result<()> {
        if t.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: t.len() });
        }
        Ok(())
    }

    /// `phi_0[Q, P](t) = 2^{d/4} det(Q)^{-1/2} exp(pi i <t, P Q^{-1} t>)`.
    pub fn ground(&self, t: &[f64]) -> Complex64 {
        let d = self.dim();
        let mut quad = Complex64::new(0.0, 0.0);
        for r in 0..d {
            for c in 0..d {
                quad += self.pq_inv[(r, c)] * (t[r] * t[c]);
            }
        }
        self.ground_const * (Complex64::i() * PI * quad).exp()
    }

    /// Prefactor polynomials `p_m(t)` for every `m` in the box `0 <= m <= max`,
    /// stored lexicographically (last component fastest).
    pub fn prefactor_box(&self, max: &MultiIndex, t: &[f64]) -> Vec<Complex64> {
        let d = self.dim();
        let extents: Vec<usize> = max.iter().map(|&m| m + 1).collect();
        let mut strides = vec![1usize; d];
        for j in (0..d.saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * extents[j + 1];
        }
        let size: usize = extents.iter().product();
        let y: Vec<Complex64> = (0..d)
            .map(|r| (0..d).map(|c| self.q_inv[(r, c)] * t[c]).sum())
            .collect();
        let c1 = 2.0 * (2.0 * PI).sqrt();

        let mut p = vec![Complex64::new(0.0, 0.0); size];
        p[0] = Complex64::new(1.0, 0.0);
        let mut m = vec![0usize; d];
        for lin in 1..size {
            // Advance the odometer to the multi-index of `lin`.
            let mut pos = d - 1;
            loop {
                m[pos] += 1;
                if m[pos] < extents[pos] {
                    break;
                }
                m[pos] = 0;
                pos -= 1;
            }
            // Raise from k = m - e_j along the first non-zero direction j. Every
            // index referenced below is lexicographically smaller than m.
            let j = m.iter().position(|&v| v > 0).expect("m is non-zero");
            let k_lin = lin - strides[j];
            let mut val = c1 * y[j] * p[k_lin];
            for l in 0..d {
                let kl = if l == j { m[l] - 1 } else { m[l] };
                if kl > 0 {
                    val -= 2.0 * self.mixing[(j, l)] * (kl as f64) * p[k_lin - strides[l]];
                }
            }
            p[lin] = val;
        }
        p
    }

    /// `p_k(t)` with `phi_k = (2^{|k|} k!)^{-1/2} p_k phi_0`.
    pub fn prefactor(&self, k: &MultiIndex, t: &[f64]) -> Result<Complex64> {
        self.check_point(t)?;
        if k.dim() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: k.dim() });
        }
        Ok(*self.prefactor_box(k, t).last().expect("box is non-empty"))
    }

    pub fn eval(&self, k: &MultiIndex, t: &[f64]) -> Result<Complex64> {
        let p = self.prefactor(k, t)?;
        Ok(p * self.ground(t) / normalization(k))
    }

    /// Evaluates several wavepackets at one point from a single prefactor table.
    pub fn eval_many(&self, indices: &[MultiIndex], t: &[f64]) -> Result<Vec<Complex64>> {
        self.check_point(t)?;
        let d = self.dim();
        let mut max = MultiIndex::zeros(d);
        for k in indices {
            if k.dim() != d {
                return Err(Error::Dimension { expected: d, got: k.dim() });
            }
            for j in 0..d {
                max.0[j] = max.0[j].max(k.0[j]);
            }
        }
        let table = self.prefactor_box(&max, t);
        let g = self.ground(t);
        Ok(indices
            .iter()
            .map(|k| {
                let mut lin = 0;
                for j in 0..d {
                    lin = lin * (max.0[j] + 1) + k.0[j];
                }
                table[lin] * g / normalization(k)
            })
            .collect())
    }

    fn gradient(&self, k: &MultiIndex, t: &[f64]) -> Result<Vec<Complex64>> {
        let h = LADDER_FD_STEP;
        let mut out = Vec::with_capacity(t.len());
        let mut tp = t.to_vec();
        for l in 0..t.len() {
            tp[l] = t[l] + h;
            let plus = self.eval(k, &tp)?;
            tp[l] = t[l] - h;
            let minus = self.eval(k, &tp)?;
            tp[l] = t[l];
            out.push((plus - minus) / (2.0 * h));
        }
        Ok(out)
    }

    /// `(A_j phi_k)(t)` with `A = -sqrt(pi) i (P^T t + Q^T (i grad / 2pi))`,
    /// the gradient taken by central differences.
    pub fn lower(&self, j: usize, k: &MultiIndex, t: &[f64]) -> Result<Complex64> {
        let f = self.eval(k, t)?;
        let grad = self.gradient(k, t)?;
        let i = Complex64::i();
        let mut acc = Complex64::new(0.0, 0.0);
        for l in 0..self.dim() {
            acc += self.frame.p[(l, j)] * t[l] * f + i / (2.0 * PI) * self.frame.q[(l, j)] * grad[l];
        }
        Ok(-PI.sqrt() * i * acc)
    }

    /// `(A_j^dagger phi_k)(t) = sqrt(pi) i sum_l (conj(p_lj) t_l + (i / 2pi) conj(q_lj) d_l) phi_k`.
    pub fn raise(&self, j: usize, k: &MultiIndex, t: &[f64]) -> Result<Complex64> {
        let f = self.eval(k, t)?;
        let grad = self.gradient(k, t)?;
        let i = Complex64::i();
        let mut acc = Complex64::new(0.0, 0.0);
        for l in 0..self.dim() {
            acc += self.frame.p[(l, j)].conj() * t[l] * f + i / (2.0 * PI) * self.frame.q[(l, j)].conj() * grad[l];
        }
        Ok(PI.sqrt() * i * acc)
    }

    /// Largest deviation of `A_j phi_k = sqrt(k_j) phi_{k - e_j}` over `points`.
    pub fn lowering_residual(&self, j: usize, k: &MultiIndex, points: &[Vec<f64>]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for t in points {
            let lhs = self.lower(j, k, t)?;
            let rhs = match k.minus(j) {
                Some(km) => (k.0[j] as f64).sqrt() * self.eval(&km, t)?,
                None => Complex64::new(0.0, 0.0),
            };
            worst = worst.max((lhs - rhs).norm());
        }
        Ok(worst)
    }

    /// Largest deviation of `A_j^dagger phi_k = sqrt(k_j + 1) phi_{k + e_j}` over `points`.
    pub fn raising_residual(&self, j: usize, k: &MultiIndex, points: &[Vec<f64>]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for t in points {
            let lhs = self.raise(j, k, t)?;
            let rhs = ((k.0[j] + 1) as f64).sqrt() * self.eval(&k.plus(j), t)?;
            worst = worst.max((lhs - rhs).norm());
        }
        Ok(worst)
    }
}

fn normalization(k: &MultiIndex) -> f64 {
    (2f64.powi(k.total() as i32) * k.factorial()).sqrt()
}

pub fn gaussian_ground(frame: &LagrangianFrame, t: &[f64]) -> Result<Complex64> {
    let fam = HagedornFamily::new(frame.clone())?;
    fam.check_point(t)?;
    Ok(fam.ground(t))
}

pub fn polynomial_prefactor(frame: &LagrangianFrame, k: &MultiIndex, t: &[f64]) -> Result<Complex64> {
    HagedornFamily::new(frame.clone())?.prefactor(k, t)
}

pub fn wavepacket_eval(frame: &LagrangianFrame, k: &MultiIndex, t: &[f64]) -> Result<Complex64> {
    HagedornFamily::new(frame.clone())?.eval(k, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::hermite;

    #[test]
    fn standard_frame_gives_hermite_functions() {
        let fam = HagedornFamily::standard(1);
        for n in 0..12 {
            for &t in &[-1.3, -0.2, 0.0, 0.45, 2.1] {
                let v = fam.eval(&MultiIndex(vec![n]), &[t]).unwrap();
                assert!((v.re - hermite(n, t)).abs() < 1e-12, "n={n} t={t}");
                assert!(v.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tensor_product_in_two_dimensions() {
        let fam = HagedornFamily::standard(2);
        let t = [0.3, -0.8];
        let v = fam.eval(&MultiIndex(vec![3, 2]), &t).unwrap();
        assert!((v.re - hermite(3, t[0]) * hermite(2, t[1])).abs() < 1e-12);
    }

    #[test]
    fn eval_many_matches_eval() {
        let fam = HagedornFamily::new(LagrangianFrame::zero_diagonal_example()).unwrap();
        let ks = vec![MultiIndex(vec![0, 0]), MultiIndex(vec![2, 1]), MultiIndex(vec![0, 3])];
        let t = [0.4, -0.1];
        let many = fam.eval_many(&ks, &t).unwrap();
        for (k, v) in ks.iter().zip(many) {
            assert!((fam.eval(k, &t).unwrap() - v).norm() < 1e-14);
        }
    }

    #[test]
    fn dimension_errors() {
        let fam = HagedornFamily::standard(2);
        assert!(fam.eval(&MultiIndex(vec![1]), &[0.0, 0.0]).is_err());
        assert!(fam.eval(&MultiIndex(vec![1, 0]), &[0.0]).is_err());
    }
}
