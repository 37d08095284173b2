#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;

/// Regularized lower incomplete gamma `P(a, x)` for integer `a >= 1`, by its series.
pub fn gamma_p(a: usize, x: f64) -> f64 {
    let mut term = 1.0 / a as f64;
    let mut sum = term;
    for m in 1..400 {
        term *= x / (a + m) as f64;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    let log_gamma_a: f64 = (1..a).map(|j| (j as f64).ln()).sum();
    (a as f64 * x.ln() - x - log_gamma_a).exp() * sum
}

pub fn j_matrix(d: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        j[(i, d + i)] = 1.0;
        j[(d + i, i)] = -1.0;
    }
    j
}

/// Product of random symplectic shears and a random linear block, which
/// together generate the symplectic group.
pub fn random_symplectic<R: Rng>(rng: &mut R, d: usize) -> DMatrix<f64> {
    let sym = |rng: &mut R| {
        let a = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-0.8..0.8));
        (&a + a.transpose()) * 0.5
    };
    let mut upper = DMatrix::identity(2 * d, 2 * d);
    upper.view_mut((0, d), (d, d)).copy_from(&sym(rng));
    let mut lower = DMatrix::identity(2 * d, 2 * d);
    lower.view_mut((d, 0), (d, d)).copy_from(&sym(rng));
    let a = loop {
        let a: DMatrix<f64> = DMatrix::from_fn(d, d, |r, c| if r == c { 1.0 } else { 0.0 } + rng.gen_range(-0.5..0.5));
        if a.determinant().abs() > 0.2 {
            break a;
        }
    };
    let a_inv_t = a.clone().try_inverse().unwrap().transpose();
    let mut linear = DMatrix::zeros(2 * d, 2 * d);
    linear.view_mut((0, 0), (d, d)).copy_from(&a);
    linear.view_mut((d, d), (d, d)).copy_from(&a_inv_t);
    upper * linear * lower
}

/// `T^T J T - J` in the Frobenius norm.
pub fn symplectic_defect(t: &DMatrix<f64>) -> f64 {
    let j = j_matrix(t.nrows() / 2);
    (t.transpose() * &j * t - j).norm()
}
