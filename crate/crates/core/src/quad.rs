//! Globally adaptive Gauss–Kronrod (7/15) quadrature for vector-valued integrands.
//!
//! Integrands write their values into a caller-provided slice so that a whole
//! matrix of integrals can share one set of nodes. The error estimate of an
//! interval is the largest component error, using the QUADPACK scaling of the
//! Kronrod–Gauss difference. Every call keeps its own work queue, so nested and
//! concurrent use is safe.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel, max_intervals: 4000 }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-13, 1e-11)
    }
}

#[derive(Clone, Debug)]
pub struct Integral {
    pub value: Vec<f64>,
    pub error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

impl Integral {
    pub fn scalar(&self) -> f64 {
        self.value[0]
    }

    fn zero(dim: usize) -> Self {
        Integral { value: vec![0.0; dim], error: 0.0, converged: true, evaluations: 0 }
    }

    /// Adds `other` into `self`, combining error estimates and statuses.
    pub fn accumulate(&mut self, other: &Integral, scale: f64) {
        for (v, o) in self.value.iter_mut().zip(&other.value) {
            *v += scale * o;
        }
        self.error += scale.abs() * other.error;
        self.converged &= other.converged;
        self.evaluations += other.evaluations;
    }
}

struct Piece {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

struct Rule {
    fv: Vec<Vec<f64>>,
    tmp: Vec<f64>,
}

impl Rule {
    fn new(dim: usize) -> Self {
        Rule { fv: vec![vec![0.0; dim]; 15], tmp: vec![0.0; dim] }
    }

    fn apply<F: FnMut(f64, &mut [f64])>(&mut self, f: &mut F, a: f64, b: f64) -> (Vec<f64>, f64) {
        let dim = self.tmp.len();
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        // fv[0] is the centre, fv[2j+1] and fv[2j+2] the pair at -+XGK[j].
        self.fv[0].iter_mut().for_each(|v| *v = 0.0);
        f(c, &mut self.fv[0]);
        for j in 0..7 {
            let dx = h * XGK[j];
            self.tmp.iter_mut().for_each(|v| *v = 0.0);
            f(c - dx, &mut self.tmp);
            self.fv[2 * j + 1].copy_from_slice(&self.tmp);
            f(c + dx, &mut self.tmp);
            self.fv[2 * j + 2].copy_from_slice(&self.tmp);
        }
        let mut value = vec![0.0; dim];
        let mut error: f64 = 0.0;
        for i in 0..dim {
            let centre = self.fv[0][i];
            let mut rk = WGK[7] * centre;
            let mut rg = WG[3] * centre;
            let mut rabs = WGK[7] * centre.abs();
            for j in 0..7 {
                let s = self.fv[2 * j + 1][i] + self.fv[2 * j + 2][i];
                rk += WGK[j] * s;
                rabs += WGK[j] * (self.fv[2 * j + 1][i].abs() + self.fv[2 * j + 2][i].abs());
                if j % 2 == 1 {
                    rg += WG[j / 2] * s;
                }
            }
            let mean = 0.5 * rk;
            let mut rasc = WGK[7] * (centre - mean).abs();
            for j in 0..7 {
                rasc += WGK[j] * ((self.fv[2 * j + 1][i] - mean).abs() + (self.fv[2 * j + 2][i] - mean).abs());
            }
            let rasc = rasc * h.abs();
            let mut err = ((rk - rg) * h).abs();
            if rasc != 0.0 && err != 0.0 {
                err = rasc * (200.0 * err / rasc).powf(1.5).min(1.0);
            }
            let rabs = rabs * h.abs();
            if rabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
                err = err.max(50.0 * f64::EPSILON * rabs);
            }
            value[i] = rk * h;
            error = error.max(err);
        }
        (value, error)
    }
}

/// Integrates a `dim`-component integrand over `[a, b]`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, dim: usize, tol: Tolerance) -> Integral
where
    F: FnMut(f64, &mut [f64]),
{
    if a == b {
        return Integral::zero(dim);
    }
    let mut rule = Rule::new(dim);
    let (v0, e0) = rule.apply(&mut f, a, b);
    let mut total = v0.clone();
    let mut total_err = e0;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: v0, error: e0 });

    let target = |total: &[f64]| {
        let norm = total.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        tol.abs.max(tol.rel * norm)
    };

    let mut converged = total_err <= target(&total);
    while !converged {
        if heap.len() >= tol.max_intervals {
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if (worst.b - worst.a).abs() <= 1e-14 * (worst.a.abs() + worst.b.abs()).max(1e-300) {
            // Cannot split further; keep it and give up on this tolerance.
            heap.push(worst);
            break;
        }
        let (vl, el) = rule.apply(&mut f, worst.a, mid);
        let (vr, er) = rule.apply(&mut f, mid, worst.b);
        evaluations += 30;
        for i in 0..dim {
            total[i] += vl[i] + vr[i] - worst.value[i];
        }
        total_err += el + er - worst.error;
        heap.push(Piece { a: worst.a, b: mid, value: vl, error: el });
        heap.push(Piece { a: mid, b: worst.b, value: vr, error: er });
        converged = total_err <= target(&total);
    }

    // Re-sum from the pieces to shed the drift of the running totals.
    let mut value = vec![0.0; dim];
    let mut error = 0.0;
    for p in heap.iter() {
        for i in 0..dim {
            value[i] += p.value[i];
        }
        error += p.error;
    }
    Integral { value, error, converged, evaluations }
}

/// Integrates over `[a, inf)` through the map `x = a + s / (1 - s)`.
pub fn integrate_to_infinity<F>(mut f: F, a: f64, dim: usize, tol: Tolerance) -> Integral
where
    F: FnMut(f64, &mut [f64]),
{
    integrate(
        |s, out| {
            let one_minus = 1.0 - s;
            let x = a + s / one_minus;
            let jac = 1.0 / (one_minus * one_minus);
            f(x, out);
            out.iter_mut().for_each(|v| *v *= jac);
        },
        0.0,
        1.0,
        dim,
        tol,
    )
}

/// Integrates over the whole real line as two half-lines.
pub fn integrate_real_line<F>(mut f: F, dim: usize, tol: Tolerance) -> Integral
where
    F: FnMut(f64, &mut [f64]),
{
    let mut out = integrate_to_infinity(&mut f, 0.0, dim, tol);
    let left = integrate_to_infinity(
        |x, o| f(-x, o),
        0.0,
        dim,
        tol,
    );
    out.accumulate(&left, 1.0);
    out
}

/// Scalar convenience wrapper around [`integrate`].
pub fn integrate_scalar<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Integral {
    integrate(|x, out| out[0] = f(x), a, b, 1, tol)
}

/// Trapezoid weights for `n` equispaced periodic samples on `[0, 2pi)`.
pub fn periodic_nodes(n: usize) -> impl Iterator<Item = (f64, f64)> {
    let w = 2.0 * std::f64::consts::PI / n as f64;
    (0..n).map(move |j| (j as f64 * w, w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate_scalar(|x| x.powi(7) - 3.0 * x * x, -1.0, 2.0, Tolerance::default());
        let exact = (2f64.powi(8) - 1.0) / 8.0 - (8.0 + 1.0);
        assert!((r.scalar() - exact).abs() < 1e-13);
        assert!(r.converged);
    }

    #[test]
    fn sqrt_endpoint_singularity() {
        let r = integrate_scalar(|x| (1.0 - x * x).max(0.0).sqrt(), -1.0, 1.0, Tolerance::default());
        assert!((r.scalar() - std::f64::consts::FRAC_PI_2).abs() < 1e-10, "{}", r.scalar());
    }

    #[test]
    fn gaussian_half_line_and_full_line() {
        let tol = Tolerance::default();
        let r = integrate_to_infinity(|x, o| o[0] = (-x * x).exp(), 0.0, 1, tol);
        assert!((r.scalar() - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-12);
        let r = integrate_real_line(|x, o| o[0] = (-std::f64::consts::PI * x * x).exp(), 1, tol);
        assert!((r.scalar() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vector_components_share_nodes() {
        let r = integrate(
            |x, o| {
                o[0] = x.cos();
                o[1] = x.sin();
            },
            0.0,
            1.0,
            2,
            Tolerance::default(),
        );
        assert!((r.value[0] - 1f64.sin()).abs() < 1e-14);
        assert!((r.value[1] - (1.0 - 1f64.cos())).abs() < 1e-14);
    }
}
