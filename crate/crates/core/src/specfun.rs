//! Hermite functions, generalized Laguerre polynomials and the complex Hermite
//! polynomials that appear as short-time Fourier transforms of Hermite
//! functions.
//!
//! All evaluations use three-term recurrences. For orders above
//! [`EXTENDED_PRECISION_ORDER`] the recurrence is carried in double-double
//! arithmetic, which keeps the accumulated rounding at the level of a few ulp
//! up to order 50.

use crate::error::{domain, Result};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Orders above this run their recurrence in double-double arithmetic.
pub const EXTENDED_PRECISION_ORDER: usize = 30;

/// A multi-index `(n_1, ..., n_d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn zeros(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|n| = n_1 + ... + n_d`.
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// `n! = n_1! ... n_d!` as a float.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&n| factorial(n)).product()
    }

    pub fn iter(&self) -> impl Iterator<Item = &usize> {
        self.0.iter()
    }

    pub fn plus(&self, j: usize) -> Self {
        let mut m = self.clone();
        m.0[j] += 1;
        m
    }

    pub fn minus(&self, j: usize) -> Option<Self> {
        let mut m = self.clone();
        m.0[j] = m.0[j].checked_sub(1)?;
        Some(m)
    }

    /// All multi-indices of dimension `d` with `|n| <= max_total`, graded then
    /// lexicographic.
    pub fn up_to_total(d: usize, max_total: usize) -> Vec<MultiIndex> {
        let mut out: Vec<MultiIndex> = Self::in_box(d, max_total)
            .into_iter()
            .filter(|m| m.total() <= max_total)
            .collect();
        out.sort_by(|a, b| a.total().cmp(&b.total()).then_with(|| a.cmp(b)));
        out
    }

    /// All multi-indices with every entry `<= max_entry`, lexicographic.
    pub fn in_box(d: usize, max_entry: usize) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex(Vec::new())];
        for _ in 0..d {
            let mut next = Vec::with_capacity(out.len() * (max_entry + 1));
            for m in &out {
                for v in 0..=max_entry {
                    let mut e = m.0.clone();
                    e.push(v);
                    next.push(MultiIndex(e));
                }
            }
            out = next;
        }
        out
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        MultiIndex(v)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for MultiIndex {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut v = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            let n: i64 = part
                .parse()
                .map_err(|_| crate::Error::Domain(format!("bad index component '{part}'")))?;
            if n < 0 {
                return domain(format!("negative index component {n}"));
            }
            v.push(n as usize);
        }
        Ok(MultiIndex(v))
    }
}

pub fn factorial(n: usize) -> f64 {
    (2..=n).fold(1.0, |acc, j| acc * j as f64)
}

/// `sqrt(lo! / hi!)` for `lo <= hi`, computed without overflow.
pub fn sqrt_factorial_ratio(lo: usize, hi: usize) -> f64 {
    debug_assert!(lo <= hi);
    ((lo + 1)..=hi).fold(1.0, |acc, j| acc / (j as f64).sqrt())
}

/// Double-double number: `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Dd { hi: s, lo: err }
    }

    fn renorm(hi: f64, lo: f64) -> Dd {
        let s = hi + lo;
        Dd { hi: s, lo: lo - (s - hi) }
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        Dd::renorm(s.hi, s.lo + self.lo + o.lo)
    }

    fn scale(self, c: f64) -> Dd {
        let p = self.hi * c;
        let err = self.hi.mul_add(c, -p);
        Dd::renorm(p, err + self.lo * c)
    }

    fn div(self, c: f64) -> Dd {
        let q = self.hi / c;
        let r = Dd::new(q).scale(c);
        let rem = (self.hi - r.hi - r.lo) + self.lo;
        Dd::renorm(q, rem / c)
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// L2-normalized Hermite function `phi_n(t)` with `phi_0(t) = 2^{1/4} e^{-pi t^2}`.
pub fn hermite(n: usize, t: f64) -> f64 {
    hermite_pair(n, t).1
}

/// Returns `(phi_{n-1}(t), phi_n(t))`, with `phi_{-1} = 0`.
fn hermite_pair(n: usize, t: f64) -> (f64, f64) {
    let phi0 = 2f64.powf(0.25) * (-PI * t * t).exp();
    if n == 0 {
        return (0.0, phi0);
    }
    let a = 2.0 * PI.sqrt() * t;
    if n <= EXTENDED_PRECISION_ORDER {
        let (mut prev, mut cur) = (0.0, phi0);
        for j in 0..n {
            let next = (a * cur - (j as f64).sqrt() * prev) / ((j + 1) as f64).sqrt();
            prev = cur;
            cur = next;
        }
        (prev, cur)
    } else {
        let (mut prev, mut cur) = (Dd::new(0.0), Dd::new(phi0));
        for j in 0..n {
            let next = cur.scale(a).add(prev.scale(-(j as f64).sqrt())).div(((j + 1) as f64).sqrt());
            prev = cur;
            cur = next;
        }
        (prev.value(), cur.value())
    }
}

/// All Hermite functions `phi_0(t), ..., phi_{n_max}(t)`.
pub fn hermite_all(n_max: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let a = 2.0 * PI.sqrt() * t;
    let (mut prev, mut cur) = (0.0, 2f64.powf(0.25) * (-PI * t * t).exp());
    out.push(cur);
    for j in 0..n_max {
        let next = (a * cur - (j as f64).sqrt() * prev) / ((j + 1) as f64).sqrt();
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// `phi_n'(t) = sqrt(pi n) phi_{n-1}(t) - sqrt(pi (n+1)) phi_{n+1}(t)`.
pub fn hermite_derivative(n: usize, t: f64) -> f64 {
    let (prev, cur) = hermite_pair(n, t);
    let next = (2.0 * PI.sqrt() * t * cur - (n as f64).sqrt() * prev) / ((n + 1) as f64).sqrt();
    (PI * n as f64).sqrt() * prev - (PI * (n + 1) as f64).sqrt() * next
}

/// Generalized Laguerre polynomial `L_k^alpha(t)`.
///
/// The three-term recurrence is valid for every real `alpha`, including the
/// negative integers reached through the reflection identity. For
/// `alpha = -m` with `1 <= m <= k` the polynomial has a zero of order `m` at
/// the origin, which the recurrence would only reach by cancellation, so
/// `L_k^{-m}(t) = (-t)^m (k-m)!/k! L_{k-m}^m(t)` is used instead.
pub fn laguerre(k: usize, alpha: f64, t: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if alpha < 0.0 && alpha == alpha.round() && -alpha <= k as f64 {
        let m = -alpha as usize;
        return (-t).powi(m as i32) / falling_factorial(k, m) * laguerre(k - m, m as f64, t);
    }
    let l1 = 1.0 + alpha - t;
    if k == 1 {
        return l1;
    }
    if k <= EXTENDED_PRECISION_ORDER {
        let (mut prev, mut cur) = (1.0, l1);
        for j in 1..k {
            let jf = j as f64;
            let next = ((2.0 * jf + 1.0 + alpha - t) * cur - (jf + alpha) * prev) / (jf + 1.0);
            prev = cur;
            cur = next;
        }
        cur
    } else {
        let (mut prev, mut cur) = (Dd::new(1.0), Dd::new(l1));
        for j in 1..k {
            let jf = j as f64;
            let next = cur
                .scale(2.0 * jf + 1.0 + alpha - t)
                .add(prev.scale(-(jf + alpha)))
                .div(jf + 1.0);
            prev = cur;
            cur = next;
        }
        cur.value()
    }
}

/// `k! / (k-m)!`
fn falling_factorial(k: usize, m: usize) -> f64 {
    ((k - m + 1)..=k).map(|j| j as f64).product()
}

/// Checked variant of [`hermite`] for callers holding signed orders.
pub fn hermite_checked(n: i64, t: f64) -> Result<f64> {
    if n < 0 {
        return domain(format!("Hermite order must be non-negative, got {n}"));
    }
    Ok(hermite(n as usize, t))
}

/// Checked variant of [`laguerre`] for callers holding signed orders.
pub fn laguerre_checked(k: i64, alpha: f64, t: f64) -> Result<f64> {
    if k < 0 {
        return domain(format!("Laguerre degree must be non-negative, got {k}"));
    }
    Ok(laguerre(k as usize, alpha, t))
}

/// Complex Hermite polynomial `H_{n,k}(z)`.
///
/// Only the `k <= n` expression is evaluated directly. For `n < k` the same
/// expression involves `L_k^{n-k}` with a negative parameter, which the
/// reflection identity turns into `(-1)^{k-n} sqrt(n!/k!) pi^{(k-n)/2}
/// conj(z)^{k-n} L_n^{k-n}(pi |z|^2)`.
pub fn complex_hermite(n: usize, k: usize, z: Complex64) -> Complex64 {
    let (lo, hi) = if k <= n { (k, n) } else { (n, k) };
    let gap = hi - lo;
    let t = PI * z.norm_sqr();
    let c = sqrt_factorial_ratio(lo, hi) * PI.powf(gap as f64 / 2.0) * laguerre(lo, gap as f64, t);
    if k <= n {
        z.powu(gap as u32) * c
    } else {
        let sign = if gap % 2 == 0 { 1.0 } else { -1.0 };
        z.conj().powu(gap as u32) * (sign * c)
    }
}

/// `sum_j C(n,j) b^j (1-b)^{n-j} L_j(t)`, which equals `L_n(b t)`.
pub fn laguerre_rescale(n: usize, b: f64, t: f64) -> f64 {
    let mut sum = 0.0;
    let mut binom = 1.0;
    for j in 0..=n {
        sum += binom * b.powi(j as i32) * (1.0 - b).powi((n - j) as i32) * laguerre(j, 0.0, t);
        binom = binom * (n - j) as f64 / (j + 1) as f64;
    }
    debug_assert!(
        (sum - laguerre(n, 0.0, b * t)).abs() <= 1e-8 * (1.0 + sum.abs()),
        "Laguerre scaling identity violated at n={n}, b={b}, t={t}"
    );
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert!((hermite(0, 0.0) - 2f64.powf(0.25)).abs() < 1e-15);
        assert!((hermite(1, 1.0) - 0.182_18).abs() < 1e-5);
        assert_eq!(laguerre(2, 0.0, 2.0), -1.0);
        assert!((laguerre_rescale(2, 0.5, 2.0) + 0.5).abs() < 1e-14);
        assert_eq!(laguerre_rescale(7, 0.0, 3.3), 1.0);
        assert_eq!(complex_hermite(0, 0, Complex64::new(0.3, -2.0)), Complex64::new(1.0, 0.0));
        let z = Complex64::new(0.4, 0.7);
        assert!((complex_hermite(1, 0, z) - z * PI.sqrt()).norm() < 1e-15);
        assert!((complex_hermite(0, 1, z) + z.conj() * PI.sqrt()).norm() < 1e-15);
    }

    #[test]
    fn signed_orders_are_rejected() {
        assert!(hermite_checked(-1, 0.0).is_err());
        assert!(laguerre_checked(-3, 0.0, 1.0).is_err());
        assert!(hermite_checked(2, 0.1).is_ok());
    }

    #[test]
    fn extended_and_plain_recurrences_agree_near_the_switch() {
        // Order 31 runs in double-double; rerun it in plain f64 for comparison.
        let t = 1.3;
        let all = hermite_all(31, t);
        assert!((all[31] - hermite(31, t)).abs() < 1e-13);
        let mut prev = 1.0;
        let mut cur = 1.5 - t;
        for j in 1..31 {
            let jf = j as f64;
            let next = ((2.0 * jf + 1.5 - t) * cur - (jf + 0.5) * prev) / (jf + 1.0);
            prev = cur;
            cur = next;
        }
        assert!((cur - laguerre(31, 0.5, t)).abs() < 1e-10 * cur.abs().max(1.0));
    }

    #[test]
    fn multi_index_helpers() {
        let m: MultiIndex = "2,0,3".parse().unwrap();
        assert_eq!(m.total(), 5);
        assert_eq!(m.factorial(), 12.0);
        assert_eq!(m.to_string(), "2,0,3");
        assert!("1,-2".parse::<MultiIndex>().is_err());
        assert_eq!(MultiIndex::up_to_total(2, 2).len(), 6);
        assert_eq!(MultiIndex::in_box(2, 2).len(), 9);
    }
}
