//! Reinhardt domains through their shadows in `V^d = [0, inf)^d`, polyradial
//! masks `F(z) = c + F_0(|z_1|, ..., |z_d|)`, and integration over shadows.

use crate::error::{Error, Result};
use crate::phasespace::GridFunction;
use crate::quad::{self, Integral, Tolerance};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cell::Cell;
use std::f64::consts::PI;

/// Accuracy requested from [`shadow_quadrature`] on bounded shadows.
pub const BOUNDED_REL_TOL: f64 = 1e-8;
/// Accuracy requested on unbounded shadows.
pub const UNBOUNDED_REL_TOL: f64 = 1e-6;

/// Closed subset of `V^d` whose preimage under `z -> (|z_1|, ..., |z_d|)` is
/// the Reinhardt domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ShadowRegion {
    /// `|r| <= radius`
    Ball { d: usize, radius: f64 },
    /// `r_j <= radii[j]`
    Polydisc { radii: Vec<f64> },
    /// `sum r_j^p <= radius^p`
    PBall { d: usize, p: f64, radius: f64 },
    /// `sum weights[j] r_j^2 <= bound`
    WeightedQuadratic { weights: Vec<f64>, bound: f64 },
    /// Union of closed radial intervals (`d = 1`): a union of annuli.
    Table { intervals: Vec<(f64, f64)> },
    /// Closure of `V^d` minus the inner shadow.
    Complement { inner: Box<ShadowRegion> },
}

impl ShadowRegion {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        match self {
            ShadowRegion::Ball { d, radius } | ShadowRegion::PBall { d, radius, .. } => {
                if *d == 0 || !(*radius > 0.0) {
                    return bad(format!("ball needs d > 0 and radius > 0, got d={d}, R={radius}"));
                }
                if let ShadowRegion::PBall { p, .. } = self {
                    if !(*p > 0.0) {
                        return bad(format!("p-ball exponent must be positive, got {p}"));
                    }
                }
            }
            ShadowRegion::Polydisc { radii } => {
                if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) {
                    return bad("polydisc radii must be positive".into());
                }
            }
            ShadowRegion::WeightedQuadratic { weights, bound } => {
                if weights.is_empty() || weights.iter().any(|w| !(*w > 0.0)) || !(*bound > 0.0) {
                    return bad("weighted-quadratic needs positive weights and bound".into());
                }
            }
            ShadowRegion::Table { intervals } => {
                if intervals.is_empty() {
                    return bad("table shadow needs at least one interval".into());
                }
                let mut last = -1.0;
                for &(a, b) in intervals {
                    if !(a >= 0.0 && b > a && a > last) {
                        return bad("table intervals must be disjoint, increasing and non-negative".into());
                    }
                    last = b;
                }
            }
            ShadowRegion::Complement { inner } => {
                if matches!(**inner, ShadowRegion::Complement { .. }) {
                    return bad("nested complements are not supported".into());
                }
                inner.validate()?;
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            ShadowRegion::Ball { d, .. } | ShadowRegion::PBall { d, .. } => *d,
            ShadowRegion::Polydisc { radii } => radii.len(),
            ShadowRegion::WeightedQuadratic { weights, .. } => weights.len(),
            ShadowRegion::Table { .. } => 1,
            ShadowRegion::Complement { inner } => inner.dim(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, ShadowRegion::Complement { .. })
    }

    /// Membership of a point of `V^d`; boundaries are included.
    pub fn contains(&self, r: &[f64]) -> bool {
        const SLACK: f64 = 1e-12;
        match self {
            ShadowRegion::Ball { radius, .. } => r.iter().map(|v| v * v).sum::<f64>() <= radius * radius * (1.0 + SLACK),
            ShadowRegion::Polydisc { radii } => r.iter().zip(radii).all(|(v, b)| *v <= b * (1.0 + SLACK)),
            ShadowRegion::PBall { p, radius, .. } => {
                r.iter().map(|v| v.powf(*p)).sum::<f64>() <= radius.powf(*p) * (1.0 + SLACK)
            }
            ShadowRegion::WeightedQuadratic { weights, bound } => {
                r.iter().zip(weights).map(|(v, w)| w * v * v).sum::<f64>() <= bound * (1.0 + SLACK)
            }
            ShadowRegion::Table { intervals } => {
                intervals.iter().any(|&(a, b)| r[0] >= a * (1.0 - SLACK) && r[0] <= b * (1.0 + SLACK))
            }
            ShadowRegion::Complement { inner } => !inner.contains_interior(r),
        }
    }

    fn contains_interior(&self, r: &[f64]) -> bool {
        match self {
            ShadowRegion::Ball { radius, .. } => r.iter().map(|v| v * v).sum::<f64>() < radius * radius,
            ShadowRegion::Polydisc { radii } => r.iter().zip(radii).all(|(v, b)| v < b),
            ShadowRegion::PBall { p, radius, .. } => r.iter().map(|v| v.powf(*p)).sum::<f64>() < radius.powf(*p),
            ShadowRegion::WeightedQuadratic { weights, bound } => {
                r.iter().zip(weights).map(|(v, w)| w * v * v).sum::<f64>() < *bound
            }
            ShadowRegion::Table { intervals } => intervals.iter().any(|&(a, b)| r[0] > a && r[0] < b),
            ShadowRegion::Complement { .. } => self.contains(r),
        }
    }

    /// Intervals of the next coordinate `r_{j}` given `r_1..r_{j-1}` in
    /// `prefix`, for bounded shadows. All kinds except `Table` are
    /// down-closed, so the section is `[0, h(prefix)]`.
    pub fn sections(&self, prefix: &[f64]) -> Vec<(f64, f64)> {
        let j = prefix.len();
        let upper = match self {
            ShadowRegion::Ball { radius, .. } => {
                let rest = radius * radius - prefix.iter().map(|v| v * v).sum::<f64>();
                (rest > 0.0).then(|| rest.sqrt())
            }
            ShadowRegion::Polydisc { radii } => Some(radii[j]),
            ShadowRegion::PBall { p, radius, .. } => {
                let rest = radius.powf(*p) - prefix.iter().map(|v| v.powf(*p)).sum::<f64>();
                (rest > 0.0).then(|| rest.powf(1.0 / p))
            }
            ShadowRegion::WeightedQuadratic { weights, bound } => {
                let rest = bound - prefix.iter().zip(weights).map(|(v, w)| w * v * v).sum::<f64>();
                (rest > 0.0).then(|| (rest / weights[j]).sqrt())
            }
            ShadowRegion::Table { intervals } => return intervals.clone(),
            ShadowRegion::Complement { .. } => panic!("sections of an unbounded shadow"),
        };
        upper.map(|u| vec![(0.0, u)]).unwrap_or_default()
    }
}

/// Whether the Reinhardt domain of `shadow` contains `z`.
pub fn lift_membership(shadow: &ShadowRegion, z: &[Complex64]) -> bool {
    let r: Vec<f64> = z.iter().map(|c| c.norm()).collect();
    shadow.contains(&r)
}

/// Iterated adaptive integration over the region described by `sections`.
fn iterated<S, F>(sections: &S, d: usize, prefix: &mut Vec<f64>, f: &mut F, dim: usize, tol: Tolerance, ok: &Cell<bool>) -> Vec<f64>
where
    S: Fn(&[f64]) -> Vec<(f64, f64)>,
    F: FnMut(&[f64], &mut [f64]),
{
    let mut total = vec![0.0; dim];
    for (a, b) in sections(prefix) {
        let r = quad::integrate(
            |x, out| {
                prefix.push(x);
                if prefix.len() == d {
                    f(prefix, out);
                } else {
                    let inner = iterated(sections, d, prefix, f, dim, tol, ok);
                    out.copy_from_slice(&inner);
                }
                prefix.pop();
            },
            a,
            b,
            dim,
            tol,
        );
        ok.set(ok.get() && r.converged);
        for (t, v) in total.iter_mut().zip(&r.value) {
            *t += v;
        }
    }
    total
}

pub(crate) fn iterated_integral<S, F>(sections: S, d: usize, mut f: F, dim: usize, tol: Tolerance) -> Integral
where
    S: Fn(&[f64]) -> Vec<(f64, f64)>,
    F: FnMut(&[f64], &mut [f64]),
{
    let ok = Cell::new(true);
    let mut prefix = Vec::with_capacity(d);
    let mut evals = 0usize;
    let value = iterated(&sections, d, &mut prefix, &mut |r: &[f64], out: &mut [f64]| {
        evals += 1;
        f(r, out)
    }, dim, tol, &ok);
    let norm = value.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let error = tol.abs.max(tol.rel * norm);
    Integral { value, error, converged: ok.get(), evaluations: evals }
}

/// Iterated integral over `V^d`, each coordinate mapped from `[0, 1)`.
fn orthant_integral<F>(d: usize, mut f: F, dim: usize, tol: Tolerance) -> Integral
where
    F: FnMut(&[f64], &mut [f64]),
{
    // Map r = s / (1 - s) per coordinate and integrate over the unit cube.
    let mut scratch = vec![0.0; d];
    let mut out = iterated_integral(
        |_: &[f64]| vec![(0.0, 1.0)],
        d,
        |s, o| {
            let mut jac = 1.0;
            for (r, &sv) in scratch.iter_mut().zip(s) {
                let om = 1.0 - sv;
                *r = sv / om;
                jac /= om * om;
            }
            f(&scratch, o);
            o.iter_mut().for_each(|v| *v *= jac);
        },
        dim,
        tol,
    );
    out.error = out.error.max(tol.rel * out.value.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    out
}

/// `int_W f(r) dr` for a vector-valued `f` over a shadow.
///
/// Bounded shadows use iterated adaptive Gauss–Kronrod with the exact
/// section limits; a complement is `int_{V^d} - int_{inner}`.
pub fn shadow_quadrature_vec<F>(shadow: &ShadowRegion, mut f: F, dim: usize) -> Result<Integral>
where
    F: FnMut(&[f64], &mut [f64]),
{
    shadow.validate()?;
    let d = shadow.dim();
    let bounded_tol = Tolerance::new(1e-15, BOUNDED_REL_TOL * 1e-3);
    match shadow {
        ShadowRegion::Complement { inner } => {
            let mut all = orthant_integral(d, &mut f, dim, Tolerance::new(1e-15, UNBOUNDED_REL_TOL * 1e-4));
            let part = iterated_integral(|p: &[f64]| inner.sections(p), d, &mut f, dim, bounded_tol);
            all.accumulate(&part, -1.0);
            Ok(all)
        }
        _ => Ok(iterated_integral(|p: &[f64]| shadow.sections(p), d, f, dim, bounded_tol)),
    }
}

/// Scalar version of [`shadow_quadrature_vec`].
pub fn shadow_quadrature<F: FnMut(&[f64]) -> f64>(shadow: &ShadowRegion, mut f: F) -> Result<Integral> {
    shadow_quadrature_vec(shadow, |r, o| o[0] = f(r), 1)
}

/// The radial profile `F_0` of a polyradial mask.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Profile {
    Zero,
    /// `scale * 1_W(r)`
    Indicator { shadow: ShadowRegion, scale: f64 },
    /// `4 / (1 + r^2)^2` (`d = 1`).
    FubiniStudy,
    /// `exp(-pi |r|^2 / width)`
    Gaussian { width: f64 },
    /// Piecewise-linear in `|r|` through `(radius, value)` nodes, clamped to the
    /// last value beyond the table.
    RadialTable { table: Vec<(f64, f64)> },
    /// Unit point mass at the origin. Only usable where the mask is paired
    /// with a continuous function.
    Dirac,
}

/// Polyradial mask `F(z) = c + F_0(tau(z))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaskSpec {
    pub d: usize,
    pub constant: f64,
    pub profile: Profile,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

impl MaskSpec {
    /// Builds a mask and rewrites it into a constant plus a profile that is
    /// either compactly supported or decaying.
    pub fn new(d: usize, constant: f64, profile: Profile) -> Result<Self> {
        let mut m = MaskSpec { d, constant, profile, warnings: Vec::new() };
        m.normalize()?;
        Ok(m)
    }

    pub fn indicator(shadow: ShadowRegion) -> Result<Self> {
        let d = shadow.dim();
        Self::new(d, 0.0, Profile::Indicator { shadow, scale: 1.0 })
    }

    pub fn disc(radius: f64) -> Result<Self> {
        Self::indicator(ShadowRegion::Ball { d: 1, radius })
    }

    pub fn full_plane(d: usize, constant: f64) -> Result<Self> {
        Self::new(d, constant, Profile::Zero)
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.constant += c;
        self
    }

    fn normalize(&mut self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Config("mask dimension must be positive".into()));
        }
        match &mut self.profile {
            Profile::Indicator { shadow, scale } => {
                shadow.validate()?;
                if shadow.dim() != self.d {
                    return Err(Error::Dimension { expected: self.d, got: shadow.dim() });
                }
                if let ShadowRegion::Complement { inner } = shadow {
                    // s 1_{complement} = s - s 1_{inner} up to a null set.
                    self.constant += *scale;
                    let inner = (**inner).clone();
                    self.profile = Profile::Indicator { shadow: inner, scale: -*scale };
                }
            }
            Profile::FubiniStudy => {
                if self.d != 1 {
                    return Err(Error::Unsupported("the Fubini–Study mask is implemented for d = 1".into()));
                }
            }
            Profile::Gaussian { width } => {
                if !(*width > 0.0) {
                    return Err(Error::Config(format!("Gaussian mask width must be positive, got {width}")));
                }
            }
            Profile::RadialTable { table } => {
                if table.len() < 2 {
                    return Err(Error::Config("radial table needs at least two rows".into()));
                }
                if table.windows(2).any(|w| !(w[1].0 > w[0].0)) || table[0].0 < 0.0 {
                    return Err(Error::Config("radial table radii must increase from a non-negative start".into()));
                }
                let last = table.last().unwrap().1;
                if last != 0.0 {
                    self.warnings.push(format!(
                        "radial table is clamped to {last} beyond r = {}; treated as constant {last} plus a compactly supported profile",
                        table.last().unwrap().0
                    ));
                    self.constant += last;
                    table.iter_mut().for_each(|row| row.1 -= last);
                }
            }
            Profile::Zero | Profile::Dirac => {}
        }
        Ok(())
    }

    /// `F_0(r)`. The Dirac profile has no pointwise value and evaluates to 0.
    pub fn profile_at(&self, r: &[f64]) -> f64 {
        match &self.profile {
            Profile::Zero | Profile::Dirac => 0.0,
            Profile::Indicator { shadow, scale } => {
                if shadow.contains(r) {
                    *scale
                } else {
                    0.0
                }
            }
            Profile::FubiniStudy => {
                let s = 1.0 + r[0] * r[0];
                4.0 / (s * s)
            }
            Profile::Gaussian { width } => (-PI * r.iter().map(|v| v * v).sum::<f64>() / width).exp(),
            Profile::RadialTable { table } => {
                let rho = r.iter().map(|v| v * v).sum::<f64>().sqrt();
                interpolate_table(table, rho)
            }
        }
    }

    pub fn eval(&self, z: &[Complex64]) -> f64 {
        let r: Vec<f64> = z.iter().map(|c| c.norm()).collect();
        self.constant + self.profile_at(&r)
    }

    pub fn is_dirac(&self) -> bool {
        matches!(self.profile, Profile::Dirac)
    }

    /// Radius beyond which the profile vanishes, if it has compact support.
    pub fn support_radius(&self) -> Option<f64> {
        match &self.profile {
            Profile::Zero | Profile::Dirac => Some(0.0),
            Profile::Indicator { shadow, .. } => bounding_radius(shadow),
            Profile::RadialTable { table } => Some(table.last().unwrap().0),
            Profile::FubiniStudy | Profile::Gaussian { .. } => None,
        }
    }

    /// `int_{V^d} F_0(r(u)) g(u) du` with `r_j = sqrt(u_j * scales[j])`.
    ///
    /// Indicator profiles integrate `g` over the image of the shadow in
    /// `u`-coordinates; smooth profiles integrate over `[0, u_max]^d`.
    pub fn integrate_profile_u<G>(&self, scales: &[f64], u_max: f64, mut g: G, dim: usize) -> Result<Integral>
    where
        G: FnMut(&[f64], &mut [f64]),
    {
        if scales.len() != self.d {
            return Err(Error::Dimension { expected: self.d, got: scales.len() });
        }
        let tol = Tolerance::new(1e-15, 1e-11);
        match &self.profile {
            Profile::Zero => Ok(Integral { value: vec![0.0; dim], error: 0.0, converged: true, evaluations: 0 }),
            Profile::Dirac => Err(Error::Unsupported("point-mass profiles have no density in u-coordinates".into())),
            Profile::Indicator { shadow, scale } => {
                let to_r = |u: &[f64]| -> Vec<f64> { u.iter().zip(scales).map(|(v, s)| (v * s).sqrt()).collect() };
                let mut out = iterated_integral(
                    |prefix: &[f64]| {
                        let j = prefix.len();
                        shadow
                            .sections(&to_r(prefix))
                            .into_iter()
                            .map(|(a, b)| (a * a / scales[j], b * b / scales[j]))
                            .collect()
                    },
                    self.d,
                    &mut g,
                    dim,
                    tol,
                );
                out.value.iter_mut().for_each(|v| *v *= scale);
                Ok(out)
            }
            _ => {
                let mut r = vec![0.0; self.d];
                Ok(iterated_integral(
                    |_: &[f64]| vec![(0.0, u_max)],
                    self.d,
                    |u, o| {
                        for j in 0..u.len() {
                            r[j] = (u[j] * scales[j]).sqrt();
                        }
                        let w = self.profile_at(&r);
                        g(u, o);
                        o.iter_mut().for_each(|v| *v *= w);
                    },
                    dim,
                    tol,
                ))
            }
        }
    }
}

fn interpolate_table(table: &[(f64, f64)], rho: f64) -> f64 {
    if rho <= table[0].0 {
        return table[0].1;
    }
    for w in table.windows(2) {
        let ((r0, v0), (r1, v1)) = (w[0], w[1]);
        if rho <= r1 {
            return v0 + (v1 - v0) * (rho - r0) / (r1 - r0);
        }
    }
    table.last().unwrap().1
}

/// Largest `|r|` over a bounded shadow.
pub fn bounding_radius(shadow: &ShadowRegion) -> Option<f64> {
    match shadow {
        ShadowRegion::Ball { radius, .. } => Some(*radius),
        ShadowRegion::Polydisc { radii } => Some(radii.iter().map(|r| r * r).sum::<f64>().sqrt()),
        ShadowRegion::PBall { d, p, radius } => {
            // max |r|_2 subject to |r|_p <= R: R for p <= 2, R d^{1/2 - 1/p} otherwise.
            Some(if *p <= 2.0 { *radius } else { radius * (*d as f64).powf(0.5 - 1.0 / p) })
        }
        ShadowRegion::WeightedQuadratic { weights, bound } => {
            let wmin = weights.iter().cloned().fold(f64::INFINITY, f64::min);
            Some((bound / wmin).sqrt())
        }
        ShadowRegion::Table { intervals } => intervals.last().map(|iv| iv.1),
        ShadowRegion::Complement { .. } => None,
    }
}

/// Outcome of [`polyradial_check`].
#[derive(Clone, Copy, Debug)]
pub struct PolyradialReport {
    /// Largest `|F(rotated z) - F(z)|` relative to `max |F|`.
    pub deviation: f64,
    pub samples: usize,
}

impl PolyradialReport {
    pub fn is_polyradial(&self, tol: f64) -> bool {
        self.deviation <= tol
    }
}

/// Compares a sampled function with its images under coordinate-wise
/// rotations `z_j -> e^{i theta_j} z_j`, interpolating off-grid values.
pub fn polyradial_check(f: &GridFunction) -> PolyradialReport {
    let g = f.grid;
    let d = g.d;
    let scale = f.max_abs().max(f64::MIN_POSITIVE);
    let angles = [0.37, 1.1, 2.03, 2.9, -0.8];
    let stride = ((g.len() as f64 / 20000.0).powf(1.0 / g.axes() as f64).ceil() as usize).max(1);
    let limit = g.half_width - 4.0 * g.step();
    let mut idx = vec![0usize; g.axes()];
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    for lin in 0..g.len() {
        g.unravel(lin, &mut idx);
        if idx.iter().any(|i| i % stride != 0) {
            continue;
        }
        let p = g.point(lin);
        if (0..d).any(|j| (p[j] * p[j] + p[d + j] * p[d + j]).sqrt() > limit) {
            continue;
        }
        let v = f.data[lin].re;
        for (a, &theta) in angles.iter().enumerate() {
            let mut q = p.clone();
            for j in 0..d {
                // Rotate each plane by a different angle when d > 1.
                let th = theta * (1.0 + 0.37 * ((j + a) % 3) as f64);
                let (s, c) = th.sin_cos();
                q[j] = c * p[j] - s * p[d + j];
                q[d + j] = s * p[j] + c * p[d + j];
            }
            if let Some(w) = f.interpolate_re(&q) {
                worst = worst.max((w - v).abs());
                samples += 1;
            }
        }
    }
    PolyradialReport { deviation: worst / scale, samples }
}
