//! Closed-form eigenvalues of polyradial localization and mixed-state
//! operators: disc, Reinhardt, weighted masks, polyradial states and
//! Gaussian states in Williamson form.

use crate::error::{Error, Result};
use crate::phasespace::{heat_kernel, GridFunction};
use crate::quad::{self, Integral, Tolerance};
use crate::reinhardt::{polyradial_check, shadow_quadrature, MaskSpec, Profile, ShadowRegion};
use crate::specfun::{laguerre, MultiIndex};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::Write;

/// Largest relative deviation under rotations accepted for sampled state symbols.
pub const POLYRADIAL_TOL: f64 = 1e-6;

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// `|V_{phi_k} phi_n(z)|^2` for `d = 1` as a function of `u = pi |z|^2`:
/// `(lo!/hi!) u^{hi-lo} e^{-u} L_lo^{hi-lo}(u)^2` with `hi = max(n, k)`.
pub fn stft_density(n: usize, k: usize, u: f64) -> f64 {
    let (hi, lo) = if n >= k { (n, k) } else { (k, n) };
    let a = hi - lo;
    let l = laguerre(lo, a as f64, u);
    if l == 0.0 || (a > 0 && u == 0.0) {
        return 0.0;
    }
    let pow = if a == 0 { 0.0 } else { a as f64 * u.ln() };
    (pow - u + ln_factorial(lo) - ln_factorial(hi) + 2.0 * l.abs().ln()).exp()
}

/// Truncation point of `u`-integrals whose integrand is a polynomial of
/// degree `degree` times `e^{-u}`; the neglected tail is below 1e-14.
pub fn u_cutoff(degree: usize) -> f64 {
    let mut u = 40.0 + degree as f64;
    // Increase until e^{-u} u^deg / deg! is negligible.
    while (degree as f64 * u.ln() - u - ln_factorial(degree)) > -36.0 {
        u += 5.0;
    }
    u
}

fn check(integral: &Integral) -> Result<(f64, f64)> {
    if !integral.converged {
        return Err(Error::Quadrature { achieved: integral.error });
    }
    Ok((integral.scalar(), integral.error))
}

/// `c_{n,k}(R)`: eigenvalue of the disc localization operator of radius `R`
/// with window `phi_k`, on `phi_n`.
pub fn eig_disc(n: usize, k: usize, radius: f64) -> Result<f64> {
    Ok(eig_disc_est(n, k, radius)?.0)
}

pub fn eig_disc_est(n: usize, k: usize, radius: f64) -> Result<(f64, f64)> {
    if !(radius > 0.0) {
        return Err(Error::Domain(format!("disc radius must be positive, got {radius}")));
    }
    let upper = (PI * radius * radius).min(u_cutoff(n + k));
    check(&quad::integrate_scalar(|u| stft_density(n, k, u), 0.0, upper, Tolerance::new(1e-15, 1e-12)))
}

fn check_index(n: &MultiIndex, d: usize) -> Result<()> {
    if n.dim() != d {
        return Err(Error::Dimension { expected: d, got: n.dim() });
    }
    Ok(())
}

/// `c_{n,k}(Omega)` for the Reinhardt domain of `shadow`, integrated in
/// `r`-coordinates with the polycylindrical Jacobian `prod 2 pi r_j`.
pub fn eig_reinhardt(n: &MultiIndex, k: &MultiIndex, shadow: &ShadowRegion) -> Result<f64> {
    Ok(eig_reinhardt_est(n, k, shadow)?.0)
}

pub fn eig_reinhardt_est(n: &MultiIndex, k: &MultiIndex, shadow: &ShadowRegion) -> Result<(f64, f64)> {
    let d = shadow.dim();
    check_index(n, d)?;
    check_index(k, d)?;
    let q = shadow_quadrature(shadow, |r| {
        r.iter()
            .enumerate()
            .map(|(j, &rj)| 2.0 * PI * rj * stft_density(n.0[j], k.0[j], PI * rj * rj))
            .product()
    })?;
    check(&q)
}

/// `c_{n,k}(F) = c + prod (k!/n!) int u^{n-k} e^{-u} L_k^{n-k}(u)^2 F_0(sqrt(u/pi)) du`,
/// the eigenvalue of the localization operator with mask `F` and window
/// `phi_k` (reflected componentwise where `n_j < k_j`).
pub fn eig_weighted(n: &MultiIndex, k: &MultiIndex, mask: &MaskSpec) -> Result<f64> {
    Ok(eig_weighted_est(n, k, mask)?.0)
}

pub fn eig_weighted_est(n: &MultiIndex, k: &MultiIndex, mask: &MaskSpec) -> Result<(f64, f64)> {
    let d = mask.d;
    check_index(n, d)?;
    check_index(k, d)?;
    if mask.is_dirac() {
        // |V_{phi_k} phi_n(0)|^2 = delta_{nk}
        return Ok((mask.constant + if n == k { 1.0 } else { 0.0 }, 0.0));
    }
    let degree = (0..d).map(|j| n.0[j] + k.0[j]).max().unwrap_or(0);
    let scales = vec![1.0 / PI; d];
    let q = mask.integrate_profile_u(
        &scales,
        u_cutoff(degree),
        |u, o| o[0] = u.iter().enumerate().map(|(j, &uj)| stft_density(n.0[j], k.0[j], uj)).product(),
        1,
    )?;
    let (v, e) = check(&q)?;
    Ok((mask.constant + v, e))
}

/// Weyl symbol of a polyradial density-type operator `S`.
#[derive(Clone, Debug)]
pub enum StateSymbol {
    /// `S = 2^d P` with `P` the parity operator; the symbol is a point mass.
    Parity,
    /// Gaussian symbol `g_K` with Williamson diagonal `k_j`.
    Gaussian { k: Vec<f64> },
    /// `S = sum_m w_m phi_m (x) phi_m`.
    HermiteMixture { terms: Vec<(MultiIndex, f64)> },
    /// Sampled symbol (`d = 1`); must pass [`polyradial_check`].
    Grid(GridFunction),
    /// Gaussian `g_K` translated to `centre = (x, omega)` (`d = 1`). Not
    /// polyradial unless the centre is the origin.
    Displaced { k: f64, centre: [f64; 2] },
}

impl StateSymbol {
    /// Thermal state with mean energy `e` per mode.
    pub fn thermal(d: usize, e: f64) -> Result<Self> {
        if !(e >= 0.0) {
            return Err(Error::Domain(format!("thermal energy must be non-negative, got {e}")));
        }
        Ok(StateSymbol::Gaussian { k: vec![1.0 / (4.0 * PI) + e / (2.0 * PI); d] })
    }

    /// Thermal state truncated to the first `n` Hermite levels, as a mixture.
    pub fn thermal_mixture(e: f64, levels: usize) -> Self {
        let q = e / (e + 1.0);
        let terms = (0..levels).map(|m| (MultiIndex(vec![m]), q.powi(m as i32) / (e + 1.0))).collect();
        StateSymbol::HermiteMixture { terms }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            StateSymbol::Parity => None,
            StateSymbol::Gaussian { k } => Some(k.len()),
            StateSymbol::HermiteMixture { terms } => terms.first().map(|t| t.0.dim()),
            StateSymbol::Grid(g) => Some(g.grid.d),
            StateSymbol::Displaced { .. } => Some(1),
        }
    }

    /// `int a_S dz`, the trace of `S` where it is trace class.
    pub fn mass(&self) -> f64 {
        match self {
            StateSymbol::Parity | StateSymbol::Gaussian { .. } | StateSymbol::Displaced { .. } => 1.0,
            StateSymbol::HermiteMixture { terms } => terms.iter().map(|t| t.1).sum(),
            StateSymbol::Grid(g) => g.integral().re,
        }
    }

    /// Radial profile `a_S(rho)` for `d = 1`; `None` for the point mass.
    fn radial(&self) -> Option<Box<dyn Fn(f64) -> f64 + Sync + '_>> {
        match self {
            StateSymbol::Parity => None,
            StateSymbol::Gaussian { k } => {
                let e = 2.0 * PI * k[0];
                Some(Box::new(move |rho| heat_kernel(e, Complex64::new(rho, 0.0))))
            }
            StateSymbol::HermiteMixture { terms } => Some(Box::new(move |rho| {
                let t = 2.0 * PI * rho * rho;
                terms
                    .iter()
                    .map(|(m, w)| {
                        let sign = if m.0[0] % 2 == 0 { 1.0 } else { -1.0 };
                        w * 2.0 * sign * (-t).exp() * laguerre(m.0[0], 0.0, 2.0 * t)
                    })
                    .sum()
            })),
            StateSymbol::Grid(g) => Some(Box::new(move |rho| g.interpolate_re(&[rho, 0.0]).unwrap_or(0.0))),
            StateSymbol::Displaced { k, .. } => {
                let e = 2.0 * PI * k;
                Some(Box::new(move |rho| heat_kernel(e, Complex64::new(rho, 0.0))))
            }
        }
    }

    /// `a_S(x, omega)` for `d = 1`; `None` for the point mass.
    pub fn value_1d(&self, x: f64, w: f64) -> Option<f64> {
        match self {
            StateSymbol::Displaced { k, centre } => {
                Some(heat_kernel(2.0 * PI * k, Complex64::new(x - centre[0], w - centre[1])))
            }
            StateSymbol::Grid(g) => Some(g.interpolate_re(&[x, w]).unwrap_or(0.0)),
            _ => self.radial().map(|a| a(x.hypot(w))),
        }
    }
}

/// Which of the two equivalent pairings evaluates `lambda_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MixedForm {
    /// `int (F * a_S)(z) W(phi_n)(z) dz` via the polyradial reduction.
    WignerPairing,
    /// `int F(z) (a_S * W(phi_n))(z) dz` using closed forms of the inner convolution.
    MaskPairing,
}

/// `(F_0 * a)(rho)` for `d = 1` by polar integration around the origin.
fn radial_convolution(mask: &MaskSpec, a: &(dyn Fn(f64) -> f64 + Sync), rho: f64) -> f64 {
    let tol = Tolerance::new(1e-15, 1e-11);
    let angular = |s: f64| -> f64 {
        let inner = quad::integrate_scalar(
            |th: f64| a((rho * rho + s * s - 2.0 * rho * s * th.cos()).max(0.0).sqrt()),
            0.0,
            PI,
            tol,
        );
        2.0 * s * inner.scalar()
    };
    match &mask.profile {
        Profile::Zero | Profile::Dirac => 0.0,
        Profile::Indicator { shadow, scale } => {
            shadow.sections(&[]).iter().map(|&(lo, hi)| quad::integrate_scalar(&angular, lo, hi, tol).scalar()).sum::<f64>()
                * scale
        }
        Profile::RadialTable { table } => {
            let hi = table.last().unwrap().0;
            quad::integrate_scalar(|s| mask.profile_at(&[s]) * angular(s), 0.0, hi, tol).scalar()
        }
        _ => quad::integrate_to_infinity(|s, o| o[0] = mask.profile_at(&[s]) * angular(s), 0.0, 1, tol).scalar(),
    }
}

/// `lambda_n` of the mixed-state localization operator `F * S` on `phi_n`.
pub fn eig_mixed(n: &MultiIndex, mask: &MaskSpec, symbol: &StateSymbol, form: MixedForm) -> Result<f64> {
    Ok(eig_mixed_table(std::slice::from_ref(n), mask, symbol, form)?[0].0)
}

/// [`eig_mixed`] for several indices sharing one symbol convolution.
pub fn eig_mixed_table(ns: &[MultiIndex], mask: &MaskSpec, symbol: &StateSymbol, form: MixedForm) -> Result<Vec<(f64, f64)>> {
    let d = mask.d;
    if let Some(sd) = symbol.dim() {
        if sd != d {
            return Err(Error::Dimension { expected: d, got: sd });
        }
    }
    for n in ns {
        check_index(n, d)?;
    }
    if let StateSymbol::Grid(g) = symbol {
        if d != 1 {
            return Err(Error::Unsupported("sampled state symbols are supported for d = 1".into()));
        }
        let report = polyradial_check(g);
        if !report.is_polyradial(POLYRADIAL_TOL) {
            return Err(Error::NotPolyradial { deviation: report.deviation });
        }
    }
    if let StateSymbol::Displaced { k, centre } = symbol {
        let at = |x: f64, w: f64| heat_kernel(2.0 * PI * k, Complex64::new(x - centre[0], w - centre[1]));
        let top = at(centre[0], centre[1]);
        let deviation = (top - at(-centre[0], -centre[1])).abs() / top;
        if deviation > POLYRADIAL_TOL {
            return Err(Error::NotPolyradial { deviation });
        }
    }
    let shift = mask.constant * symbol.mass();

    match (symbol, form) {
        (StateSymbol::Parity, _) => {
            if mask.is_dirac() {
                return Err(Error::Unsupported("a point-mass mask cannot be paired with the parity state".into()));
            }
            ns.par_iter().map(|n| wigner_pairing(n, mask, None, shift)).collect()
        }
        (StateSymbol::Gaussian { k }, MixedForm::MaskPairing) => {
            ns.par_iter().map(|n| eig_gaussian_est(n, mask, k)).collect()
        }
        (StateSymbol::HermiteMixture { terms }, MixedForm::MaskPairing) => ns
            .par_iter()
            .map(|n| {
                let (mut v, mut e) = (0.0, 0.0);
                for (m, w) in terms {
                    let (vm, em) = eig_weighted_est(n, m, mask)?;
                    v += w * vm;
                    e += w.abs() * em;
                }
                Ok((v, e))
            })
            .collect(),
        _ => {
            if d != 1 {
                return Err(Error::Unsupported(
                    "the Wigner pairing with a non-point symbol is implemented for d = 1".into(),
                ));
            }
            let a = symbol.radial().expect("non-parity symbols have a profile");
            if mask.is_dirac() {
                // F = delta: F * a_S = a_S (all symbols here are even).
                return ns
                    .par_iter()
                    .map(|n| {
                        let g = |rho: f64| a(rho);
                        wigner_pairing(n, &MaskSpec::full_plane(1, 0.0)?, Some(&g), mask.constant * symbol.mass())
                    })
                    .collect();
            }
            let g = |rho: f64| radial_convolution(mask, &*a, rho);
            ns.par_iter().map(|n| wigner_pairing(n, mask, Some(&g), shift)).collect()
        }
    }
}

/// `shift + (-1)^{|n|} int G(sqrt(u / 2pi)) prod L_{n_j}(2 u_j) e^{-u} du` where
/// `G` is the mask profile itself (`conv = None`) or a radial function (`d = 1`).
fn wigner_pairing(n: &MultiIndex, mask: &MaskSpec, conv: Option<&(dyn Fn(f64) -> f64 + Sync)>, shift: f64) -> Result<(f64, f64)> {
    let d = mask.d;
    let sign = if n.total() % 2 == 0 { 1.0 } else { -1.0 };
    let kernel = |u: &[f64]| -> f64 {
        sign * u.iter().enumerate().map(|(j, &uj)| laguerre(n.0[j], 0.0, 2.0 * uj) * (-uj).exp()).product::<f64>()
    };
    let u_max = u_cutoff(n.0.iter().cloned().max().unwrap_or(0));
    let q = match conv {
        None => mask.integrate_profile_u(&vec![1.0 / (2.0 * PI); d], u_max, |u, o| o[0] = kernel(u), 1)?,
        Some(g) => quad::integrate(
            |u, o| o[0] = g((u / (2.0 * PI)).sqrt()) * kernel(&[u]),
            0.0,
            u_max,
            1,
            Tolerance::new(1e-14, 1e-10),
        ),
    };
    let (v, e) = check(&q)?;
    Ok((shift + v, e))
}

/// Eigenvalue on `phi_n` of `G * S` for a Gaussian state with Williamson
/// diagonal `k` (in Williamson coordinates), through the heat-kernel lemma
/// with `E_j = 2 pi k_j`. At `k_j = 1/(4pi)` the spectrogram limit is used.
pub fn eig_gaussian(n: &MultiIndex, mask: &MaskSpec, k: &[f64]) -> Result<f64> {
    Ok(eig_gaussian_est(n, mask, k)?.0)
}

/// Relative distance from `1/(4pi)` below which `k` is treated as the
/// spectrogram boundary.
pub const GAUSSIAN_BOUNDARY_TOL: f64 = 1e-12;

pub fn eig_gaussian_est(n: &MultiIndex, mask: &MaskSpec, k: &[f64]) -> Result<(f64, f64)> {
    let d = mask.d;
    check_index(n, d)?;
    if k.len() != d {
        return Err(Error::Dimension { expected: d, got: k.len() });
    }
    // Per coordinate: heat parameter E, u-scale (E + 1/2)/pi, and whether
    // the spectrogram limit applies.
    let mut e = Vec::with_capacity(d);
    for &kj in k {
        let x = 4.0 * PI * kj - 1.0;
        if x.abs() < GAUSSIAN_BOUNDARY_TOL {
            e.push(0.5);
        } else if x < 0.0 {
            return Err(Error::Domain(format!(
                "Williamson value {kj} is below 1/(4 pi); the symbol is not a density operator"
            )));
        } else {
            e.push(2.0 * PI * kj);
        }
    }
    let factor = |j: usize, u: f64| -> f64 {
        let nj = n.0[j];
        if e[j] == 0.5 {
            stft_density(nj, 0, u)
        } else {
            let rho = (e[j] - 0.5) / (e[j] + 0.5);
            rho.powi(nj as i32) * laguerre(nj, 0.0, -u / (e[j] - 0.5)) * (-u).exp()
        }
    };
    if mask.is_dirac() {
        let at0: f64 = (0..d).map(|j| factor(j, 0.0) / (e[j] + 0.5)).product();
        return Ok((mask.constant + at0, 0.0));
    }
    let scales: Vec<f64> = e.iter().map(|ej| (ej + 0.5) / PI).collect();
    let degree = n.0.iter().cloned().max().unwrap_or(0);
    let q = mask.integrate_profile_u(
        &scales,
        u_cutoff(degree),
        |u, o| o[0] = (0..d).map(|j| factor(j, u[j])).product(),
        1,
    )?;
    let (v, err) = check(&q)?;
    Ok((mask.constant + v, err))
}

/// Provenance of a table of eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Matrix,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed",
            Method::Matrix => "matrix",
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigenvalueTable {
    pub indices: Vec<MultiIndex>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    /// Window index or state descriptor.
    pub tag: String,
    pub mask: String,
    pub method: Method,
}

impl EigenvalueTable {
    pub fn dim(&self) -> usize {
        self.indices.first().map(|n| n.dim()).unwrap_or(0)
    }

    /// Columns `n_1..n_d, window, lambda, est_error, method`.
    pub fn write_csv<W: Write>(&self, mut w: W, comment: Option<&str>) -> Result<()> {
        if let Some(c) = comment {
            writeln!(w, "# {c}")?;
        }
        let d = self.dim();
        let cols: Vec<String> = (1..=d).map(|j| format!("n_{j}")).collect();
        writeln!(w, "{},window,lambda,est_error,method", cols.join(","))?;
        for ((n, v), e) in self.indices.iter().zip(&self.values).zip(&self.errors) {
            let idx: Vec<String> = n.iter().map(|x| x.to_string()).collect();
            writeln!(w, "{},{},{:.15e},{:.3e},{}", idx.join(","), self.tag, v, e, self.method.as_str())?;
        }
        Ok(())
    }
}

/// Closed-form table of `c_{n,k}(F)` over `ns` for the window `phi_k`.
pub fn weighted_table(ns: &[MultiIndex], k: &MultiIndex, mask: &MaskSpec, mask_label: &str) -> Result<EigenvalueTable> {
    let rows: Vec<(f64, f64)> = ns.par_iter().map(|n| eig_weighted_est(n, k, mask)).collect::<Result<_>>()?;
    Ok(EigenvalueTable {
        indices: ns.to_vec(),
        values: rows.iter().map(|r| r.0).collect(),
        errors: rows.iter().map(|r| r.1).collect(),
        tag: format!("hermite:{k}"),
        mask: mask_label.to_string(),
        method: Method::ClosedForm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_values() {
        let r = (1.0 / PI).sqrt();
        assert!((eig_disc(0, 0, r).unwrap() - (1.0 - (-1f64).exp())).abs() < 1e-13);
        assert!((eig_disc(1, 0, r).unwrap() - (1.0 - 2.0 * (-1f64).exp())).abs() < 1e-13);
        assert!((eig_disc(3, 5, 40.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((eig_disc(2, 1, 0.7).unwrap() - eig_disc(1, 2, 0.7).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn density_is_normalized() {
        for (n, k) in [(0, 0), (3, 1), (1, 4), (7, 7)] {
            let q = quad::integrate_to_infinity(|u, o| o[0] = stft_density(n, k, u), 0.0, 1, Tolerance::default());
            assert!((q.scalar() - 1.0).abs() < 1e-11, "n={n} k={k}");
        }
    }

    #[test]
    fn weighted_agrees_with_disc_and_reinhardt() {
        let mask = MaskSpec::disc(0.9).unwrap();
        let shadow = ShadowRegion::Ball { d: 1, radius: 0.9 };
        for (n, k) in [(0, 0), (2, 1), (1, 3)] {
            let (ni, ki) = (MultiIndex(vec![n]), MultiIndex(vec![k]));
            let a = eig_disc(n, k, 0.9).unwrap();
            assert!((eig_weighted(&ni, &ki, &mask).unwrap() - a).abs() < 1e-11);
            assert!((eig_reinhardt(&ni, &ki, &shadow).unwrap() - a).abs() < 1e-10);
        }
    }

    #[test]
    fn point_mass_mask() {
        let m = MaskSpec::new(1, 0.0, Profile::Dirac).unwrap();
        let th = StateSymbol::thermal(1, 1.0).unwrap();
        for n in 0..4 {
            let ni = MultiIndex(vec![n]);
            let want = 0.5f64.powi(n as i32 + 1);
            assert!((eig_gaussian(&ni, &m, &[1.0 / (4.0 * PI) + 1.0 / (2.0 * PI)]).unwrap() - want).abs() < 1e-14);
            let wp = eig_mixed(&ni, &m, &th, MixedForm::WignerPairing).unwrap();
            assert!((wp - want).abs() < 1e-9, "n={n} {wp}");
        }
    }

    #[test]
    fn gaussian_below_boundary_is_rejected() {
        let m = MaskSpec::disc(1.0).unwrap();
        assert!(eig_gaussian(&MultiIndex(vec![0]), &m, &[0.05]).is_err());
    }

    #[test]
    fn csv_layout() {
        let t = weighted_table(&[MultiIndex(vec![0]), MultiIndex(vec![1])], &MultiIndex(vec![0]), &MaskSpec::disc(1.0).unwrap(), "disc:R=1").unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf, Some("x")).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# x");
        assert_eq!(lines[1], "n_1,window,lambda,est_error,method");
        assert!(lines[2].starts_with("0,hermite:0,"));
    }
}
