//! Matrix assembly against the closed-form eigenvalues.

use locspec::eigenvalues::*;
use locspec::opmatrix::*;
use locspec::reinhardt::{MaskSpec, Profile, ShadowRegion};
use locspec::specfun::MultiIndex;
use locspec::symplectic::LagrangianFrame;
use std::f64::consts::PI;

fn idx(v: &[usize]) -> MultiIndex {
    MultiIndex(v.to_vec())
}

fn offdiag(a: &nalgebra::DMatrix<num_complex::Complex64>) -> f64 {
    let mut w: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            if i != j {
                w = w.max(a[(i, j)].norm());
            }
        }
    }
    w
}

#[test]
fn disc_matrix_is_diagonal_with_closed_form_entries() {
    let r = 0.85;
    let mask = MaskSpec::disc(r).unwrap();
    for k in 0..3 {
        let op = assemble_localization(&mask.clone().into(), &Window::Hermite(idx(&[k])), 12).unwrap();
        assert!(op.diagnostics.converged);
        assert!(op.diagnostics.hermitian_residual < 1e-12);
        assert!(offdiag(&op.entries) < 1e-10);
        assert!(op.diagnostics.leakage.unwrap() < 1e-10);
        for n in 0..12 {
            let want = eig_disc(n, k, r).unwrap();
            assert!((op.entries[(n, n)].re - want).abs() < 1e-9, "k={k} n={n}");
        }
    }
}

#[test]
fn smooth_and_shifted_masks() {
    let fs = MaskSpec::new(1, 0.5, Profile::FubiniStudy).unwrap();
    let op = assemble_localization(&fs.clone().into(), &Window::Hermite(idx(&[1])), 8).unwrap();
    for n in 0..8 {
        let want = eig_weighted(&idx(&[n]), &idx(&[1]), &fs).unwrap();
        assert!((op.entries[(n, n)].re - want).abs() < 1e-8, "n={n}");
    }
    assert!(offdiag(&op.entries) < 1e-10);
}

#[test]
fn square_couples_every_fourth_index() {
    let op = assemble_localization(&AssemblyMask::Square { half_side: 1.0 }, &Window::Hermite(idx(&[0])), 9).unwrap();
    let a = &op.entries;
    assert!(a[(0, 4)].norm() > 1e-4, "{}", a[(0, 4)]);
    for m in [1, 2, 3, 5, 6, 7] {
        assert!(a[(0, m)].norm() < 1e-7, "m={m}: {}", a[(0, m)]);
    }
    let spec = diagonalize(&op);
    let top = spec.vectors.column(0);
    let big = top.iter().filter(|c| c.norm() > 1e-3).count();
    assert!(big >= 2);
}

#[test]
fn parity_state_matrix() {
    let mask = MaskSpec::disc(1.0).unwrap();
    let op = assemble_mixed(&mask, &StateSymbol::Parity, 10).unwrap();
    assert!(offdiag(&op.entries) < 1e-10);
    for n in 0..10 {
        let want = eig_mixed(&idx(&[n]), &mask, &StateSymbol::Parity, MixedForm::WignerPairing).unwrap();
        assert!((op.entries[(n, n)].re - want).abs() < 1e-9, "n={n}");
    }
}

#[test]
fn thermal_state_matrix() {
    let t0 = std::time::Instant::now();
    let e = 1.0;
    let sym = StateSymbol::thermal(1, e).unwrap();
    let dirac = MaskSpec::new(1, 0.0, Profile::Dirac).unwrap();
    let op = assemble_mixed(&dirac, &sym, 12).unwrap();
    for n in 0..12 {
        let want = 0.5f64.powi(n as i32 + 1);
        assert!((op.entries[(n, n)].re - want).abs() < 1e-9, "n={n}: {}", op.entries[(n, n)].re);
    }
    eprintln!("dirac {:?}", t0.elapsed());
    let disc = MaskSpec::disc(1.0).unwrap();
    let op = assemble_mixed(&disc, &sym, 10).unwrap();
    eprintln!("disc {:?}", t0.elapsed());
    assert!(offdiag(&op.entries) < 1e-7, "{}", offdiag(&op.entries));
    let k = [1.0 / (4.0 * PI) + e / (2.0 * PI)];
    for n in 0..8 {
        let want = eig_gaussian(&idx(&[n]), &disc, &k).unwrap();
        assert!((op.entries[(n, n)].re - want).abs() < 1e-7, "n={n}: {} vs {want}", op.entries[(n, n)].re);
    }
}

#[test]
fn displaced_state_is_not_diagonal() {
    let sym = StateSymbol::Displaced { k: 1.0 / (2.0 * PI), centre: [0.7, -0.2] };
    let disc = MaskSpec::disc(1.0).unwrap();
    let op = assemble_mixed(&disc, &sym, 6).unwrap();
    assert!(offdiag(&op.entries) > 1e-4);
    assert!(matches!(
        eig_mixed(&idx(&[0]), &disc, &sym, MixedForm::MaskPairing),
        Err(locspec::Error::NotPolyradial { .. })
    ));
}

#[test]
fn ball_in_two_dimensions() {
    let t0 = std::time::Instant::now();
    let shadow = ShadowRegion::Ball { d: 2, radius: 1.0 };
    let mask = MaskSpec::indicator(shadow.clone()).unwrap();
    let op = assemble_localization(&mask.into(), &Window::Hermite(idx(&[0, 0])), 4).unwrap();
    eprintln!("ball d=2 N=4: {:?}", t0.elapsed());
    assert!(offdiag(&op.entries) < 1e-9);
    for (i, n) in op.basis.iter().enumerate() {
        let want = eig_reinhardt(n, &idx(&[0, 0]), &shadow).unwrap();
        assert!((op.entries[(i, i)].re - want).abs() < 1e-8, "n={n}");
    }
}

#[test]
fn transported_problem_has_the_same_spectrum() {
    let t0 = std::time::Instant::now();
    let frame = LagrangianFrame::zero_diagonal_example();
    let mask = MaskSpec::indicator(ShadowRegion::Ball { d: 2, radius: 1.0 }).unwrap();
    let op = assemble_localization(&mask.clone().into(), &Window::Hagedorn { frame, k: idx(&[0, 0]) }, 3).unwrap();
    eprintln!("hagedorn d=2 N=3: {:?}", t0.elapsed());
    let herm = assemble_localization(&mask.into(), &Window::Hermite(idx(&[0, 0])), 3).unwrap();
    let a = diagonalize(&op).values;
    let b = diagonalize(&herm).values;
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-8);
    }
}
