//! Command-line front end. `main` only parses arguments and maps the
//! [`Outcome`] or error to an exit code.

use crate::config::{load_frame, load_matrix, parse_mask, parse_state, parse_window, JobConfig};
use crate::eigenvalues::{eig_mixed_table, weighted_table, MixedForm, StateSymbol};
use crate::error::{Error, Result};
use crate::hagedorn::HagedornFamily;
use crate::opmatrix::{
    assemble_localization, assemble_mixed, diagonalize, verify_double_orthogonality, AssemblyMask, OperatorMatrix, Window,
};
use crate::phasespace::{FramePhase, GridFunction};
use crate::specfun::MultiIndex;
use crate::symplectic::{gaussian_admissible, symplectic_residual, williamson, LagrangianFrame};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use std::io::Write;
use std::path::PathBuf;

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_TOLERANCE: u8 = 3;
pub const EXIT_VERIFY: u8 = 4;

/// Default agreement tolerance of `eigvals --method both`.
pub const DEFAULT_AGREEMENT_TOL: f64 = 1e-5;
/// Default off-diagonal tolerance of `verify`.
pub const DEFAULT_VERIFY_TOL: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(name = "locspec", version, about = "Eigenvalues of polyradial time-frequency localization operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Eigenvalue table (closed form, matrix assembly, or both).
    Eigvals(Flags),
    /// Double-orthogonality check of the basis for a mask.
    Verify(Flags),
    /// Wavepacket, |STFT| or Wigner samples for plotting.
    Sample(Flags),
    /// Williamson normal form of a matrix file.
    Williamson(Flags),
}

#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    /// TOML or JSON file with the same keys as the flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Mask descriptor, e.g. disc:R=1, ball:R=1, fubini-study, square:a=1, file:m.json
    #[arg(long)]
    pub mask: Option<String>,
    /// Window descriptor: hermite:k or hagedorn:k (with --frame)
    #[arg(long)]
    pub window: Option<String>,
    /// State descriptor: parity, thermal:E=1, gaussian:k=0.16, displaced:k=..,x=..,w=.., grid:file.bin
    #[arg(long)]
    pub state: Option<String>,
    /// Frame file (JSON q/p) or the built-in name zero-diagonal
    #[arg(long)]
    pub frame: Option<PathBuf>,
    /// Largest index per axis
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Phase-space dimension d
    #[arg(long)]
    pub d: Option<usize>,
    /// closed, matrix or both
    #[arg(long)]
    pub method: Option<String>,
    /// Phase grid as L,N (half-width, points per axis)
    #[arg(long)]
    pub grid: Option<String>,
    /// Output file (default: standard output)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Tolerance for agreement or verification checks
    #[arg(long)]
    pub tol: Option<f64>,
    /// Multi-index to sample, e.g. 2,1
    #[arg(long)]
    pub index: Option<String>,
    /// What to sample: wavepacket, stft or wigner
    #[arg(long)]
    pub kind: Option<String>,
    /// Matrix file (JSON rows) for williamson
    #[arg(long)]
    pub matrix: Option<PathBuf>,
}

impl Flags {
    fn job(&self) -> Result<JobConfig> {
        let flags = JobConfig {
            mask: self.mask.clone(),
            window: self.window.clone(),
            state: self.state.clone(),
            frame: self.frame.clone(),
            nmax: self.nmax,
            d: self.d,
            method: self.method.clone(),
            grid: self.grid.clone(),
            out: self.out.clone(),
            tol: self.tol,
            index: self.index.clone(),
            kind: self.kind.clone(),
            matrix: self.matrix.clone(),
        };
        let base = match &self.config {
            Some(p) => JobConfig::from_file(p)?,
            None => JobConfig::default(),
        };
        Ok(base.merged_with(&flags))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Ok,
    /// A numerical agreement check exceeded its tolerance.
    Tolerance(String),
    /// `verify` found a violated orthogonality relation.
    VerifyFailed(String),
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        match self {
            Outcome::Ok => 0,
            Outcome::Tolerance(_) => EXIT_TOLERANCE,
            Outcome::VerifyFailed(_) => EXIT_VERIFY,
        }
    }
}

/// Exit code for an error: quadrature failures are tolerance failures,
/// everything else is a configuration problem.
pub fn error_exit_code(e: &Error) -> u8 {
    match e {
        Error::Quadrature { .. } => EXIT_TOLERANCE,
        _ => EXIT_CONFIG,
    }
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<Outcome> {
    match &cli.command {
        Command::Eigvals(f) => cmd_eigvals(&f.job()?, stdout),
        Command::Verify(f) => cmd_verify(&f.job()?, stdout),
        Command::Sample(f) => cmd_sample(&f.job()?, stdout),
        Command::Williamson(f) => cmd_williamson(&f.job()?, stdout),
    }
}

fn header(job: &JobConfig) -> String {
    format!("locspec {} config={}", env!("CARGO_PKG_VERSION"), job.hash())
}

/// Runs `body` against the output file or `stdout`.
fn with_output(job: &JobConfig, stdout: &mut dyn Write, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match &job.out {
        Some(p) => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(p)?);
            body(&mut f)?;
            f.flush()?;
            Ok(())
        }
        None => body(stdout),
    }
}

fn frame_of(job: &JobConfig) -> Result<Option<LagrangianFrame>> {
    job.frame.as_deref().map(load_frame).transpose()
}

fn indices(d: usize, nmax: usize) -> Vec<MultiIndex> {
    MultiIndex::in_box(d, nmax)
}

enum Problem {
    Localization { mask: AssemblyMask, window: Window },
    Mixed { mask: crate::reinhardt::MaskSpec, state: StateSymbol },
}

fn problem(job: &JobConfig) -> Result<(Problem, String)> {
    let d = job.dim()?;
    let mask_desc = job.mask.clone().ok_or_else(|| Error::Config("--mask is required".into()))?;
    let mask = parse_mask(&mask_desc, d)?;
    if let AssemblyMask::Polyradial(m) = &mask {
        for w in &m.warnings {
            eprintln!("locspec: warning: {w}");
        }
    }
    match &job.state {
        Some(s) => {
            if job.window.is_some() {
                return Err(Error::Config("give either --window or --state, not both".into()));
            }
            let AssemblyMask::Polyradial(mask) = mask else {
                return Err(Error::Config("mixed-state operators need a polyradial mask".into()));
            };
            Ok((Problem::Mixed { mask, state: parse_state(s, d)? }, mask_desc))
        }
        None => {
            let frame = frame_of(job)?;
            let window = parse_window(job.window.as_deref().unwrap_or("hermite:0"), d, frame.as_ref())?;
            Ok((Problem::Localization { mask, window }, mask_desc))
        }
    }
}

fn matrix_of(p: &Problem, n_basis: usize) -> Result<OperatorMatrix> {
    match p {
        Problem::Localization { mask, window } => assemble_localization(mask, window, n_basis),
        Problem::Mixed { mask, state } => assemble_mixed(mask, state, n_basis),
    }
}

/// `eigvals`: closed-form and/or matrix eigenvalues for `n` in the box `nmax`.
pub fn cmd_eigvals(job: &JobConfig, stdout: &mut dyn Write) -> Result<Outcome> {
    let d = job.dim()?;
    let nmax = job.nmax();
    let method = job.method.as_deref().unwrap_or("closed");
    if !matches!(method, "closed" | "matrix" | "both") {
        return Err(Error::Config(format!("--method must be closed, matrix or both, got {method:?}")));
    }
    let (prob, mask_label) = problem(job)?;
    let ns = indices(d, nmax);

    let closed = if method != "matrix" {
        Some(match &prob {
            Problem::Localization { mask: AssemblyMask::Polyradial(m), window } => {
                let k = match window {
                    Window::Hermite(k) | Window::Hagedorn { k, .. } => k,
                };
                let mut t = weighted_table(&ns, k, m, &mask_label)?;
                t.tag = window.label();
                t
            }
            Problem::Localization { mask: AssemblyMask::Square { .. }, .. } => {
                return Err(Error::Config("the square mask has no closed-form eigenvalues; use --method matrix".into()));
            }
            Problem::Mixed { mask, state } => {
                let form = if matches!(state, StateSymbol::Grid(_)) { MixedForm::WignerPairing } else { MixedForm::MaskPairing };
                let rows = eig_mixed_table(&ns, mask, state, form)?;
                crate::eigenvalues::EigenvalueTable {
                    indices: ns.clone(),
                    values: rows.iter().map(|r| r.0).collect(),
                    errors: rows.iter().map(|r| r.1).collect(),
                    tag: job.state.clone().unwrap_or_default(),
                    mask: mask_label.clone(),
                    method: crate::eigenvalues::Method::ClosedForm,
                }
            }
        })
    } else {
        None
    };
    let matrix = if method != "closed" {
        let op = matrix_of(&prob, nmax + 1)?;
        if !op.diagnostics.converged {
            return Err(Error::Quadrature { achieved: op.diagnostics.quadrature_error });
        }
        let spec = diagonalize(&op);
        let mut t = spec.to_table(&op, &mask_label);
        if let Problem::Mixed { .. } = prob {
            t.tag = job.state.clone().unwrap_or_default();
        }
        Some(t)
    } else {
        None
    };

    let comment = header(job);
    let mut outcome = Outcome::Ok;
    match (closed, matrix) {
        (Some(t), None) | (None, Some(t)) => with_output(job, stdout, |w| t.write_csv(w, Some(&comment)))?,
        (Some(c), Some(m)) => {
            let tol = job.tol.unwrap_or(DEFAULT_AGREEMENT_TOL);
            // Spectra are compared as multisets: the k-th largest closed-form
            // value against the k-th largest matrix eigenvalue.
            let mut oc: Vec<usize> = (0..c.values.len()).collect();
            oc.sort_by(|&a, &b| c.values[b].total_cmp(&c.values[a]).then(a.cmp(&b)));
            let mut lam_m = vec![f64::NAN; c.values.len()];
            for (rank, &i) in oc.iter().enumerate() {
                lam_m[i] = m.values[rank];
            }
            let worst = c.values.iter().zip(&lam_m).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            with_output(job, stdout, |w| {
                writeln!(w, "# {comment}")?;
                let cols: Vec<String> = (1..=d).map(|j| format!("n_{j}")).collect();
                writeln!(w, "{},window,lambda,est_error,method,lambda_matrix,abs_diff", cols.join(","))?;
                for i in 0..c.values.len() {
                    let idx: Vec<String> = c.indices[i].iter().map(|x| x.to_string()).collect();
                    writeln!(
                        w,
                        "{},{},{:.15e},{:.3e},both,{:.15e},{:.3e}",
                        idx.join(","),
                        c.tag,
                        c.values[i],
                        c.errors[i],
                        lam_m[i],
                        (c.values[i] - lam_m[i]).abs()
                    )?;
                }
                Ok(())
            })?;
            if worst > tol {
                outcome = Outcome::Tolerance(format!("closed form and matrix differ by {worst:.3e} > {tol:.1e}"));
            }
        }
        (None, None) => unreachable!("method is validated"),
    }
    Ok(outcome)
}

/// `verify`: Gram matrices with respect to `dz` and `F dz` (localization), or
/// the assembled mixed-state matrix.
pub fn cmd_verify(job: &JobConfig, stdout: &mut dyn Write) -> Result<Outcome> {
    let tol = job.tol.unwrap_or(DEFAULT_VERIFY_TOL);
    let n_basis = job.nmax() + 1;
    let (prob, mask_label) = problem(job)?;
    let (passed, text, json) = match &prob {
        Problem::Localization { mask, window } => {
            let r = verify_double_orthogonality(window, mask, n_basis, tol)?;
            let (m, n) = r.worst_entry;
            let text = format!(
                "double orthogonality of {} with mask {mask_label}: {}\n  dz Gram max off-diagonal: {:.3e}\n  F dz Gram max off-diagonal: {:.3e} at ({}, {})\n  eigenvalue candidates: {}",
                window.label(),
                if r.passed { "PASS" } else { "FAIL" },
                r.plane_offdiag,
                r.mask_offdiag,
                r.basis[m],
                r.basis[n],
                r.mask_diagonal.iter().map(|v| format!("{v:.10}")).collect::<Vec<_>>().join(" ")
            );
            (r.passed, text, serde_json::to_value(&r)?)
        }
        Problem::Mixed { .. } => {
            let op = matrix_of(&prob, n_basis)?;
            let mut worst = (0.0f64, 0usize, 0usize);
            for m in 0..op.dim() {
                for n in 0..op.dim() {
                    if m != n && op.entries[(m, n)].norm() > worst.0 {
                        worst = (op.entries[(m, n)].norm(), m, n);
                    }
                }
            }
            let passed = worst.0 <= tol;
            let text = format!(
                "quantum double orthogonality with mask {mask_label}: {}\n  max off-diagonal: {:.3e} at ({}, {})",
                if passed { "PASS" } else { "FAIL" },
                worst.0,
                op.basis[worst.1],
                op.basis[worst.2]
            );
            let json = serde_json::json!({
                "passed": passed,
                "max_offdiag": worst.0,
                "worst_entry": [worst.1, worst.2],
                "diagonal": (0..op.dim()).map(|i| op.entries[(i, i)].re).collect::<Vec<_>>(),
                "tolerance": tol,
                "diagnostics": op.diagnostics,
            });
            (passed, text, json)
        }
    };
    writeln!(stdout, "# {}", header(job))?;
    writeln!(stdout, "{text}")?;
    match &job.out {
        Some(p) => std::fs::write(p, serde_json::to_string_pretty(&json)? + "\n")?,
        None => writeln!(stdout, "{}", serde_json::to_string_pretty(&json)?)?,
    }
    Ok(if passed { Outcome::Ok } else { Outcome::VerifyFailed(text) })
}

fn write_phase_csv(w: &mut dyn Write, g: &GridFunction, comment: &str) -> Result<()> {
    let d = g.grid.d;
    writeln!(w, "# {comment}")?;
    let mut cols: Vec<String> = (1..=d).map(|j| format!("x_{j}")).collect();
    cols.extend((1..=d).map(|j| format!("omega_{j}")));
    writeln!(w, "{},re,im,abs", cols.join(","))?;
    for (lin, v) in g.data.iter().enumerate() {
        let p: Vec<String> = g.grid.point(lin).iter().map(|c| format!("{c:.6}")).collect();
        writeln!(w, "{},{:.12e},{:.12e},{:.12e}", p.join(","), v.re, v.im, v.norm())?;
    }
    Ok(())
}

/// `sample`: wavepacket values on the time lattice, or the STFT / Wigner
/// distribution of a basis element on the phase grid.
pub fn cmd_sample(job: &JobConfig, stdout: &mut dyn Write) -> Result<Outcome> {
    let d = job.dim()?;
    let grid = job.phase_grid()?;
    let frame = frame_of(job)?.unwrap_or_else(|| LagrangianFrame::standard(d));
    if frame.dim() != d {
        return Err(Error::Config(format!("frame has dimension {}, expected {d}", frame.dim())));
    }
    let n: MultiIndex = job.index.as_deref().unwrap_or("0").parse().map_err(|e: Error| Error::Config(e.to_string()))?;
    if n.dim() != d {
        return Err(Error::Config(format!("--index needs {d} components")));
    }
    let comment = header(job);
    match job.kind.as_deref().unwrap_or("stft") {
        "wavepacket" => {
            let fam = HagedornFamily::new(frame).map_err(|e| Error::Config(e.to_string()))?;
            let lattice = grid.time_lattice();
            with_output(job, stdout, |w| {
                writeln!(w, "# {comment}")?;
                let cols: Vec<String> = (1..=d).map(|j| format!("t_{j}")).collect();
                writeln!(w, "{},re,im,abs", cols.join(","))?;
                for lin in 0..lattice.len() {
                    let t = lattice.point(lin);
                    let v = fam.eval(&n, &t)?;
                    let ts: Vec<String> = t.iter().map(|c| format!("{c:.6}")).collect();
                    writeln!(w, "{},{:.12e},{:.12e},{:.12e}", ts.join(","), v.re, v.im, v.norm())?;
                }
                Ok(())
            })?;
        }
        kind @ ("stft" | "wigner") => {
            let phase = FramePhase::new(&frame).map_err(|e| Error::Config(e.to_string()))?;
            let k = match job.window.as_deref() {
                Some(s) => match parse_window(s, d, Some(&frame))? {
                    Window::Hermite(k) | Window::Hagedorn { k, .. } => k,
                },
                None if kind == "wigner" => n.clone(),
                None => MultiIndex::zeros(d),
            };
            let g = if kind == "stft" {
                GridFunction::sample(grid, |z| phase.stft(&n, &k, z).unwrap_or(Complex64::new(f64::NAN, 0.0)))
            } else {
                GridFunction::sample(grid, |z| phase.wigner(&n, &k, z).unwrap_or(Complex64::new(f64::NAN, 0.0)))
            };
            with_output(job, stdout, |w| write_phase_csv(w, &g, &comment))?;
        }
        other => return Err(Error::Config(format!("--kind must be wavepacket, stft or wigner, got {other:?}"))),
    }
    Ok(Outcome::Ok)
}

/// `williamson`: `T`, `K`, admissibility and residuals as JSON.
pub fn cmd_williamson(job: &JobConfig, stdout: &mut dyn Write) -> Result<Outcome> {
    let path = job.matrix.as_ref().ok_or_else(|| Error::Config("williamson needs --matrix".into()))?;
    let m = load_matrix(path)?;
    let w = williamson(&m).map_err(|e| Error::Config(e.to_string()))?;
    let t = w.t.matrix();
    let rows = |a: &nalgebra::DMatrix<f64>| (0..a.nrows()).map(|r| (0..a.ncols()).map(|c| a[(r, c)]).collect::<Vec<_>>()).collect::<Vec<_>>();
    let report = serde_json::json!({
        "t": rows(t),
        "k": w.k,
        "admissible": gaussian_admissible(&m)?,
        "reconstruction_error": (w.reconstruct() - &m).norm() / m.norm(),
        "symplectic_residual": symplectic_residual(t),
    });
    with_output(job, stdout, |out| {
        writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
        Ok(())
    })?;
    Ok(Outcome::Ok)
}
