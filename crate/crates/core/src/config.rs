//! Job configuration and the descriptor mini-language of the command line:
//! masks (`disc:R=1`), windows (`hermite:2`), states (`thermal:E=1`) and
//! frame / mask / matrix files.

use crate::eigenvalues::StateSymbol;
use crate::error::{Error, Result};
use crate::opmatrix::{AssemblyMask, Window};
use crate::phasespace::{GridFunction, PhaseGrid};
use crate::reinhardt::{MaskSpec, Profile, ShadowRegion};
use crate::specfun::MultiIndex;
use crate::symplectic::LagrangianFrame;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

/// Every option of a job. Fields left `None` take the documented defaults;
/// command-line flags override values read from a config file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub mask: Option<String>,
    pub window: Option<String>,
    pub state: Option<String>,
    pub frame: Option<PathBuf>,
    pub nmax: Option<usize>,
    pub d: Option<usize>,
    pub method: Option<String>,
    pub grid: Option<String>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    /// Multi-index sampled by `sample`.
    pub index: Option<String>,
    /// What `sample` emits: `wavepacket`, `stft` or `wigner`.
    pub kind: Option<String>,
    /// Matrix file for `williamson`.
    pub matrix: Option<PathBuf>,
}

pub const DEFAULT_NMAX: usize = 8;

impl JobConfig {
    /// Reads TOML or JSON, chosen by the file extension.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display()))),
            Some("json") => Ok(serde_json::from_str(&text)?),
            _ => Err(Error::Config(format!("config file {} must end in .toml or .json", path.display()))),
        }
    }

    /// Fields set in `flags` replace those in `self`.
    pub fn merged_with(mut self, flags: &JobConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if flags.$f.is_some() { self.$f = flags.$f.clone(); } )* };
        }
        take!(mask, window, state, frame, nmax, d, method, grid, out, tol, index, kind, matrix);
        self
    }

    pub fn dim(&self) -> Result<usize> {
        match self.d.unwrap_or(1) {
            0 => Err(Error::Config("--d must be positive".into())),
            d => Ok(d),
        }
    }

    pub fn nmax(&self) -> usize {
        self.nmax.unwrap_or(DEFAULT_NMAX)
    }

    pub fn phase_grid(&self) -> Result<PhaseGrid> {
        let d = self.dim()?;
        match &self.grid {
            None => Ok(PhaseGrid::default_for(d)),
            Some(s) => {
                let (l, n) = s
                    .split_once(',')
                    .ok_or_else(|| Error::Config(format!("--grid expects L,N, got {s:?}")))?;
                let l: f64 = l.trim().parse().map_err(|_| Error::Config(format!("bad grid half-width {l:?}")))?;
                let n: usize = n.trim().parse().map_err(|_| Error::Config(format!("bad grid size {n:?}")))?;
                PhaseGrid::new(d, l, n)
            }
        }
    }

    /// Short stable hash of the effective configuration.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// `kind:key=v,key=v`; a comma-separated token without `=` continues the
/// previous value, so `polydisc:R=1,2` gives `R = "1,2"`.
fn split_descriptor(desc: &str) -> Result<(String, BTreeMap<String, String>)> {
    let (kind, rest) = match desc.split_once(':') {
        Some((k, r)) => (k.trim().to_ascii_lowercase(), r),
        None => (desc.trim().to_ascii_lowercase(), ""),
    };
    let mut params = BTreeMap::new();
    let mut last: Option<String> = None;
    for tok in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match tok.split_once('=') {
            Some((k, v)) => {
                let k = k.trim().to_string();
                params.insert(k.clone(), v.trim().to_string());
                last = Some(k);
            }
            None => match &last {
                Some(k) => {
                    let v = params.get_mut(k).expect("key was inserted");
                    v.push(',');
                    v.push_str(tok);
                }
                None => {
                    params.insert(String::new(), tok.to_string());
                    last = Some(String::new());
                }
            },
        }
    }
    Ok((kind, params))
}

fn num(params: &BTreeMap<String, String>, key: &str, what: &str) -> Result<f64> {
    let v = params.get(key).ok_or_else(|| Error::Config(format!("{what} needs {key}=...")))?;
    v.parse().map_err(|_| Error::Config(format!("{what}: {key}={v} is not a number")))
}

fn num_or(params: &BTreeMap<String, String>, key: &str, default: f64, what: &str) -> Result<f64> {
    if params.contains_key(key) {
        num(params, key, what)
    } else {
        Ok(default)
    }
}

fn list(params: &BTreeMap<String, String>, key: &str, what: &str) -> Result<Vec<f64>> {
    let v = params.get(key).ok_or_else(|| Error::Config(format!("{what} needs {key}=...")))?;
    v.split(',')
        .map(|x| x.trim().parse().map_err(|_| Error::Config(format!("{what}: bad number {x:?} in {key}"))))
        .collect()
}

/// Parses a mask descriptor for dimension `d`.
///
/// Kinds: `disc:R`, `ball:R`, `polydisc:R=a,b`, `pball:p,R`,
/// `weighted:alpha=a,b,R`, `annulus:R1,R2`, `complement:R`,
/// `fubini-study`, `gaussian:w`, `full:c`, `dirac`, `square:a`,
/// `file:path.json`. Any polyradial kind accepts an extra constant `c`.
pub fn parse_mask(desc: &str, d: usize) -> Result<AssemblyMask> {
    let (kind, p) = split_descriptor(desc)?;
    let c = num_or(&p, "c", if kind == "full" { 1.0 } else { 0.0 }, &kind)?;
    let mask = match kind.as_str() {
        "disc" => {
            if d != 1 {
                return Err(Error::Config("disc masks are one-dimensional; use ball for d > 1".into()));
            }
            MaskSpec::disc(num(&p, "R", "disc")?)?
        }
        "ball" => MaskSpec::indicator(ShadowRegion::Ball { d, radius: num(&p, "R", "ball")? })?,
        "polydisc" => MaskSpec::indicator(ShadowRegion::Polydisc { radii: list(&p, "R", "polydisc")? })?,
        "pball" => MaskSpec::indicator(ShadowRegion::PBall { d, p: num(&p, "p", "pball")?, radius: num(&p, "R", "pball")? })?,
        "weighted" => {
            let r = num(&p, "R", "weighted")?;
            MaskSpec::indicator(ShadowRegion::WeightedQuadratic { weights: list(&p, "alpha", "weighted")?, bound: r * r })?
        }
        "annulus" => MaskSpec::indicator(ShadowRegion::Table {
            intervals: vec![(num(&p, "R1", "annulus")?, num(&p, "R2", "annulus")?)],
        })?,
        "complement" => MaskSpec::indicator(ShadowRegion::Complement {
            inner: Box::new(ShadowRegion::Ball { d, radius: num(&p, "R", "complement")? }),
        })?,
        "fubini-study" => MaskSpec::new(d, 0.0, Profile::FubiniStudy)?,
        "gaussian" => MaskSpec::new(d, 0.0, Profile::Gaussian { width: num_or(&p, "w", 1.0, "gaussian")? })?,
        "full" => MaskSpec::full_plane(d, 0.0)?,
        "dirac" => MaskSpec::new(d, 0.0, Profile::Dirac)?,
        "square" => {
            if d != 1 {
                return Err(Error::Config("the square mask is one-dimensional".into()));
            }
            return Ok(AssemblyMask::Square { half_side: num(&p, "a", "square")? });
        }
        "file" => {
            let path = p.get("").ok_or_else(|| Error::Config("file mask needs a path, file:mask.json".into()))?;
            return Ok(AssemblyMask::Polyradial(mask_from_json(&std::fs::read_to_string(path)?, d)?.with_constant(c)));
        }
        other => return Err(Error::Config(format!("unknown mask kind {other:?}"))),
    };
    if mask.d != d {
        return Err(Error::Config(format!("mask {desc:?} has dimension {}, expected {d}", mask.d)));
    }
    Ok(AssemblyMask::Polyradial(mask.with_constant(c)))
}

#[derive(Deserialize)]
struct MaskFile {
    kind: String,
    #[serde(default)]
    constant: f64,
    #[serde(default)]
    profile_table: Option<Vec<(f64, f64)>>,
    #[serde(flatten)]
    params: BTreeMap<String, serde_json::Value>,
}

/// Mask file: `{"kind": ..., parameters..., "constant": c, "profile_table": [[r, F0], ...]}`.
/// `kind = "table"` takes its profile from `profile_table`; other kinds take
/// the same parameters as the descriptors.
pub fn mask_from_json(text: &str, d: usize) -> Result<MaskSpec> {
    let f: MaskFile = serde_json::from_str(text)?;
    if f.kind == "table" {
        let table = f.profile_table.ok_or_else(|| Error::Config("table masks need profile_table".into()))?;
        return MaskSpec::new(d, f.constant, Profile::RadialTable { table });
    }
    let params: Vec<String> = f
        .params
        .iter()
        .map(|(k, v)| match v {
            serde_json::Value::Array(items) => {
                format!("{k}={}", items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            }
            other => format!("{k}={other}"),
        })
        .collect();
    let desc = format!("{}:{}", f.kind, params.join(","));
    match parse_mask(&desc, d)? {
        AssemblyMask::Polyradial(m) => Ok(m.with_constant(f.constant)),
        AssemblyMask::Square { .. } => Err(Error::Config("mask files describe polyradial masks".into())),
    }
}

fn parse_index(s: &str, d: usize) -> Result<MultiIndex> {
    let k: MultiIndex = s.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
    match k.dim() {
        1 if d > 1 => Ok(MultiIndex(vec![k.0[0]; d])),
        n if n == d => Ok(k),
        n => Err(Error::Config(format!("index {s:?} has {n} components, expected {d}"))),
    }
}

/// `hermite:k` or `hagedorn:k` (the latter needs a frame).
pub fn parse_window(desc: &str, d: usize, frame: Option<&LagrangianFrame>) -> Result<Window> {
    let (kind, p) = split_descriptor(desc)?;
    let k = parse_index(p.get("").map(String::as_str).unwrap_or("0"), d)?;
    match kind.as_str() {
        "hermite" => Ok(Window::Hermite(k)),
        "hagedorn" => {
            let frame = frame.ok_or_else(|| Error::Config("hagedorn windows need --frame".into()))?;
            if frame.dim() != d {
                return Err(Error::Config(format!("frame has dimension {}, expected {d}", frame.dim())));
            }
            Ok(Window::Hagedorn { frame: frame.clone(), k })
        }
        other => Err(Error::Config(format!("unknown window kind {other:?}"))),
    }
}

/// `parity`, `thermal:E`, `gaussian:k=a[,b]`, `displaced:k,x,w`, `grid:file.bin`.
pub fn parse_state(desc: &str, d: usize) -> Result<StateSymbol> {
    let (kind, p) = split_descriptor(desc)?;
    match kind.as_str() {
        "parity" => Ok(StateSymbol::Parity),
        "thermal" => StateSymbol::thermal(d, num(&p, "E", "thermal")?).map_err(|e| Error::Config(e.to_string())),
        "gaussian" => {
            let mut k = list(&p, "k", "gaussian")?;
            if k.len() == 1 {
                k = vec![k[0]; d];
            }
            if k.len() != d || k.iter().any(|v| !(*v > 0.0)) {
                return Err(Error::Config(format!("gaussian state needs {d} positive k values")));
            }
            Ok(StateSymbol::Gaussian { k })
        }
        "displaced" => Ok(StateSymbol::Displaced {
            k: num_or(&p, "k", 1.0 / (2.0 * PI), "displaced")?,
            centre: [num_or(&p, "x", 0.0, "displaced")?, num_or(&p, "w", 0.0, "displaced")?],
        }),
        "grid" => {
            let path = p.get("").ok_or_else(|| Error::Config("grid state needs a path, grid:symbol.bin".into()))?;
            let g = GridFunction::read_binary(std::fs::File::open(path)?)?;
            Ok(StateSymbol::Grid(g))
        }
        other => Err(Error::Config(format!("unknown state kind {other:?}"))),
    }
}

#[derive(Deserialize)]
struct FrameFile {
    /// Rows of `[re, im]` pairs.
    q: Vec<Vec<[f64; 2]>>,
    p: Vec<Vec<[f64; 2]>>,
}

fn complex_matrix(rows: &[Vec<[f64; 2]>], what: &str) -> Result<DMatrix<Complex64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Config(format!("{what} must be a non-empty square matrix")));
    }
    Ok(DMatrix::from_fn(n, n, |r, c| Complex64::new(rows[r][c][0], rows[r][c][1])))
}

/// Frame file `{"q": [[[re, im], ...], ...], "p": ...}`, or the built-in
/// name `zero-diagonal`.
pub fn load_frame(path: &Path) -> Result<LagrangianFrame> {
    if path.as_os_str() == "zero-diagonal" {
        return Ok(LagrangianFrame::zero_diagonal_example());
    }
    let f: FrameFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    LagrangianFrame::new(complex_matrix(&f.q, "q")?, complex_matrix(&f.p, "p")?)
        .map_err(|e| Error::Config(e.to_string()))
}

/// Real matrix file: a JSON array of rows.
pub fn load_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(Error::Config("matrix file must hold equal-length rows".into()));
    }
    Ok(DMatrix::from_fn(n, rows[0].len(), |r, c| rows[r][c]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_splitting() {
        let (k, p) = split_descriptor("polydisc:R=1,2.5,c=0.5").unwrap();
        assert_eq!(k, "polydisc");
        assert_eq!(p["R"], "1,2.5");
        assert_eq!(p["c"], "0.5");
        let (k, p) = split_descriptor("hermite:2,1").unwrap();
        assert_eq!(k, "hermite");
        assert_eq!(p[""], "2,1");
    }

    #[test]
    fn masks_parse() {
        assert!(matches!(parse_mask("disc:R=0.5642", 1).unwrap(), AssemblyMask::Polyradial(_)));
        assert!(matches!(parse_mask("square:a=1", 1).unwrap(), AssemblyMask::Square { .. }));
        let AssemblyMask::Polyradial(m) = parse_mask("complement:R=2", 1).unwrap() else { panic!() };
        assert_eq!(m.constant, 1.0);
        let AssemblyMask::Polyradial(m) = parse_mask("full:c=3", 2).unwrap() else { panic!() };
        assert_eq!(m.constant, 3.0);
        assert!(parse_mask("disc:R=1", 2).is_err());
        assert!(parse_mask("blob:R=1", 1).is_err());
        assert!(parse_mask("ball", 1).is_err());
    }

    #[test]
    fn mask_json() {
        let m = mask_from_json(r#"{"kind": "table", "profile_table": [[0, 1], [2, 0]], "constant": 0.5}"#, 1).unwrap();
        assert_eq!(m.constant, 0.5);
        let m = mask_from_json(r#"{"kind": "polydisc", "R": [1, 2]}"#, 2).unwrap();
        assert!(matches!(m.profile, Profile::Indicator { .. }));
    }

    #[test]
    fn windows_and_states() {
        assert!(matches!(parse_window("hermite:2", 1, None).unwrap(), Window::Hermite(k) if k.0 == vec![2]));
        assert!(parse_window("hagedorn:0,0", 2, None).is_err());
        assert!(matches!(parse_state("thermal:E=1", 1).unwrap(), StateSymbol::Gaussian { .. }));
        assert!(parse_state("thermal:E=-1", 1).is_err());
    }

    #[test]
    fn flags_override_file_values() {
        let file = JobConfig { mask: Some("disc:R=1".into()), nmax: Some(4), ..Default::default() };
        let flags = JobConfig { nmax: Some(6), ..Default::default() };
        let m = file.merged_with(&flags);
        assert_eq!(m.nmax, Some(6));
        assert_eq!(m.mask.as_deref(), Some("disc:R=1"));
        assert_eq!(m.hash(), m.clone().hash());
    }
}
