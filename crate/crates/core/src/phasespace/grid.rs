use crate::error::{Error, Result};
use num_complex::Complex64;
use std::io::{Read, Write};

/// Uniform lattice on `[-L, L)^{2d}` with `n` points per axis, axes ordered
/// `(x_1..x_d, w_1..w_d)`. The time axes of sampled signals use the same
/// `L` and `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseGrid {
    pub d: usize,
    pub half_width: f64,
    pub n: usize,
}

impl PhaseGrid {
    pub fn new(d: usize, half_width: f64, n: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Config("grid dimension must be positive".into()));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Config(format!("grid half-width must be positive, got {half_width}")));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::Config(format!("points per axis must be a power of two >= 16, got {n}")));
        }
        Ok(PhaseGrid { d, half_width, n })
    }

    /// `L = 6, N = 256` for `d = 1`; `L = 5, N = 64` otherwise.
    pub fn default_for(d: usize) -> Self {
        if d == 1 {
            PhaseGrid { d, half_width: 6.0, n: 256 }
        } else {
            PhaseGrid { d, half_width: 5.0, n: 64 }
        }
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.step()
    }

    /// Number of phase-space axes, `2d`.
    pub fn axes(&self) -> usize {
        2 * self.d
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.axes() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume element `h^{2d}`.
    pub fn cell(&self) -> f64 {
        self.step().powi(self.axes() as i32)
    }

    /// Per-axis indices of the flat index `lin` (row-major, last axis fastest).
    pub fn unravel(&self, mut lin: usize, idx: &mut [usize]) {
        for a in (0..idx.len()).rev() {
            idx[a] = lin % self.n;
            lin /= self.n;
        }
    }

    pub fn point(&self, lin: usize) -> Vec<f64> {
        let mut idx = vec![0; self.axes()];
        self.unravel(lin, &mut idx);
        idx.iter().map(|&i| self.coord(i)).collect()
    }

    pub fn time_lattice(&self) -> TimeLattice {
        TimeLattice { d: self.d, half_width: self.half_width, n: self.n }
    }
}

/// Uniform lattice on `[-L, L)^d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeLattice {
    pub d: usize,
    pub half_width: f64,
    pub n: usize,
}

impl TimeLattice {
    pub fn new(d: usize, half_width: f64, n: usize) -> Result<Self> {
        let g = PhaseGrid::new(d, half_width, n)?;
        Ok(g.time_lattice())
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.step()
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, mut lin: usize) -> Vec<f64> {
        let mut t = vec![0.0; self.d];
        for a in (0..self.d).rev() {
            t[a] = self.coord(lin % self.n);
            lin /= self.n;
        }
        t
    }
}

/// A function of time sampled on a [`TimeLattice`].
#[derive(Clone, Debug)]
pub struct Signal {
    pub lattice: TimeLattice,
    pub data: Vec<Complex64>,
}

impl Signal {
    pub fn sample<F: Fn(&[f64]) -> Complex64>(lattice: TimeLattice, f: F) -> Self {
        let data = (0..lattice.len()).map(|i| f(&lattice.point(i))).collect();
        Signal { lattice, data }
    }

    pub fn from_samples(lattice: TimeLattice, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != lattice.len() {
            return Err(Error::Dimension { expected: lattice.len(), got: data.len() });
        }
        Ok(Signal { lattice, data })
    }

    /// Riemann sum of `f conj(g)`.
    pub fn inner(&self, other: &Signal) -> Complex64 {
        let cell = self.lattice.step().powi(self.lattice.d as i32);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b.conj()).sum::<Complex64>() * cell
    }

    /// Sample at a lattice multi-index given as signed integers; zero outside.
    pub(crate) fn at(&self, idx: &[isize]) -> Complex64 {
        let n = self.lattice.n as isize;
        let mut lin = 0usize;
        for &i in idx {
            if i < 0 || i >= n {
                return Complex64::new(0.0, 0.0);
            }
            lin = lin * self.lattice.n + i as usize;
        }
        self.data[lin]
    }
}

/// Complex samples on a [`PhaseGrid`].
#[derive(Clone, Debug)]
pub struct GridFunction {
    pub grid: PhaseGrid,
    pub data: Vec<Complex64>,
}

const MAGIC: &[u8; 8] = b"LOCSPEC1";

impl GridFunction {
    pub fn zeros(grid: PhaseGrid) -> Self {
        GridFunction { grid, data: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// Samples `f`, which receives the point in complex coordinates `z_j = x_j + i w_j`.
    pub fn sample<F: Fn(&[Complex64]) -> Complex64 + Sync>(grid: PhaseGrid, f: F) -> Self {
        use rayon::prelude::*;
        let d = grid.d;
        let data = (0..grid.len())
            .into_par_iter()
            .map(|lin| {
                let p = grid.point(lin);
                let z: Vec<Complex64> = (0..d).map(|j| Complex64::new(p[j], p[d + j])).collect();
                f(&z)
            })
            .collect();
        GridFunction { grid, data }
    }

    pub fn integral(&self) -> Complex64 {
        self.data.iter().sum::<Complex64>() * self.grid.cell()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Value at per-axis indices.
    pub fn get(&self, idx: &[usize]) -> Complex64 {
        let mut lin = 0;
        for &i in idx {
            lin = lin * self.grid.n + i;
        }
        self.data[lin]
    }

    /// Real-part interpolation at an arbitrary point with separable
    /// six-point Lagrange stencils. Returns `None` when the stencil leaves the grid.
    pub fn interpolate_re(&self, p: &[f64]) -> Option<f64> {
        const W: usize = 6;
        let g = &self.grid;
        let h = g.step();
        let axes = g.axes();
        let mut base = vec![0usize; axes];
        let mut weights = vec![[0.0f64; W]; axes];
        for a in 0..axes {
            let s = (p[a] + g.half_width) / h;
            let i0 = s.floor() as isize - 2;
            if i0 < 0 || i0 + W as isize > g.n as isize {
                return None;
            }
            base[a] = i0 as usize;
            let u = s - i0 as f64;
            for (m, w) in weights[a].iter_mut().enumerate() {
                let mut prod = 1.0;
                for q in 0..W {
                    if q != m {
                        prod *= (u - q as f64) / (m as f64 - q as f64);
                    }
                }
                *w = prod;
            }
        }
        let mut acc = 0.0;
        let mut offs = vec![0usize; axes];
        let total = W.pow(axes as u32);
        let mut idx = vec![0usize; axes];
        for c in 0..total {
            let mut r = c;
            let mut w = 1.0;
            for a in (0..axes).rev() {
                offs[a] = r % W;
                r /= W;
                w *= weights[a][offs[a]];
                idx[a] = base[a] + offs[a];
            }
            acc += w * self.get(&idx).re;
        }
        Some(acc)
    }

    /// CSV with columns `x_1..x_d, w_1..w_d, re, im` (`x, omega, re, im` when `d = 1`).
    pub fn write_csv<W: Write>(&self, mut w: W, comment: Option<&str>) -> Result<()> {
        if let Some(c) = comment {
            writeln!(w, "# {c}")?;
        }
        let d = self.grid.d;
        let header: Vec<String> = if d == 1 {
            vec!["x".into(), "omega".into()]
        } else {
            (1..=d).map(|j| format!("x_{j}")).chain((1..=d).map(|j| format!("omega_{j}"))).collect()
        };
        writeln!(w, "{},re,im", header.join(","))?;
        for (lin, v) in self.data.iter().enumerate() {
            let p = self.grid.point(lin);
            let coords: Vec<String> = p.iter().map(|c| format!("{c:.12e}")).collect();
            writeln!(w, "{},{:.16e},{:.16e}", coords.join(","), v.re, v.im)?;
        }
        Ok(())
    }

    /// Binary dump: magic `LOCSPEC1`, then `d: u32`, `n: u32`, `L: f64`,
    /// `h: f64` (32 bytes total, little endian), then row-major `(re, im)` pairs.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.grid.d as u32).to_le_bytes())?;
        w.write_all(&(self.grid.n as u32).to_le_bytes())?;
        w.write_all(&self.grid.half_width.to_le_bytes())?;
        w.write_all(&self.grid.step().to_le_bytes())?;
        for v in &self.data {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; 32];
        r.read_exact(&mut header)?;
        if &header[..8] != MAGIC {
            return Err(Error::Config("not a LOCSPEC1 grid file".into()));
        }
        let d = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        let n = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
        let half_width = f64::from_le_bytes(header[16..24].try_into().unwrap());
        let grid = PhaseGrid::new(d, half_width, n)?;
        let mut data = Vec::with_capacity(grid.len());
        let mut buf = [0u8; 16];
        for _ in 0..grid.len() {
            r.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf[..8].try_into().unwrap());
            let im = f64::from_le_bytes(buf[8..].try_into().unwrap());
            data.push(Complex64::new(re, im));
        }
        Ok(GridFunction { grid, data })
    }
}
