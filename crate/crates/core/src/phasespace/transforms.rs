use super::grid::{GridFunction, PhaseGrid, Signal};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Evaluates `X_b = sum_m y_m exp(-2 pi i w_b t_m)` for equispaced `t_m`, `w_b`
/// through Bluestein's convolution, so the frequency step is independent of
/// the time step.
struct ChirpDft {
    n: usize,
    size: usize,
    pre: Vec<Complex64>,
    post: Vec<Complex64>,
    kernel_hat: Vec<Complex64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl ChirpDft {
    fn new(n: usize, t0: f64, dt: f64, w0: f64, dw: f64) -> Self {
        let size = (2 * n).next_power_of_two();
        let alpha = dt * dw;
        let cis = |phase: f64| Complex64::from_polar(1.0, phase);
        let pre = (0..n)
            .map(|m| {
                let mf = m as f64;
                cis(-2.0 * PI * w0 * mf * dt - PI * alpha * mf * mf)
            })
            .collect();
        let post = (0..n)
            .map(|b| {
                let bf = b as f64;
                cis(-2.0 * PI * w0 * t0 - 2.0 * PI * bf * dw * t0 - PI * alpha * bf * bf)
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(size);
        let inv = planner.plan_fft_inverse(size);
        let mut kernel = vec![Complex64::new(0.0, 0.0); size];
        for k in 0..n {
            let v = cis(PI * alpha * (k * k) as f64);
            kernel[k] = v;
            if k > 0 {
                kernel[size - k] = v;
            }
        }
        fwd.process(&mut kernel);
        ChirpDft { n, size, pre, post, kernel_hat: kernel, fwd, inv }
    }

    /// Transforms `data` in place; `buf` must hold `size` entries.
    fn apply(&self, data: &mut [Complex64], buf: &mut [Complex64]) {
        for v in buf.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        for m in 0..self.n {
            buf[m] = data[m] * self.pre[m];
        }
        self.fwd.process(buf);
        for (v, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *v *= k;
        }
        self.inv.process(buf);
        let scale = 1.0 / self.size as f64;
        for b in 0..self.n {
            data[b] = buf[b] * self.post[b] * scale;
        }
    }

    /// Applies the transform along every axis of a `d`-dimensional block.
    fn apply_nd(&self, block: &mut [Complex64], d: usize, buf: &mut [Complex64], line: &mut [Complex64]) {
        let n = self.n;
        for axis in 0..d {
            let stride = n.pow((d - 1 - axis) as u32);
            let outer = block.len() / (n * stride);
            for o in 0..outer {
                for s in 0..stride {
                    let base = o * n * stride + s;
                    for m in 0..n {
                        line[m] = block[base + m * stride];
                    }
                    self.apply(line, buf);
                    for m in 0..n {
                        block[base + m * stride] = line[m];
                    }
                }
            }
        }
    }
}

/// Shared core of the STFT and the Wigner distribution:
/// `sum_t f(t) conj(w(t - s x)) exp(-2 pi i (s_w w) t)` over the lattice, where
/// `s = shift_mult`, `w = reflect ? g(-.) : g`, and `w` runs over the grid.
fn shifted_spectra(f: &Signal, g: &Signal, grid: &PhaseGrid, shift_mult: isize, reflect: bool, freq_scale: f64) -> Vec<Complex64> {
    let d = grid.d;
    let n = grid.n;
    let h = grid.step();
    let chirp = ChirpDft::new(n, -grid.half_width, h, -grid.half_width * freq_scale, h * freq_scale);
    let block = n.pow(d as u32);
    let half = (n / 2) as isize;
    let mut out = vec![Complex64::new(0.0, 0.0); block * block];
    out.par_chunks_mut(block).enumerate().for_each_init(
        || (vec![Complex64::new(0.0, 0.0); chirp.size], vec![Complex64::new(0.0, 0.0); n]),
        |(buf, line), (a_lin, chunk)| {
            let mut a = vec![0isize; d];
            let mut r = a_lin;
            for j in (0..d).rev() {
                a[j] = (r % n) as isize;
                r /= n;
            }
            let mut m = vec![0isize; d];
            let mut widx = vec![0isize; d];
            for (m_lin, slot) in chunk.iter_mut().enumerate() {
                let mut r = m_lin;
                for j in (0..d).rev() {
                    m[j] = (r % n) as isize;
                    r /= n;
                }
                for j in 0..d {
                    let i = m[j] - shift_mult * (a[j] - half);
                    widx[j] = if reflect { n as isize - i } else { i };
                }
                *slot = f.data[m_lin] * g.at(&widx).conj();
            }
            chirp.apply_nd(chunk, d, buf, line);
        },
    );
    let cell = h.powi(d as i32);
    out.iter_mut().for_each(|v| *v *= cell);
    out
}

fn check_pair(f: &Signal, g: &Signal, grid: &PhaseGrid) -> Result<()> {
    let lat = grid.time_lattice();
    for s in [f, g] {
        if s.lattice != lat {
            return Err(Error::Config("signal lattice does not match the phase grid".into()));
        }
    }
    Ok(())
}

/// `V_g f(x, w) = int f(t) conj(g(t - x)) exp(-2 pi i w t) dt` on the grid.
///
/// Window samples that a shift moves off the lattice count as zero.
pub fn stft(f: &Signal, g: &Signal, grid: &PhaseGrid) -> Result<GridFunction> {
    check_pair(f, g, grid)?;
    Ok(GridFunction { grid: *grid, data: shifted_spectra(f, g, grid, 1, false, 1.0) })
}

/// Cross-Wigner distribution through `W(f, g)(x, w) = 2^d e^{4 pi i <x, w>} V_{g(-.)} f(2x, 2w)`.
///
/// Frequencies up to `2L` are needed, so the lattice must resolve them:
/// `n / (2L)` should exceed `2L` by a margin of about 8 for Gaussian-type
/// signals (the default `L = 6`, `n = 256` does).
pub fn wigner(f: &Signal, g: &Signal, grid: &PhaseGrid) -> Result<GridFunction> {
    check_pair(f, g, grid)?;
    let mut data = shifted_spectra(f, g, grid, 2, true, 2.0);
    let d = grid.d;
    let scale = 2f64.powi(d as i32);
    data.par_iter_mut().enumerate().for_each(|(lin, v)| {
        let p = grid.point(lin);
        let xw: f64 = (0..d).map(|j| p[j] * p[d + j]).sum();
        *v *= Complex64::from_polar(scale, 4.0 * PI * xw);
    });
    Ok(GridFunction { grid: *grid, data })
}

/// STFT at a single phase-space point by direct lattice quadrature, with the
/// window given as a function so that `x` need not lie on the lattice.
pub fn stft_point<G: Fn(&[f64]) -> Complex64>(f: &Signal, g: G, x: &[f64], omega: &[f64]) -> Complex64 {
    let lat = f.lattice;
    let cell = lat.step().powi(lat.d as i32);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut shifted = vec![0.0; lat.d];
    for (lin, fv) in f.data.iter().enumerate() {
        let t = lat.point(lin);
        let mut phase = 0.0;
        for j in 0..lat.d {
            shifted[j] = t[j] - x[j];
            phase += omega[j] * t[j];
        }
        acc += fv * g(&shifted).conj() * Complex64::from_polar(1.0, -2.0 * PI * phase);
    }
    acc * cell
}

/// Cross-Wigner distribution at a single point through the STFT identity.
pub fn wigner_point<G: Fn(&[f64]) -> Complex64>(f: &Signal, g: G, x: &[f64], omega: &[f64]) -> Complex64 {
    let d = x.len();
    let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
    let w2: Vec<f64> = omega.iter().map(|v| 2.0 * v).collect();
    let reflected = |t: &[f64]| {
        let neg: Vec<f64> = t.iter().map(|v| -v).collect();
        g(&neg)
    };
    let xw: f64 = x.iter().zip(omega).map(|(a, b)| a * b).sum();
    Complex64::from_polar(2f64.powi(d as i32), 4.0 * PI * xw) * stft_point(f, reflected, &x2, &w2)
}

fn fft_axes(data: &mut [Complex64], n: usize, axes: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let plan = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    for axis in 0..axes {
        let stride = n.pow((axes - 1 - axis) as u32);
        let outer = data.len() / (n * stride);
        // Lines along this axis are independent; gather each, transform, scatter.
        let lines: Vec<(usize, Vec<Complex64>)> = (0..outer * stride)
            .into_par_iter()
            .map(|q| {
                let (o, s) = (q / stride, q % stride);
                let base = o * n * stride + s;
                let mut line: Vec<Complex64> = (0..n).map(|m| data[base + m * stride]).collect();
                plan.process(&mut line);
                (base, line)
            })
            .collect();
        for (base, line) in lines {
            for (m, v) in line.into_iter().enumerate() {
                data[base + m * stride] = v;
            }
        }
    }
}

/// Linear convolution `(a * b)(z) = int a(z - y) b(y) dy` of two functions on
/// the same grid, by FFT with every axis zero-padded to `2n`.
pub fn fft_convolve(a: &GridFunction, b: &GridFunction) -> Result<GridFunction> {
    if a.grid != b.grid {
        return Err(Error::Config("convolution operands live on different grids".into()));
    }
    let grid = a.grid;
    let n = grid.n;
    let axes = grid.axes();
    let m = 2 * n;
    let padded_len = m.pow(axes as u32);
    let embed = |src: &GridFunction| {
        let mut out = vec![Complex64::new(0.0, 0.0); padded_len];
        let mut idx = vec![0usize; axes];
        for (lin, v) in src.data.iter().enumerate() {
            grid.unravel(lin, &mut idx);
            let p = idx.iter().fold(0, |acc, &i| acc * m + i);
            out[p] = *v;
        }
        out
    };
    let mut fa = embed(a);
    let mut fb = embed(b);
    fft_axes(&mut fa, m, axes, false);
    fft_axes(&mut fb, m, axes, false);
    fa.iter_mut().zip(&fb).for_each(|(x, y)| *x *= y);
    fft_axes(&mut fa, m, axes, true);

    // Output index k sits at padded index k + n/2 on every axis.
    let scale = grid.cell() / padded_len as f64;
    let mut out = GridFunction::zeros(grid);
    let mut idx = vec![0usize; axes];
    for lin in 0..grid.len() {
        grid.unravel(lin, &mut idx);
        let p = idx.iter().fold(0, |acc, &i| acc * m + i + n / 2);
        out.data[lin] = fa[p] * scale;
    }
    Ok(out)
}

/// Cohen's class distribution `Q(f, g) = W(f, g) * a` for a sampled symbol `a`.
pub fn cohen_class(f: &Signal, g: &Signal, symbol: &GridFunction) -> Result<GridFunction> {
    let w = wigner(f, g, &symbol.grid)?;
    fft_convolve(&w, symbol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::hermite;

    fn hermite_signal(grid: &PhaseGrid, n: usize) -> Signal {
        Signal::sample(grid.time_lattice(), |t| Complex64::new(hermite(n, t[0]), 0.0))
    }

    #[test]
    fn chirp_matches_direct_dft() {
        let n = 16;
        let c = ChirpDft::new(n, -1.0, 0.125, -3.0, 0.4);
        let data: Vec<Complex64> = (0..n).map(|m| Complex64::new((m as f64).sin(), (m as f64 * 0.3).cos())).collect();
        let mut got = data.clone();
        let mut buf = vec![Complex64::new(0.0, 0.0); c.size];
        c.apply(&mut got, &mut buf);
        for b in 0..n {
            let w = -3.0 + 0.4 * b as f64;
            let want: Complex64 = (0..n)
                .map(|m| data[m] * Complex64::from_polar(1.0, -2.0 * PI * w * (-1.0 + 0.125 * m as f64)))
                .sum();
            assert!((got[b] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn gaussian_stft_and_wigner() {
        let grid = PhaseGrid::default_for(1);
        let g0 = hermite_signal(&grid, 0);
        let v = stft(&g0, &g0, &grid).unwrap();
        let w = wigner(&g0, &g0, &grid).unwrap();
        for lin in (0..grid.len()).step_by(97) {
            let p = grid.point(lin);
            let r2 = p[0] * p[0] + p[1] * p[1];
            let want_v = Complex64::from_polar((-PI * r2 / 2.0).exp(), -PI * p[0] * p[1]);
            assert!((v.data[lin] - want_v).norm() < 1e-10, "{p:?}");
            assert!((w.data[lin].re - 2.0 * (-2.0 * PI * r2).exp()).abs() < 1e-10, "{p:?} {}", w.data[lin]);
            assert!(w.data[lin].im.abs() < 1e-10);
        }
        assert!((w.integral().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn delta_symbol_is_the_identity_for_convolution() {
        let grid = PhaseGrid::new(1, 4.0, 32).unwrap();
        let f = GridFunction::sample(grid, |z| Complex64::new((-z[0].norm_sqr()).exp(), z[0].re));
        let mut delta = GridFunction::zeros(grid);
        delta.data[(grid.n / 2) * grid.n + grid.n / 2] = Complex64::new(1.0 / grid.cell(), 0.0);
        let c = fft_convolve(&f, &delta).unwrap();
        for (a, b) in c.data.iter().zip(&f.data) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn mismatched_lattice_is_rejected() {
        let grid = PhaseGrid::new(1, 6.0, 64).unwrap();
        let other = PhaseGrid::new(1, 5.0, 64).unwrap();
        let f = hermite_signal(&other, 0);
        assert!(stft(&f, &f, &grid).is_err());
    }
}
