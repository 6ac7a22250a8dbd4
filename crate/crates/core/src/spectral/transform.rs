use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::field::SpectralField;
use super::grid::TorusGrid;
use crate::error::{Error, Result};

/// Multidimensional FFT between coefficient and physical-space arrays.
///
/// Physical values live on `x_j = 2π j / N` in the same row-major order as
/// the spectral storage. The inverse is the unnormalized sum
/// `f(x) = Σ_k f̂(k) e^{ik·x}`; the forward transform divides by `N^n`.
#[derive(Clone)]
pub struct SpectralTransform {
    grid: TorusGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralTransform").field("grid", &self.grid).finish()
    }
}

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Inverse,
}

impl SpectralTransform {
    pub fn new(grid: TorusGrid) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid,
            forward: planner.plan_fft_forward(grid.points()),
            inverse: planner.plan_fft_inverse(grid.points()),
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    fn run(&self, buf: &mut [Complex64], dir: Direction, work: &mut Vec<Complex64>) {
        let n = self.grid.points();
        let dim = self.grid.dim();
        let len = buf.len();
        let fft = match dir {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        };
        work.resize(len + fft.get_inplace_scratch_len(), Complex64::new(0.0, 0.0));
        let (lines, scratch) = work.split_at_mut(len);
        for axis in 0..dim {
            let stride = n.pow((dim - 1 - axis) as u32);
            if stride == 1 {
                fft.process_with_scratch(buf, scratch);
                continue;
            }
            let block = n * stride;
            let outer = len / block;
            // gather every line along `axis` into contiguous storage
            let mut line = 0;
            for o in 0..outer {
                let base = o * block;
                for inner in 0..stride {
                    let dst = &mut lines[line * n..(line + 1) * n];
                    for (j, d) in dst.iter_mut().enumerate() {
                        *d = buf[base + inner + j * stride];
                    }
                    line += 1;
                }
            }
            fft.process_with_scratch(lines, scratch);
            let mut line = 0;
            for o in 0..outer {
                let base = o * block;
                for inner in 0..stride {
                    let src = &lines[line * n..(line + 1) * n];
                    for (j, s) in src.iter().enumerate() {
                        buf[base + inner + j * stride] = *s;
                    }
                    line += 1;
                }
            }
        }
        if let Direction::Forward = dir {
            let inv = 1.0 / len as f64;
            for z in buf.iter_mut() {
                *z *= inv;
            }
        }
    }

    /// Coefficients to physical values, in place (complex output).
    pub fn inverse_in_place(&self, buf: &mut [Complex64], work: &mut Vec<Complex64>) {
        self.run(buf, Direction::Inverse, work);
    }

    /// Physical values to coefficients, in place.
    pub fn forward_in_place(&self, buf: &mut [Complex64], work: &mut Vec<Complex64>) {
        self.run(buf, Direction::Forward, work);
    }

    /// Synthesizes two real fields with one complex transform.
    ///
    /// `a` and `b` must be conjugate symmetric; `buf` receives `a + i b` in
    /// physical space.
    pub fn pair_to_physical(
        &self,
        a: &[Complex64],
        b: &[Complex64],
        buf: &mut [Complex64],
        work: &mut Vec<Complex64>,
    ) {
        let i = Complex64::new(0.0, 1.0);
        for ((z, &x), &y) in buf.iter_mut().zip(a).zip(b) {
            *z = x + i * y;
        }
        self.inverse_in_place(buf, work);
    }

    /// Analyzes two real physical fields packed as `buf = a + i b`; `buf` is
    /// overwritten by the transform.
    pub fn pair_from_physical(
        &self,
        buf: &mut [Complex64],
        a: &mut [Complex64],
        b: &mut [Complex64],
        work: &mut Vec<Complex64>,
    ) {
        self.forward_in_place(buf, work);
        let half_i = Complex64::new(0.0, -0.5);
        for idx in 0..buf.len() {
            let zk = buf[idx];
            let zm = buf[self.grid.negated_index(idx)].conj();
            a[idx] = (zk + zm) * 0.5;
            b[idx] = (zk - zm) * half_i;
        }
    }

    /// Physical-space values of every component.
    pub fn to_physical(&self, field: &SpectralField) -> Result<Vec<Vec<f64>>> {
        self.check_grid(field.grid())?;
        let mut work = Vec::new();
        let mut out = Vec::with_capacity(field.components());
        for c in 0..field.components() {
            let mut buf = field.component(c).to_vec();
            self.inverse_in_place(&mut buf, &mut work);
            out.push(buf.into_iter().map(|z| z.re).collect());
        }
        Ok(out)
    }

    /// Coefficients of real physical-space data, one array per component.
    pub fn from_physical(&self, values: &[Vec<f64>]) -> Result<SpectralField> {
        if values.is_empty() || values.iter().any(|v| v.len() != self.grid.len()) {
            return Err(Error::config(format!(
                "physical data must hold {} values per component",
                self.grid.len()
            )));
        }
        let mut work = Vec::new();
        let mut out = SpectralField::zeros(self.grid, values.len());
        for (c, vals) in values.iter().enumerate() {
            let dst = out.component_mut(c);
            for (d, &v) in dst.iter_mut().zip(vals) {
                *d = Complex64::new(v, 0.0);
            }
            self.forward_in_place(dst, &mut work);
        }
        Ok(out)
    }

    fn check_grid(&self, grid: &TorusGrid) -> Result<()> {
        if *grid != self.grid {
            return Err(Error::config(format!(
                "field grid {grid:?} does not match transform grid {:?}",
                self.grid
            )));
        }
        Ok(())
    }
}

/// Inverse transform followed by the forward transform.
pub fn transform_roundtrip(field: &SpectralField) -> Result<SpectralField> {
    let t = SpectralTransform::new(*field.grid());
    t.from_physical(&t.to_physical(field)?)
}
