use num_complex::Complex64;

use super::grid::{norm_sq, TorusGrid, Wavevector};
use crate::error::{Error, Result};

/// Truncated Fourier coefficients of a real scalar or vector field on the torus.
///
/// The coefficient of mode `k` is `(2π)^{-n} ∫ f e^{-ik·x} dx`. Storage is
/// component-major: component `c` occupies `coeffs[c*len .. (c+1)*len]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: TorusGrid,
    components: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: TorusGrid, components: usize) -> Self {
        Self {
            grid,
            components,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len() * components],
        }
    }

    /// Vector field with one component per spatial dimension.
    pub fn zeros_vector(grid: TorusGrid) -> Self {
        Self::zeros(grid, grid.dim())
    }

    pub fn from_coeffs(grid: TorusGrid, components: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if components == 0 || coeffs.len() != grid.len() * components {
            return Err(Error::config(format!(
                "coefficient buffer of length {} does not match {} components on {} modes",
                coeffs.len(),
                components,
                grid.len()
            )));
        }
        Ok(Self {
            grid,
            components,
            coeffs,
        })
    }

    /// Builds a field by evaluating `f(component, k)` at every stored mode.
    /// The caller is responsible for conjugate symmetry.
    pub fn from_fn(
        grid: TorusGrid,
        components: usize,
        mut f: impl FnMut(usize, &Wavevector) -> Complex64,
    ) -> Self {
        let mut out = Self::zeros(grid, components);
        let len = grid.len();
        for c in 0..components {
            for idx in 0..len {
                let k = grid.wavevector(idx);
                out.coeffs[c * len + idx] = f(c, &k);
            }
        }
        out
    }

    #[inline]
    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    #[inline]
    pub fn components(&self) -> usize {
        self.components
    }

    pub fn is_vector(&self) -> bool {
        self.components == self.grid.dim()
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    #[inline]
    pub fn component(&self, c: usize) -> &[Complex64] {
        let len = self.grid.len();
        &self.coeffs[c * len..(c + 1) * len]
    }

    #[inline]
    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let len = self.grid.len();
        &mut self.coeffs[c * len..(c + 1) * len]
    }

    /// Coefficient of component `c` at wavevector `k`, if `k` is stored.
    pub fn coeff(&self, c: usize, k: &[i64]) -> Option<Complex64> {
        let idx = self.grid.index_of(k)?;
        Some(self.component(c)[idx])
    }

    /// Sets mode `k` of component `c` to `value` and `-k` to its conjugate.
    pub fn set_mode(&mut self, c: usize, k: &[i64], value: Complex64) -> Result<()> {
        let idx = self
            .grid
            .index_of(k)
            .ok_or_else(|| Error::config(format!("wavevector {k:?} is not stored on this grid")))?;
        let neg = self.grid.negated_index(idx);
        let comp = self.component_mut(c);
        if neg == idx {
            comp[idx] = Complex64::new(value.re, 0.0);
        } else {
            comp[idx] = value;
            comp[neg] = value.conj();
        }
        Ok(())
    }

    pub(crate) fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.components != other.components {
            return Err(Error::config(format!(
                "field shape mismatch: {} components on {:?} vs {} components on {:?}",
                self.components, self.grid, other.components, other.grid
            )));
        }
        Ok(())
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &Self) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * alpha;
        }
        Ok(())
    }

    pub fn scale(&mut self, alpha: f64) {
        for a in &mut self.coeffs {
            *a *= alpha;
        }
    }

    /// Coefficient-space ℓ² norm over all modes and components.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|coeff(-k) - conj(coeff(k))|` over all modes and components.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let len = self.grid.len();
        let mut worst = 0.0f64;
        for c in 0..self.components {
            let comp = self.component(c);
            for idx in 0..len {
                let neg = self.grid.negated_index(idx);
                worst = worst.max((comp[neg] - comp[idx].conj()).norm());
            }
        }
        worst
    }

    /// Largest mean-mode magnitude over components.
    pub fn mean_mode_magnitude(&self) -> f64 {
        (0..self.components)
            .map(|c| self.component(c)[0].norm())
            .fold(0.0, f64::max)
    }

    /// `max_k |k·v̂(k)| / (|k| ‖v‖)`; zero for the zero field.
    pub fn divergence_residual(&self) -> Result<f64> {
        if !self.is_vector() {
            return Err(Error::contract("divergence needs a vector field"));
        }
        let norm = self.l2_norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let len = self.grid.len();
        let dim = self.grid.dim();
        let mut worst = 0.0f64;
        for idx in 1..len {
            let k = self.grid.derivative_wavevector(idx);
            if k == [0; 3] {
                continue;
            }
            let mut div = Complex64::new(0.0, 0.0);
            for (c, &kc) in k.iter().enumerate().take(dim) {
                div += self.coeffs[c * len + idx] * kc as f64;
            }
            worst = worst.max(div.norm() / norm_sq(&k).sqrt());
        }
        Ok(worst / norm)
    }

    /// Replaces every coefficient by the average of itself and the conjugate of
    /// its mirror, making the field exactly real.
    pub fn symmetrize(&mut self) {
        let grid = self.grid;
        let len = grid.len();
        for c in 0..self.components {
            let comp = self.component_mut(c);
            for idx in 0..len {
                let neg = grid.negated_index(idx);
                if neg < idx {
                    continue;
                }
                if neg == idx {
                    comp[idx].im = 0.0;
                } else {
                    let avg = (comp[idx] + comp[neg].conj()) * 0.5;
                    comp[idx] = avg;
                    comp[neg] = avg.conj();
                }
            }
        }
    }

    pub fn zero_mean(&mut self) {
        for c in 0..self.components {
            self.component_mut(c)[0] = Complex64::new(0.0, 0.0);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}
