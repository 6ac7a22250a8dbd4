//! Fourier multipliers acting on [`SpectralField`]s.
//!
//! Every operation here is diagonal in `k` (or a small matrix per mode for the
//! projection), so they all commute with one another.

use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::{dot, norm_sq};
use crate::error::{Error, Result};

/// Which Sobolev weight to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sobolev {
    /// `|k|^{2s}`
    Homogeneous,
    /// `(1 + |k|²)^s`
    Inhomogeneous,
}

/// Leray projection `v̂ ↦ v̂ - k (k·v̂)/|k|²`; the mean mode is left alone.
/// Nyquist components of `k` act as zero, as for any first derivative.
pub fn leray_project(field: &SpectralField) -> Result<SpectralField> {
    let mut out = field.clone();
    leray_project_in_place(&mut out)?;
    Ok(out)
}

pub fn leray_project_in_place(field: &mut SpectralField) -> Result<()> {
    if !field.is_vector() {
        return Err(Error::contract(format!(
            "Leray projection needs {} components, got {}",
            field.grid().dim(),
            field.components()
        )));
    }
    let grid = *field.grid();
    let dim = grid.dim();
    let len = grid.len();
    let coeffs = field.coeffs_mut();
    for idx in 1..len {
        let k = grid.derivative_wavevector(idx);
        let k2 = norm_sq(&k);
        if k2 == 0.0 {
            continue;
        }
        let mut kv = Complex64::new(0.0, 0.0);
        for c in 0..dim {
            kv += coeffs[c * len + idx] * k[c] as f64;
        }
        if kv == Complex64::new(0.0, 0.0) {
            continue;
        }
        let factor = kv / k2;
        for c in 0..dim {
            coeffs[c * len + idx] -= factor * k[c] as f64;
        }
    }
    Ok(())
}

/// `Λ^s`: multiplies mode `k` by `|k|^s`. The mean mode is zeroed for `s ≠ 0`.
pub fn fractional_laplacian(field: &SpectralField, s: f64) -> Result<SpectralField> {
    if s < 0.0 && field.mean_mode_magnitude() != 0.0 {
        return Err(Error::contract(format!(
            "Λ^{s} is undefined on a field with nonzero mean"
        )));
    }
    if s == 0.0 {
        return Ok(field.clone());
    }
    let grid = *field.grid();
    let len = grid.len();
    let mut out = field.clone();
    for c in 0..field.components() {
        let comp = out.component_mut(c);
        comp[0] = Complex64::new(0.0, 0.0);
        for (idx, z) in comp.iter_mut().enumerate().take(len).skip(1) {
            *z *= norm_sq(&grid.wavevector(idx)).powf(0.5 * s);
        }
    }
    Ok(out)
}

/// `b̃·∇`: multiplies mode `k` by `i (b̃·k)`.
///
/// Nyquist modes are zeroed since an odd multiplier there cannot keep the
/// field real.
pub fn directional_derivative(field: &SpectralField, b_tilde: &[f64]) -> Result<SpectralField> {
    let grid = *field.grid();
    if b_tilde.len() != grid.dim() {
        return Err(Error::config(format!(
            "direction has {} components on a {}-dimensional grid",
            b_tilde.len(),
            grid.dim()
        )));
    }
    let len = grid.len();
    let mut out = field.clone();
    for c in 0..field.components() {
        let comp = out.component_mut(c);
        for (idx, z) in comp.iter_mut().enumerate().take(len) {
            let k = grid.wavevector(idx);
            if grid.is_nyquist(&k) {
                *z = Complex64::new(0.0, 0.0);
            } else {
                *z *= Complex64::new(0.0, dot(b_tilde, &k));
            }
        }
    }
    Ok(out)
}

/// Weight `w(k)` such that `‖f‖² = Σ_k w(k) |f̂(k)|²`.
#[inline]
pub fn sobolev_weight(k2: f64, s: f64, kind: Sobolev) -> f64 {
    match kind {
        Sobolev::Homogeneous => {
            if k2 == 0.0 {
                // |0|^{2s}: 1 at s = 0, 0 for s > 0; dropped for s < 0 (mean-zero fields)
                if s == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                k2.powf(s)
            }
        }
        Sobolev::Inhomogeneous => (1.0 + k2).powf(s),
    }
}

/// Sobolev norm on coefficients, summed over components. No `(2π)^n` factor.
///
/// For homogeneous norms with `s < 0` the mean mode is ignored; callers are
/// expected to pass mean-zero fields there.
pub fn sobolev_norm(field: &SpectralField, s: f64, kind: Sobolev) -> f64 {
    let grid = field.grid();
    let len = grid.len();
    let mut weights = Vec::with_capacity(len);
    for idx in 0..len {
        weights.push(sobolev_weight(norm_sq(&grid.wavevector(idx)), s, kind));
    }
    let mut total = 0.0;
    for c in 0..field.components() {
        total += field
            .component(c)
            .iter()
            .zip(&weights)
            .map(|(z, w)| w * z.norm_sqr())
            .sum::<f64>();
    }
    total.sqrt()
}

/// 2/3-rule truncation: zeroes every mode with `max_i |k_i| > N/3`.
pub fn dealias(field: &SpectralField) -> SpectralField {
    let mut out = field.clone();
    dealias_in_place(&mut out);
    out
}

pub fn dealias_in_place(field: &mut SpectralField) {
    let grid = *field.grid();
    let len = grid.len();
    for c in 0..field.components() {
        let comp = field.component_mut(c);
        for (idx, z) in comp.iter_mut().enumerate().take(len) {
            if !grid.is_retained(&grid.wavevector(idx)) {
                *z = Complex64::new(0.0, 0.0);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{transform_roundtrip, TorusGrid};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const GOLDEN: f64 = 1.618_033_988_749_895;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Conjugate-symmetric pseudorandom field supported on `max|k_i| <= band`.
    fn random_field(grid: TorusGrid, comps: usize, band: i64, seed: u64, mean_zero: bool) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = SpectralField::from_fn(grid, comps, |_, k| {
            if k.iter().all(|&x| x.abs() <= band) {
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            } else {
                c(0.0, 0.0)
            }
        });
        f.symmetrize();
        if mean_zero {
            f.zero_mean();
        }
        f
    }

    #[test]
    fn roundtrip_recovers_band_limited_field() {
        for dim in [2, 3] {
            let g = TorusGrid::new(dim, 16).unwrap();
            let f = random_field(g, dim, 5, 7, false);
            let back = transform_roundtrip(&f).unwrap();
            let rel = back.max_abs_diff(&f) / f.coeffs().iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(rel <= 1e-12, "dim {dim}: {rel}");
        }
    }

    #[test]
    fn parseval_mean_square_matches_coefficient_sum() {
        let g = TorusGrid::new(2, 16).unwrap();
        let f = random_field(g, 1, 6, 3, false);
        let t = crate::spectral::SpectralTransform::new(g);
        let phys = t.to_physical(&f).unwrap();
        let mean_sq = phys[0].iter().map(|x| x * x).sum::<f64>() / g.len() as f64;
        let coeff_sq = f.l2_norm().powi(2);
        assert!((mean_sq - coeff_sq).abs() <= 1e-13 * coeff_sq);
    }

    #[test]
    fn leray_single_mode_by_hand() {
        let g = TorusGrid::new(2, 8).unwrap();
        let mut v = SpectralField::zeros_vector(g);
        v.set_mode(0, &[1, 0], c(1.0, 0.0)).unwrap();
        v.set_mode(1, &[1, 0], c(1.0, 0.0)).unwrap();
        let p = leray_project(&v).unwrap();
        assert_eq!(p.coeff(0, &[1, 0]).unwrap(), c(0.0, 0.0));
        assert_eq!(p.coeff(1, &[1, 0]).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn leray_kills_gradients_and_keeps_solenoidal_fields() {
        let g = TorusGrid::new(2, 16).unwrap();
        let psi = random_field(g, 1, 5, 11, true);
        // ∇ψ has coefficients i k ψ̂
        let grad = SpectralField::from_fn(g, 2, |comp, k| {
            let idx = g.index_of(&k[..2]).unwrap();
            psi.component(0)[idx] * c(0.0, k[comp] as f64)
        });
        let p = leray_project(&grad).unwrap();
        assert!(p.l2_norm() <= 1e-14 * grad.l2_norm());

        let v = leray_project(&random_field(g, 2, 5, 12, true)).unwrap();
        assert!(v.divergence_residual().unwrap() <= 1e-14);
        let again = leray_project(&v).unwrap();
        assert!(again.max_abs_diff(&v) <= 1e-14);
    }

    #[test]
    fn leray_rejects_scalars() {
        let g = TorusGrid::new(2, 8).unwrap();
        assert!(matches!(
            leray_project(&SpectralField::zeros(g, 1)),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn fractional_laplacian_examples() {
        let g = TorusGrid::new(2, 8).unwrap();
        let mut f = SpectralField::zeros(g, 1);
        f.set_mode(0, &[1, 0], c(0.5, 0.0)).unwrap();
        assert_eq!(fractional_laplacian(&f, 0.0).unwrap(), f);
        assert_eq!(fractional_laplacian(&f, 2.0).unwrap(), f);

        let mut g11 = SpectralField::zeros(g, 1);
        g11.set_mode(0, &[1, 1], c(0.25, -0.5)).unwrap();
        let out = fractional_laplacian(&g11, 2.0).unwrap();
        assert!((out.coeff(0, &[1, 1]).unwrap() - c(0.5, -1.0)).norm() < 1e-15);

        let mut with_mean = f.clone();
        with_mean.component_mut(0)[0] = c(1.0, 0.0);
        assert!(matches!(fractional_laplacian(&with_mean, -1.0), Err(Error::Contract(_))));
        assert_eq!(fractional_laplacian(&with_mean, 1.0).unwrap().component(0)[0], c(0.0, 0.0));
    }

    #[test]
    fn directional_derivative_examples() {
        let g = TorusGrid::new(2, 8).unwrap();
        let b = [1.0, GOLDEN];
        let mut constant = SpectralField::zeros(g, 1);
        constant.component_mut(0)[0] = c(3.0, 0.0);
        assert_eq!(directional_derivative(&constant, &b).unwrap().l2_norm(), 0.0);

        // sin(x1) = (e^{ix1} - e^{-ix1}) / 2i  ->  coefficient -i/2 at k = (1, 0)
        let mut sin = SpectralField::zeros(g, 1);
        sin.set_mode(0, &[1, 0], c(0.0, -0.5)).unwrap();
        let d = directional_derivative(&sin, &b).unwrap();
        assert!((d.coeff(0, &[1, 0]).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        assert!((d.coeff(0, &[-1, 0]).unwrap() - c(0.5, 0.0)).norm() < 1e-15);

        let mut vertical = SpectralField::zeros(g, 1);
        vertical.set_mode(0, &[0, 1], c(0.3, 0.2)).unwrap();
        assert_eq!(directional_derivative(&vertical, &[1.0, 0.0]).unwrap().l2_norm(), 0.0);
        assert!(directional_derivative(&vertical, &[1.0]).is_err());
    }

    #[test]
    fn sobolev_examples() {
        let g = TorusGrid::new(2, 8).unwrap();
        assert_eq!(sobolev_norm(&SpectralField::zeros(g, 2), 1.0, Sobolev::Homogeneous), 0.0);
        let mut f = SpectralField::zeros(g, 1);
        f.set_mode(0, &[1, 1], c(0.5, 0.0)).unwrap();
        assert!((sobolev_norm(&f, 1.0, Sobolev::Homogeneous) - 1.0).abs() < 1e-15);
        let h = random_field(g, 2, 3, 5, true);
        assert!((sobolev_norm(&h, 0.0, Sobolev::Homogeneous) - h.l2_norm()).abs() < 1e-14);
        // (1 + 2)^1 * 2 * 1/4 = 1.5
        assert!((sobolev_norm(&f, 1.0, Sobolev::Inhomogeneous) - 1.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn dealias_examples() {
        let g = TorusGrid::new(2, 16).unwrap();
        let inside = random_field(g, 1, g.dealias_cutoff() as i64, 1, false);
        assert_eq!(dealias(&inside), inside);
        let mut nyq = SpectralField::zeros(g, 1);
        nyq.set_mode(0, &[8, 0], c(1.0, 0.0)).unwrap();
        assert_eq!(dealias(&nyq).l2_norm(), 0.0);
        let full = random_field(g, 2, 8, 2, false);
        assert!(dealias(&full).l2_norm() <= full.l2_norm());
    }

    #[test]
    fn multipliers_commute() {
        let g = TorusGrid::new(2, 16).unwrap();
        let f = random_field(g, 2, 7, 21, true);
        let b = [1.0, GOLDEN];
        let a = directional_derivative(&fractional_laplacian(&f, 1.5).unwrap(), &b).unwrap();
        let z = fractional_laplacian(&directional_derivative(&f, &b).unwrap(), 1.5).unwrap();
        assert!(a.max_abs_diff(&z) <= 1e-14 * a.l2_norm().max(1.0));
        let p = leray_project(&directional_derivative(&f, &b).unwrap()).unwrap();
        let q = directional_derivative(&leray_project(&f).unwrap(), &b).unwrap();
        assert!(p.max_abs_diff(&q) <= 1e-14 * p.l2_norm().max(1.0));
    }

    proptest! {
        #[test]
        fn sobolev_triangle_inequality(seed_a in 0u64..1000, seed_b in 1000u64..2000, s in 0.0f64..4.0) {
            let g = TorusGrid::new(2, 8).unwrap();
            let f = random_field(g, 2, 3, seed_a, true);
            let h = random_field(g, 2, 3, seed_b, true);
            let mut sum = f.clone();
            sum.axpy(1.0, &h).unwrap();
            let lhs = sobolev_norm(&sum, s, Sobolev::Homogeneous);
            let rhs = sobolev_norm(&f, s, Sobolev::Homogeneous) + sobolev_norm(&h, s, Sobolev::Homogeneous);
            prop_assert!(lhs <= rhs * (1.0 + 1e-14));
        }

        #[test]
        fn operations_preserve_conjugate_symmetry(seed in 0u64..1000, s in 0.0f64..3.0) {
            let g = TorusGrid::new(2, 8).unwrap();
            let f = random_field(g, 2, 4, seed, true);
            let scale = f.l2_norm();
            prop_assert!(leray_project(&f).unwrap().conjugate_symmetry_defect() <= 1e-15 * scale);
            prop_assert!(fractional_laplacian(&f, s).unwrap().conjugate_symmetry_defect() <= 1e-14 * scale);
            prop_assert!(directional_derivative(&f, &[1.0, GOLDEN]).unwrap().conjugate_symmetry_defect() <= 1e-14 * scale);
            prop_assert!(dealias(&f).conjugate_symmetry_defect() == 0.0);
        }
    }
}
