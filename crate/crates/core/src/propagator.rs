//! Exact solution operators of the linearized system.
//!
//! Per mode `k ≠ 0` both fields obey the damped wave equation
//! `φ'' + |k|² φ' + (b̃·k)² φ = f`, whose characteristic roots are the
//! solutions of `λ² + 2aλ + d = 0` with `a = |k|²/2` and `d = (b̃·k)²`.
//! The kernels are
//!
//! ```text
//! L₁(t) = (e^{λ₁t} + e^{λ₂t}) / 2,    L₂(t) = (e^{λ₁t} - e^{λ₂t}) / (λ₁ - λ₂)
//! ```
//!
//! evaluated in one of three regimes so that neither the double root nor the
//! near-zero `λ₁` loses precision.

use std::f64::consts::E;
use std::fmt;

use num_complex::Complex64;

use crate::diophantine::{region_of, to_wavevector, BackgroundField, Region};
use crate::error::{Error, Result};
use crate::spectral::{dot, norm_sq, SpectralField, TorusGrid, Wavevector};

/// Which field carries the dissipation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Case {
    /// `μ = 0, ν = 1`: inviscid flow, resistive magnetic field.
    MagneticDiffusion,
    /// `μ = 1, ν = 0`: viscous flow, ideal magnetic field.
    ViscousFlow,
}

impl Case {
    pub fn mu(self) -> f64 {
        match self {
            Case::MagneticDiffusion => 0.0,
            Case::ViscousFlow => 1.0,
        }
    }

    pub fn nu(self) -> f64 {
        match self {
            Case::MagneticDiffusion => 1.0,
            Case::ViscousFlow => 0.0,
        }
    }

    pub fn from_coefficients(mu: f64, nu: f64) -> Result<Self> {
        match (mu, nu) {
            (m, n) if m == 0.0 && n == 1.0 => Ok(Case::MagneticDiffusion),
            (m, n) if m == 1.0 && n == 0.0 => Ok(Case::ViscousFlow),
            _ => Err(Error::config(format!("(mu, nu) must be (0,1) or (1,0), got ({mu},{nu})"))),
        }
    }

    /// Wire code used by snapshots and the C ABI.
    pub fn code(self) -> u8 {
        match self {
            Case::MagneticDiffusion => 0,
            Case::ViscousFlow => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Case::MagneticDiffusion),
            1 => Some(Case::ViscousFlow),
            _ => None,
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.mu(), self.nu())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `a² > d`: two distinct real roots.
    Hyperbolic,
    /// `a² < d`: complex conjugate roots `-a ± iω`.
    Oscillatory,
    /// `|a² - d|` below the relative threshold: (near) double root `-a`.
    Degenerate,
}

/// Eigen-data of the damped-wave symbol at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeExponents {
    pub k: Vec<i64>,
    /// `|k|²/2`
    pub a: f64,
    /// `(b̃·k)²`
    pub d: f64,
    pub regime: Regime,
    /// `sqrt(|a² - d|)`: σ when hyperbolic, ω when oscillatory.
    pub sigma_or_omega: f64,
    pub lambda1: Complex64,
    pub lambda2: Complex64,
}

const DEGENERATE_REL: f64 = 1e-10;

fn regime_of(a: f64, d: f64) -> Regime {
    let gap = a * a - d;
    if gap.abs() <= DEGENERATE_REL * (a * a).max(d).max(1.0) {
        Regime::Degenerate
    } else if gap > 0.0 {
        Regime::Hyperbolic
    } else {
        Regime::Oscillatory
    }
}

pub fn mode_exponents(k: &[i64], b_tilde: &[f64]) -> Result<ModeExponents> {
    let kv = to_wavevector(k, b_tilde.len())?;
    if kv == [0; 3] {
        return Err(Error::contract("mode exponents are undefined at k = 0"));
    }
    let a = 0.5 * norm_sq(&kv);
    let bk = dot(b_tilde, &kv);
    let d = bk * bk;
    let regime = regime_of(a, d);
    let gap = a * a - d;
    let root = gap.abs().sqrt();
    let (lambda1, lambda2) = if gap >= 0.0 {
        // λ₁ = -d / (a + σ) avoids the cancellation in -a + σ
        let big = a + root;
        (Complex64::new(-d / big, 0.0), Complex64::new(-big, 0.0))
    } else {
        (Complex64::new(-a, root), Complex64::new(-a, -root))
    };
    Ok(ModeExponents {
        k: k.to_vec(),
        a,
        d,
        regime,
        sigma_or_omega: root,
        lambda1,
        lambda2,
    })
}

const SERIES_TOL: f64 = 1e-17;

/// `(L₁(t), L₂(t))` for `a = |k|²/2 > 0`, `d = (b̃·k)²`, `t ≥ 0`.
pub(crate) fn kernels(a: f64, d: f64, t: f64) -> (f64, f64) {
    if t == 0.0 {
        return (1.0, 0.0);
    }
    let gap = a * a - d;
    match regime_of(a, d) {
        Regime::Hyperbolic => {
            let sigma = gap.sqrt();
            let big = a + sigma;
            let l1_rate = -d / big;
            let e1 = (l1_rate * t).exp();
            let e2 = (-big * t).exp();
            let l2 = if 2.0 * sigma * t <= 1.0 {
                e2 * (2.0 * sigma * t).exp_m1() / (2.0 * sigma)
            } else {
                (e1 - e2) / (2.0 * sigma)
            };
            (0.5 * (e1 + e2), l2)
        }
        Regime::Oscillatory => {
            let omega = (-gap).sqrt();
            let damp = (-a * t).exp();
            let (s, c) = (omega * t).sin_cos();
            (damp * c, damp * s / omega)
        }
        Regime::Degenerate => {
            // cosh / sinh series in x = (σt)², with σ² = a² - d of either sign
            let x = gap * t * t;
            let mut even_term = 1.0;
            let mut odd_term = 1.0;
            let mut even_sum = 1.0;
            let mut odd_sum = 1.0;
            let mut j = 1.0;
            loop {
                even_term *= x / ((2.0 * j - 1.0) * (2.0 * j));
                odd_term *= x / ((2.0 * j) * (2.0 * j + 1.0));
                even_sum += even_term;
                odd_sum += odd_term;
                if (even_term.abs() <= SERIES_TOL * even_sum.abs()
                    && odd_term.abs() <= SERIES_TOL * odd_sum.abs())
                    || j > 200.0
                {
                    break;
                }
                j += 1.0;
            }
            let damp = (-a * t).exp();
            (damp * even_sum, t * damp * odd_sum)
        }
    }
}

/// Kernel multipliers `(L₁(t), L₂(t))` at frequency `k`.
pub fn kernel_values(k: &[i64], b_tilde: &[f64], t: f64) -> Result<(f64, f64)> {
    if !(t >= 0.0) {
        return Err(Error::contract(format!("kernel time must be nonnegative, got {t}")));
    }
    let m = mode_exponents(k, b_tilde)?;
    Ok(kernels(m.a, m.d, t))
}

/// `C₁`: `t e^{-|k|²t/2} ≤ (4/e) e^{-|k|²t/4} / |k|²` from `y e^{-y} ≤ 1/e`.
pub const C_S1_L2: f64 = 4.0 / E;
/// `C₂`: `½(e^{λ₁t} + e^{λ₂t}) ≤ e^{-|k|²t/4}` in the medium region.
pub const C_S2_L1: f64 = 1.0;
/// `C₃`: `t e^{-|k|²t/4} ≤ (8/e) e^{-|k|²t/8} / |k|²`.
pub const C_S2_L2: f64 = 8.0 / E;
/// `2σ ≥ |k|²/2` in the high region gives `|L₂| ≤ 2 e^{λ₁t} / |k|²`.
pub const C_S3_L2: f64 = 2.0;

/// Result of checking the region-specific kernel bounds at one `(k, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelBound {
    pub ok: bool,
    /// `min(bound - |value|)` over the two kernels.
    pub slack: f64,
    pub region: Region,
    pub l1: f64,
    pub l2: f64,
    pub bound_l1: f64,
    pub bound_l2: f64,
}

/// Upper bounds `(|L₁|, |L₂|)` for frequency `k` at time `t`.
pub fn kernel_bounds(k: &Wavevector, b_tilde: &[f64], t: f64) -> (Region, f64, f64) {
    let k2 = norm_sq(k);
    let bk = dot(b_tilde, k);
    let region = region_of(k, b_tilde);
    let (b1, b2) = match region {
        Region::S1 => ((-0.5 * k2 * t).exp(), C_S1_L2 * (-0.25 * k2 * t).exp() / k2),
        Region::S2 => (
            C_S2_L1 * (-0.25 * k2 * t).exp(),
            C_S2_L2 * (-0.125 * k2 * t).exp() / k2,
        ),
        Region::S3 => {
            let two_exp = (-bk * bk / k2 * t).exp() + (-0.75 * k2 * t).exp();
            (0.5 * two_exp, C_S3_L2 * two_exp / k2)
        }
    };
    (region, b1, b2)
}

/// Checks `|L₁| ≤ bound₁` and `|L₂| ≤ bound₂` for the region of `k`.
///
/// `ok` tolerates a negative slack of one ulp of the bound, which covers the
/// saturated case `L₁(0) = 1`.
pub fn kernel_bound_check(k: &[i64], b_tilde: &[f64], t: f64) -> Result<KernelBound> {
    let (l1, l2) = kernel_values(k, b_tilde, t)?;
    let kv = to_wavevector(k, b_tilde.len())?;
    let (region, bound_l1, bound_l2) = kernel_bounds(&kv, b_tilde, t);
    let s1 = bound_l1 - l1.abs();
    let s2 = bound_l2 - l2.abs();
    let ok = s1 >= -f64::EPSILON * bound_l1 && s2 >= -f64::EPSILON * bound_l2;
    Ok(KernelBound {
        ok,
        slack: s1.min(s2),
        region,
        l1,
        l2,
        bound_l1,
        bound_l2,
    })
}

fn check_pair(u0: &SpectralField, b0: &SpectralField, bg: &BackgroundField) -> Result<TorusGrid> {
    u0.check_same_shape(b0)?;
    let grid = *u0.grid();
    if grid.dim() != bg.dim() {
        return Err(Error::config("field and background dimensions differ"));
    }
    if u0.mean_mode_magnitude() != 0.0 || b0.mean_mode_magnitude() != 0.0 {
        return Err(Error::contract("linear propagation needs mean-zero data"));
    }
    Ok(grid)
}

/// Coupling multiplier `b̃·k`, switched off on Nyquist modes like `b̃·∇`.
#[inline]
fn coupling(grid: &TorusGrid, k: &Wavevector, b_tilde: &[f64]) -> f64 {
    if grid.is_nyquist(k) {
        0.0
    } else {
        dot(b_tilde, k)
    }
}

/// Closed-form solution `(U(t), B(t))` of the linearized system.
pub fn propagate_linear(
    u0: &SpectralField,
    b0: &SpectralField,
    bg: &BackgroundField,
    t: f64,
    case: Case,
) -> Result<(SpectralField, SpectralField)> {
    let grid = check_pair(u0, b0, bg)?;
    if !(t >= 0.0) {
        return Err(Error::contract(format!("propagation time must be nonnegative, got {t}")));
    }
    // sign of the ½Δ correction on U; B takes the opposite sign
    let sign_u = match case {
        Case::MagneticDiffusion => 1.0,
        Case::ViscousFlow => -1.0,
    };
    let len = grid.len();
    let mut u = SpectralField::zeros(grid, u0.components());
    let mut b = SpectralField::zeros(grid, b0.components());
    let b_tilde = bg.b_tilde();
    for idx in 1..len {
        let k = grid.wavevector(idx);
        let k2 = norm_sq(&k);
        let beta = coupling(&grid, &k, b_tilde);
        let (l1, l2) = kernels(0.5 * k2, beta * beta, t);
        let ib = Complex64::new(0.0, beta);
        let half = 0.5 * k2;
        for c in 0..u0.components() {
            let uk = u0.component(c)[idx];
            let bk = b0.component(c)[idx];
            u.component_mut(c)[idx] = uk * l1 + (ib * bk + uk * (sign_u * half)) * l2;
            b.component_mut(c)[idx] = bk * l1 + (ib * uk - bk * (sign_u * half)) * l2;
        }
    }
    Ok((u, b))
}

/// First-order linear tendencies `(μΔU + b̃·∇B, νΔB + b̃·∇U)`.
pub fn linear_rates(
    u: &SpectralField,
    b: &SpectralField,
    bg: &BackgroundField,
    case: Case,
) -> Result<(SpectralField, SpectralField)> {
    u.check_same_shape(b)?;
    let grid = *u.grid();
    let mut du = SpectralField::zeros(grid, u.components());
    let mut db = SpectralField::zeros(grid, b.components());
    for idx in 0..grid.len() {
        let k = grid.wavevector(idx);
        let k2 = norm_sq(&k);
        let ib = Complex64::new(0.0, coupling(&grid, &k, bg.b_tilde()));
        for c in 0..u.components() {
            let uk = u.component(c)[idx];
            let bk = b.component(c)[idx];
            du.component_mut(c)[idx] = ib * bk - uk * (case.mu() * k2);
            db.component_mut(c)[idx] = ib * uk - bk * (case.nu() * k2);
        }
    }
    Ok((du, db))
}

/// Forcing sampled at `τ_j = j · step`, `j = 0, 1, …`.
#[derive(Debug, Clone)]
pub struct ForcingSamples {
    pub step: f64,
    pub samples: Vec<SpectralField>,
}

impl ForcingSamples {
    /// Samples `f(τ)` on `M + 1` uniform points covering `[0, t]`.
    pub fn sample(t: f64, intervals: usize, mut f: impl FnMut(f64) -> SpectralField) -> Self {
        let step = t / intervals as f64;
        Self {
            step,
            samples: (0..=intervals).map(|j| f(j as f64 * step)).collect(),
        }
    }
}

/// Composite quadrature weights on `m` uniform intervals (in units of `h`):
/// Simpson for even `m`, Simpson plus a closing 3/8 panel for odd `m ≥ 3`.
fn quadrature_weights(m: usize) -> Vec<f64> {
    let mut w = vec![0.0; m + 1];
    let simpson_end = if m.is_multiple_of(2) { m } else { m - 3 };
    let mut j = 0;
    while j < simpson_end {
        w[j] += 1.0 / 3.0;
        w[j + 1] += 4.0 / 3.0;
        w[j + 2] += 1.0 / 3.0;
        j += 2;
    }
    if m % 2 == 1 {
        let s = simpson_end;
        w[s] += 3.0 / 8.0;
        w[s + 1] += 9.0 / 8.0;
        w[s + 2] += 9.0 / 8.0;
        w[s + 3] += 3.0 / 8.0;
    }
    w
}

/// Solution of `φ'' = Δφ' + (b̃·∇)²φ + f` with `φ(0) = φ₀`, `φ'(0) = φ₁`:
///
/// `φ(t) = L₁(t)φ₀ + L₂(t)(φ₁ − ½Δφ₀) + ∫₀ᵗ L₂(t−τ) f(τ) dτ`.
///
/// The homogeneous part is exact per mode. The convolution uses composite
/// Simpson quadrature on the sample grid, `O(h⁴)` for smooth forcing.
pub fn solve_duhamel(
    phi0: &SpectralField,
    phi1: &SpectralField,
    forcing: &ForcingSamples,
    t: f64,
    bg: &BackgroundField,
) -> Result<SpectralField> {
    phi0.check_same_shape(phi1)?;
    let grid = *phi0.grid();
    if grid.dim() != bg.dim() {
        return Err(Error::config("field and background dimensions differ"));
    }
    if !(t >= 0.0) {
        return Err(Error::contract(format!("Duhamel time must be nonnegative, got {t}")));
    }
    for s in &forcing.samples {
        phi0.check_same_shape(s)?;
    }
    let intervals = if t == 0.0 {
        0
    } else {
        if !(forcing.step > 0.0) {
            return Err(Error::contract("forcing sample step must be positive"));
        }
        let m = (t / forcing.step).round();
        if (m * forcing.step - t).abs() > 1e-9 * t || m < 2.0 {
            return Err(Error::contract(format!(
                "forcing grid with step {} does not resolve [0, {t}] in at least two intervals",
                forcing.step
            )));
        }
        m as usize
    };
    if forcing.samples.len() < intervals + 1 {
        return Err(Error::contract(format!(
            "forcing grid covers [0, {}] but t = {t}",
            forcing.step * forcing.samples.len().saturating_sub(1) as f64
        )));
    }
    let weights = if intervals > 0 {
        quadrature_weights(intervals)
    } else {
        Vec::new()
    };

    let b_tilde = bg.b_tilde();
    let mut out = SpectralField::zeros(grid, phi0.components());
    let mut lag_kernel = vec![0.0; intervals + 1];
    for idx in 0..grid.len() {
        let k = grid.wavevector(idx);
        let k2 = norm_sq(&k);
        let beta = coupling(&grid, &k, b_tilde);
        if idx == 0 {
            // φ'' = f at k = 0
            for c in 0..phi0.components() {
                let mut acc = phi0.component(c)[0] + phi1.component(c)[0] * t;
                for (j, w) in weights.iter().enumerate() {
                    let tau = j as f64 * forcing.step;
                    acc += forcing.samples[j].component(c)[0] * (w * forcing.step * (t - tau));
                }
                out.component_mut(c)[0] = acc;
            }
            continue;
        }
        let (a, d) = (0.5 * k2, beta * beta);
        let (l1, l2) = kernels(a, d, t);
        for (j, lk) in lag_kernel.iter_mut().enumerate() {
            let lag = (t - j as f64 * forcing.step).max(0.0);
            *lk = kernels(a, d, lag).1;
        }
        for c in 0..phi0.components() {
            let p0 = phi0.component(c)[idx];
            let p1 = phi1.component(c)[idx];
            let mut acc = p0 * l1 + (p1 + p0 * (0.5 * k2)) * l2;
            for (j, w) in weights.iter().enumerate() {
                acc += forcing.samples[j].component(c)[idx] * (w * forcing.step * lag_kernel[j]);
            }
            out.component_mut(c)[idx] = acc;
        }
    }
    Ok(out)
}
