//! Norm time series, the Lyapunov functional and decay measurements.

use std::io::Write;

use num_complex::Complex64;

use crate::diophantine::BackgroundField;
use crate::error::{Error, Result};
use crate::solver::{EnergyBudget, SimState};
use crate::spectral::{dot, norm_sq, sobolev_norm, Sobolev, SpectralField};

/// Sampled nonnegative quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct NormSeries {
    pub label: String,
    times: Vec<f64>,
    values: Vec<f64>,
}

impl NormSeries {
    pub fn new(label: impl Into<String>, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let label = label.into();
        if times.len() != values.len() {
            return Err(Error::contract(format!("series {label}: {} times but {} values", times.len(), values.len())));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::contract(format!("series {label}: times must be strictly increasing")));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::contract(format!("series {label}: values must be finite and nonnegative")));
        }
        Ok(Self { label, times, values })
    }

    pub fn empty(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            times: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Appends a sample, keeping the invariants.
    pub fn push(&mut self, t: f64, value: f64) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(Error::contract(format!("series {}: time {t} does not follow {last}", self.label)));
            }
        }
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::contract(format!("series {}: bad value {value} at t = {t}", self.label)));
        }
        self.times.push(t);
        self.values.push(value);
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Least-squares power law `value ≈ amplitude · (1+t)^exponent`, in logs.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub exponent: f64,
    /// Intercept `log(value)` at `t = 0`.
    pub amplitude: f64,
    pub window: (f64, f64),
    /// RMS of the log-space residuals.
    pub residual: f64,
    pub samples: usize,
    /// Local slopes over four sub-windows keep steepening: faster than any power.
    pub super_algebraic: bool,
}

fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    (slope, intercept, (rss / n).sqrt())
}

/// Default window: the last half-decade of `log10(1+t)`.
pub fn default_fit_window(series: &NormSeries) -> Option<(f64, f64)> {
    let t_max = *series.times().last()?;
    let lo = (10f64.powf((1.0 + t_max).log10() - 0.5) - 1.0).max(series.times()[0]);
    Some((lo, t_max))
}

/// Fits the decay exponent over `window` (default: last half-decade).
pub fn fit_decay_exponent(series: &NormSeries, window: Option<(f64, f64)>) -> Result<DecayFit> {
    let window = match window {
        Some(w) => w,
        None => default_fit_window(series).ok_or_else(|| Error::contract("cannot fit an empty series"))?,
    };
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (&t, &v) in series.times().iter().zip(series.values()) {
        if t < window.0 || t > window.1 {
            continue;
        }
        if !(v > 0.0) {
            return Err(Error::contract(format!("series {}: nonpositive value {v} at t = {t}", series.label)));
        }
        x.push((1.0 + t).ln());
        y.push(v.ln());
    }
    if x.len() < 8 {
        return Err(Error::contract(format!(
            "series {}: {} samples in [{}, {}], need at least 8",
            series.label,
            x.len(),
            window.0,
            window.1
        )));
    }
    let (exponent, amplitude, residual) = line_fit(&x, &y);

    let (x0, x1) = (x[0], x[x.len() - 1]);
    let mut slopes = Vec::with_capacity(4);
    for part in 0..4 {
        let lo = x0 + (x1 - x0) * part as f64 / 4.0;
        let hi = x0 + (x1 - x0) * (part + 1) as f64 / 4.0;
        let idx: Vec<usize> = (0..x.len()).filter(|&i| x[i] >= lo && x[i] <= hi).collect();
        if idx.len() < 2 {
            break;
        }
        let xs: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
        let ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
        slopes.push(line_fit(&xs, &ys).0);
    }
    let super_algebraic = slopes.len() == 4
        && slopes.windows(2).all(|w| w[1] < w[0])
        && slopes[3] < slopes[0] - 0.1 * slopes[0].abs().max(1.0);

    Ok(DecayFit {
        exponent,
        amplitude,
        window,
        residual,
        samples: x.len(),
        super_algebraic,
    })
}

/// Observed constant `C = max value·(1+t)^p` and whether the running maximum
/// is reached before the final 20% of the time window.
pub fn decay_bound_check(series: &NormSeries, p: f64) -> Result<(f64, bool)> {
    if !(p >= 0.0) {
        return Err(Error::contract(format!("decay rate must be nonnegative, got {p}")));
    }
    let mut best = f64::NEG_INFINITY;
    let mut at = f64::NAN;
    for (&t, &v) in series.times().iter().zip(series.values()) {
        let c = v * (1.0 + t).powf(p);
        if c > best {
            best = c;
            at = t;
        }
    }
    if series.is_empty() {
        return Ok((0.0, true));
    }
    let (t0, t1) = (series.times()[0], series.times()[series.len() - 1]);
    let cutoff = t0 + 0.8 * (t1 - t0);
    let ok = best.is_finite() && (at < cutoff || t1 == t0);
    Ok((best, ok))
}

/// `max_n |E_{n+1} − E_n + Δt (D_n + D_{n+1})/2| / E_n` with trapezoidal dissipation.
pub fn energy_balance_residual(energy: &NormSeries, dissipation: &NormSeries) -> Result<f64> {
    if energy.times() != dissipation.times() {
        return Err(Error::contract("energy and dissipation must share sample times"));
    }
    let (e, d, t) = (energy.values(), dissipation.values(), energy.times());
    let mut worst = 0.0f64;
    for n in 0..e.len().saturating_sub(1) {
        let dt = t[n + 1] - t[n];
        let residual = (e[n + 1] - e[n] + 0.5 * dt * (d[n] + d[n + 1])).abs();
        if residual == 0.0 {
            continue;
        }
        worst = worst.max(residual / e[n]);
    }
    Ok(worst)
}

/// Residual of a solver budget.
pub fn budget_residual(budget: &EnergyBudget) -> Result<f64> {
    energy_balance_residual(
        &NormSeries::new("energy", budget.times.clone(), budget.energy.clone())?,
        &NormSeries::new("dissipation", budget.times.clone(), budget.dissipation.clone())?,
    )
}

/// Parameters of `F = A(‖Λ^{s/2+1}u‖² + ‖Λ^{s/2+1}b‖²) − ∫(b̃·∇u)·Λ^s b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovConfig {
    pub s: f64,
    pub a: f64,
}

impl LyapunovConfig {
    /// `s = 2r`, `A = |b̃|/2 + 1`.
    pub fn for_background(bg: &BackgroundField) -> Self {
        Self {
            s: 2.0 * bg.r(),
            a: bg.magnitude() / 2.0 + 1.0,
        }
    }

    pub fn with_s(bg: &BackgroundField, s: f64) -> Result<Self> {
        let cfg = Self { s, ..Self::for_background(bg) };
        cfg.validate(bg)?;
        Ok(cfg)
    }

    pub fn validate(&self, bg: &BackgroundField) -> Result<()> {
        if !(self.a > bg.magnitude() / 2.0) {
            return Err(Error::config(format!("Lyapunov weight A = {} must exceed |b|/2 = {}", self.a, bg.magnitude() / 2.0)));
        }
        if !(self.s >= 0.0) {
            return Err(Error::config(format!("Lyapunov index s must be nonnegative, got {}", self.s)));
        }
        Ok(())
    }
}

/// `Σ_k Σ_c i(b̃·k) û_c(k) conj(|k|^s b̂_c(k))`, before taking the real part.
pub fn cross_term_sum(u: &SpectralField, b: &SpectralField, b_tilde: &[f64], s: f64) -> Result<Complex64> {
    u.check_same_shape(b)?;
    let grid = *u.grid();
    let mut total = Complex64::new(0.0, 0.0);
    for idx in 1..grid.len() {
        let k = grid.wavevector(idx);
        if grid.is_nyquist(&k) {
            continue;
        }
        let beta = dot(b_tilde, &k);
        let w = norm_sq(&k).powf(0.5 * s);
        let mut acc = Complex64::new(0.0, 0.0);
        for c in 0..u.components() {
            acc += u.component(c)[idx] * b.component(c)[idx].conj();
        }
        total += Complex64::new(0.0, beta * w) * acc;
    }
    Ok(total)
}

/// `∫(b̃·∇u)·Λ^s b dx` in coefficient form.
pub fn cross_term(state: &SimState, s: f64) -> f64 {
    cross_term_sum(&state.u_hat, &state.b_hat, state.bg.b_tilde(), s)
        .map(|z| z.re)
        .unwrap_or(f64::NAN)
}

/// `‖Λ^{s/2+1}u‖² + ‖Λ^{s/2+1}b‖²`.
pub fn lyapunov_energy(state: &SimState, s: f64) -> f64 {
    let nu = sobolev_norm(&state.u_hat, 0.5 * s + 1.0, Sobolev::Homogeneous);
    let nb = sobolev_norm(&state.b_hat, 0.5 * s + 1.0, Sobolev::Homogeneous);
    nu * nu + nb * nb
}

pub fn lyapunov_value(state: &SimState, cfg: &LyapunovConfig) -> f64 {
    cfg.a * lyapunov_energy(state, cfg.s) - cross_term(state, cfg.s)
}

/// `‖u‖_{H^α} + ‖b‖_{H^α}` with the inhomogeneous weight.
pub fn combined_norm(u: &SpectralField, b: &SpectralField, alpha: f64) -> f64 {
    sobolev_norm(u, alpha, Sobolev::Inhomogeneous) + sobolev_norm(b, alpha, Sobolev::Inhomogeneous)
}

/// Largest relative step increase `(F_{n+1} − F_n)/F_n` over samples with
/// `t ≥ t_from`; nonpositive when `F` is non-increasing there.
pub fn max_relative_increase(series: &NormSeries, t_from: f64) -> f64 {
    let (t, v) = (series.times(), series.values());
    let mut worst = f64::NEG_INFINITY;
    for n in 0..v.len().saturating_sub(1) {
        if t[n] < t_from || v[n] == 0.0 {
            continue;
        }
        worst = worst.max((v[n + 1] - v[n]) / v[n]);
    }
    worst
}

/// Series recorded along a nonlinear run.
#[derive(Debug, Clone)]
pub struct Monitor {
    pub lyapunov: LyapunovConfig,
    pub norm_index: f64,
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub norm: Vec<f64>,
    pub functional: Vec<f64>,
    pub cross: Vec<f64>,
    pub divergence: Vec<f64>,
    pub mean: Vec<f64>,
}

impl Monitor {
    pub fn new(lyapunov: LyapunovConfig, norm_index: f64) -> Self {
        Self {
            lyapunov,
            norm_index,
            times: Vec::new(),
            energy: Vec::new(),
            norm: Vec::new(),
            functional: Vec::new(),
            cross: Vec::new(),
            divergence: Vec::new(),
            mean: Vec::new(),
        }
    }

    pub fn record(&mut self, state: &SimState) {
        let cross = cross_term(state, self.lyapunov.s);
        let inv = state.invariants();
        self.times.push(state.t);
        self.energy.push(state.energy());
        self.norm.push(combined_norm(&state.u_hat, &state.b_hat, self.norm_index));
        self.functional.push(self.lyapunov.a * lyapunov_energy(state, self.lyapunov.s) - cross);
        self.cross.push(cross);
        self.divergence.push(inv.divergence);
        self.mean.push(inv.mean);
    }

    pub fn norm_series(&self) -> Result<NormSeries> {
        NormSeries::new(format!("H^{}", self.norm_index), self.times.clone(), self.norm.clone())
    }

    pub fn functional_series(&self) -> Result<NormSeries> {
        NormSeries::new("F", self.times.clone(), self.functional.clone())
    }

    pub fn header(&self) -> Vec<String> {
        ["t", "energy", &format!("norm_H{}", self.norm_index), "F", "cross", "divergence", "mean"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let rows = (0..self.times.len()).map(|i| {
            vec![
                self.times[i],
                self.energy[i],
                self.norm[i],
                self.functional[i],
                self.cross[i],
                self.divergence[i],
                self.mean[i],
            ]
        });
        write_csv(out, &self.header(), rows.map(|r| r.into_iter().map(fmt_value).collect()))
    }
}

/// Decimal with 17 significant digits.
pub fn fmt_value(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header line then one comma-separated row per item.
pub fn write_csv(mut out: impl Write, header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diophantine::golden_vector;
    use crate::propagator::Case;
    use crate::solver::{random_state, InitialData};
    use crate::spectral::TorusGrid;
    use proptest::prelude::*;

    const PHI: f64 = 1.618_033_988_749_895;

    fn power_series(p: f64, t_max: f64, count: usize) -> NormSeries {
        let times: Vec<f64> = (0..count).map(|i| t_max * i as f64 / (count - 1) as f64).collect();
        let values = times.iter().map(|t| (1.0 + t).powf(-p)).collect();
        NormSeries::new("power", times, values).unwrap()
    }

    fn golden_bg() -> BackgroundField {
        BackgroundField::certify(&golden_vector(2).unwrap(), 1.1, 8).unwrap()
    }

    fn state(seed: u64) -> SimState {
        let grid = TorusGrid::new(2, 16).unwrap();
        random_state(grid, Case::MagneticDiffusion, golden_bg(), &InitialData { seed, amplitude: 1.0, ..InitialData::default() }).unwrap()
    }

    #[test]
    fn series_invariants_are_enforced() {
        assert!(NormSeries::new("x", vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(NormSeries::new("x", vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
        let mut s = NormSeries::empty("x");
        s.push(0.0, 1.0).unwrap();
        assert!(s.push(0.0, 1.0).is_err());
    }

    #[test]
    fn exact_power_law_fit() {
        let fit = fit_decay_exponent(&power_series(1.5, 100.0, 200), None).unwrap();
        assert!((fit.exponent + 1.5).abs() < 1e-6);
        assert!(fit.residual < 1e-10);
        assert!(!fit.super_algebraic);
        let flat = NormSeries::new("c", (0..20).map(f64::from).collect(), vec![3.0; 20]).unwrap();
        assert!(fit_decay_exponent(&flat, None).unwrap().exponent.abs() < 1e-12);
    }

    #[test]
    fn exponential_decay_is_flagged() {
        let times: Vec<f64> = (0..=90).map(|i| 10.0 + i as f64).collect();
        let values = times.iter().map(|t| (-t).exp()).collect();
        let s = NormSeries::new("exp", times, values).unwrap();
        let fit = fit_decay_exponent(&s, Some((10.0, 100.0))).unwrap();
        assert!(fit.exponent < -5.0);
        assert!(fit.super_algebraic);
    }

    #[test]
    fn fit_contracts() {
        let s = NormSeries::new("z", (0..20).map(f64::from).collect(), vec![0.0; 20]).unwrap();
        assert!(matches!(fit_decay_exponent(&s, Some((0.0, 19.0))), Err(Error::Contract(_))));
        let short = power_series(1.0, 10.0, 5);
        assert!(matches!(fit_decay_exponent(&short, Some((0.0, 10.0))), Err(Error::Contract(_))));
    }

    #[test]
    fn bound_check_examples() {
        let p = 0.7;
        let (c, ok) = decay_bound_check(&power_series(p, 100.0, 50), p).unwrap();
        assert!((c - 1.0).abs() < 1e-12 && ok);
        let (_, ok) = decay_bound_check(&power_series(p / 2.0, 100.0, 50), p).unwrap();
        assert!(!ok);
        assert!(decay_bound_check(&power_series(p, 100.0, 50), -1.0).is_err());
    }

    #[test]
    fn energy_residual_examples() {
        let zero = NormSeries::new("e", vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(energy_balance_residual(&zero, &zero).unwrap(), 0.0);
        // heat decay E = e^{-2qt}, D = 2qE
        let q = 2.0;
        let times: Vec<f64> = (0..=1000).map(|i| i as f64 * 1e-4).collect();
        let e: Vec<f64> = times.iter().map(|t| (-2.0 * q * t).exp()).collect();
        let d: Vec<f64> = e.iter().map(|x| 2.0 * q * x).collect();
        let res = energy_balance_residual(
            &NormSeries::new("e", times.clone(), e).unwrap(),
            &NormSeries::new("d", times, d).unwrap(),
        )
        .unwrap();
        assert!(res < 1e-8, "{res}");
    }

    #[test]
    fn cross_term_single_mode_by_hand() {
        // û = (0, α), b̂ = (0, β) at k = ±(1, 0): the two conjugate modes give
        // Re[i·1·αβ + i·(−1)·αβ] = 0 for real α, β; imaginary amplitudes give 2αβ.
        let grid = TorusGrid::new(2, 8).unwrap();
        let bg = golden_bg();
        let (alpha, beta) = (0.3, -0.7);
        let mut u = SpectralField::zeros_vector(grid);
        let mut b = SpectralField::zeros_vector(grid);
        u.set_mode(1, &[1, 0], Complex64::new(alpha, 0.0)).unwrap();
        b.set_mode(1, &[1, 0], Complex64::new(beta, 0.0)).unwrap();
        let s = SimState::new(0.0, u.clone(), b, Case::MagneticDiffusion, bg.clone()).unwrap();
        assert_eq!(cross_term(&s, 2.2), 0.0);

        let mut b = SpectralField::zeros_vector(grid);
        b.set_mode(1, &[1, 0], Complex64::new(0.0, beta)).unwrap();
        let s = SimState::new(0.0, u, b, Case::MagneticDiffusion, bg.clone()).unwrap();
        // i·α·conj(iβ) = αβ at k, and the same at −k
        assert!((cross_term(&s, 2.2) - 2.0 * alpha * beta).abs() < 1e-15);
        let cfg = LyapunovConfig::for_background(&bg);
        let expected = cfg.a * 2.0 * (alpha * alpha + beta * beta) - 2.0 * alpha * beta;
        assert!((lyapunov_value(&s, &cfg) - expected).abs() < 1e-14);
        assert!((cfg.a - ((1.0 + PHI * PHI).sqrt() / 2.0 + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn zero_fields_give_zero_cross_term() {
        let s = state(1);
        let mut z = s.clone();
        z.b_hat.scale(0.0);
        assert_eq!(cross_term(&z, 2.0), 0.0);
        let cfg = LyapunovConfig::for_background(&s.bg);
        assert!((lyapunov_value(&z, &cfg) - cfg.a * lyapunov_energy(&z, cfg.s)).abs() <= 1e-15 * lyapunov_value(&z, &cfg));
    }

    #[test]
    fn lyapunov_config_requires_large_weight() {
        let bg = golden_bg();
        let bad = LyapunovConfig { s: 2.2, a: 0.5 };
        assert!(bad.validate(&bg).is_err());
        assert!(LyapunovConfig::for_background(&bg).validate(&bg).is_ok());
        assert!((LyapunovConfig::for_background(&bg).s - 2.2).abs() < 1e-15);
    }

    #[test]
    fn csv_uses_seventeen_digits() {
        let mut out = Vec::new();
        write_csv(&mut out, &["t".into(), "v".into()], std::iter::once(vec![fmt_value(0.1), fmt_value(1.0 / 3.0)])).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "t,v\n1.0000000000000001e-1,3.3333333333333331e-1\n");
        let back: f64 = "3.3333333333333331e-1".parse().unwrap();
        assert_eq!(back, 1.0 / 3.0);
    }

    proptest! {
        #[test]
        fn functional_dominates_weighted_energy(seed in 0u64..500, s in 0.0f64..4.0) {
            let st = state(seed);
            let cfg = LyapunovConfig::with_s(&st.bg, s).unwrap();
            let f = lyapunov_value(&st, &cfg);
            let lower = lyapunov_energy(&st, s);
            prop_assert!(f - lower >= -1e-12 * f);
        }

        #[test]
        fn cross_term_is_real_and_bounded(seed in 0u64..500, s in 0.0f64..4.0) {
            let st = state(seed);
            let z = cross_term_sum(&st.u_hat, &st.b_hat, st.bg.b_tilde(), s).unwrap();
            let bound = st.bg.magnitude()
                * sobolev_norm(&st.u_hat, 0.5 * s + 1.0, Sobolev::Homogeneous)
                * sobolev_norm(&st.b_hat, 0.5 * s, Sobolev::Homogeneous);
            // the real part may cancel, so rounding is measured against the term magnitudes
            prop_assert!(z.im.abs() <= 1e-13 * bound.max(1e-300));
            prop_assert!(z.re.abs() <= bound * (1.0 + 1e-12));
        }

        #[test]
        fn cross_term_is_bilinear(seed in 0u64..200, a in -3.0f64..3.0, c in -3.0f64..3.0) {
            let st = state(seed);
            let mut scaled = st.clone();
            scaled.u_hat.scale(a);
            scaled.b_hat.scale(c);
            let lhs = cross_term(&scaled, 2.2);
            let rhs = a * c * cross_term(&st, 2.2);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300) + 1e-300);
        }

        #[test]
        fn fit_is_scale_invariant(p in 0.1f64..3.0, scale in 1e-6f64..1e6) {
            let base = power_series(p, 1000.0, 300);
            let scaled = NormSeries::new("s", base.times().to_vec(), base.values().iter().map(|v| v * scale).collect()).unwrap();
            let f0 = fit_decay_exponent(&base, None).unwrap();
            let f1 = fit_decay_exponent(&scaled, None).unwrap();
            prop_assert!((f0.exponent - f1.exponent).abs() <= 1e-9 * f0.exponent.abs().max(1.0));
            prop_assert!((f1.amplitude - f0.amplitude - scale.ln()).abs() <= 1e-9 * scale.ln().abs().max(1.0));
        }
    }
}
