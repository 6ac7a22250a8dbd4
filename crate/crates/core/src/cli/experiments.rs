//! The five experiments behind the command-line subcommands.
//!
//! Each experiment computes a typed outcome; [`run_experiment`] writes its
//! artifacts (CSV tables, `summary.txt`, `config.txt`) and reports checks.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{ExperimentConfig, ExperimentKind};
use crate::diagnostics::{
    budget_residual, combined_norm, decay_bound_check, fit_decay_exponent, fmt_value,
    max_relative_increase, write_csv, DecayFit, LyapunovConfig, Monitor, NormSeries,
};
use crate::diophantine::{
    discriminant, estimate_constant, shell_minima, BackgroundField, Certificate, Region, ShellMinimum,
};
use crate::error::{Error, Result};
use crate::propagator::{kernel_bound_check, mode_exponents, propagate_linear, KernelBound};
use crate::solver::{random_solenoidal, random_state, write_snapshot, InitialData, RunSummary, SimState, Solver, SolverConfig};
use crate::spectral::{SpectralField, TorusGrid, Wavevector};

/// A named pass/fail verdict with a short explanation.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Result of [`run_experiment`]: checks plus the summary lines written to disk.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub summary: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn put(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.summary {
            s.push_str(&format!("{k}: {v}\n"));
        }
        for c in &self.checks {
            s.push_str(&format!(
                "check.{}: {} ({})\n",
                c.name,
                if c.passed { "pass" } else { "fail" },
                c.detail
            ));
        }
        s.push_str(&format!("status: {}\n", if self.passed() { "pass" } else { "fail" }));
        s
    }
}

fn format_k(k: &[i64]) -> String {
    format!("({})", k.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
}

fn k_columns(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("k{i}")).collect()
}

/// Every `k` with `0 < |k|_∞ ≤ band`, in lexicographic order.
fn ball(n: usize, band: usize) -> impl Iterator<Item = Wavevector> {
    let b = band as i64;
    let side = 2 * band + 1;
    let total = side.pow(n as u32);
    (0..total).filter_map(move |mut i| {
        let mut k = [0i64; 3];
        for axis in (0..n).rev() {
            k[axis] = (i % side) as i64 - b;
            i /= side;
        }
        (k != [0; 3]).then_some(k)
    })
}

// check-diophantine

pub struct DiophantineOutcome {
    pub certificate: Certificate,
    pub shells: Vec<ShellMinimum>,
}

pub fn check_diophantine(cfg: &ExperimentConfig) -> Result<DiophantineOutcome> {
    Ok(DiophantineOutcome {
        certificate: estimate_constant(&cfg.b_tilde, cfg.r, cfg.k_max)?,
        shells: shell_minima(&cfg.b_tilde, cfg.r, cfg.k_max)?,
    })
}

fn report_diophantine(cfg: &ExperimentConfig, dir: &Path, report: &mut Report) -> Result<()> {
    let out = check_diophantine(cfg)?;
    let mut header = vec!["radius".to_string()];
    header.extend(k_columns(cfg.n));
    header.extend(["dot_abs", "norm", "weighted"].map(String::from));
    let rows = out.shells.iter().map(|m| {
        let mut row = vec![m.radius.to_string()];
        row.extend(m.k.iter().map(i64::to_string));
        row.extend([fmt_value(m.dot_abs), fmt_value(m.norm), fmt_value(m.weighted)]);
        row
    });
    write_csv(BufWriter::new(File::create(dir.join("shell_minima.csv"))?), &header, rows)?;
    report.put("c_hat", fmt_value(out.certificate.c_hat));
    report.put("argmin", format_k(&out.certificate.argmin));
    report.put("k_cert", cfg.k_max);
    report.checks.push(Check::new(
        "diophantine",
        out.certificate.c_hat > 0.0,
        format!("c_hat = {:e} at {}", out.certificate.c_hat, format_k(&out.certificate.argmin)),
    ));
    Ok(())
}

// classify-spectrum

fn report_spectrum(cfg: &ExperimentConfig, dir: &Path, report: &mut Report) -> Result<()> {
    let mut header = k_columns(cfg.n);
    header.extend(
        ["region", "discriminant", "regime", "lambda1_re", "lambda1_im", "lambda2_re", "lambda2_im"].map(String::from),
    );
    let mut counts = [0usize; 3];
    let mut rows = Vec::new();
    for k in ball(cfg.n, cfg.band) {
        let ks = &k[..cfg.n];
        let region = crate::diophantine::classify_mode(ks, &cfg.b_tilde)?;
        counts[region as usize] += 1;
        let m = mode_exponents(ks, &cfg.b_tilde)?;
        let mut row: Vec<String> = ks.iter().map(i64::to_string).collect();
        row.push(region.to_string());
        row.push(fmt_value(discriminant(&k, &cfg.b_tilde)));
        row.push(format!("{:?}", m.regime).to_lowercase());
        row.extend([m.lambda1.re, m.lambda1.im, m.lambda2.re, m.lambda2.im].map(fmt_value));
        rows.push(row);
    }
    write_csv(BufWriter::new(File::create(dir.join("spectrum.csv"))?), &header, rows.into_iter())?;
    report.put("band", cfg.band);
    for (region, count) in [Region::S1, Region::S2, Region::S3].iter().zip(counts) {
        report.put(&format!("count_{region}"), count);
    }
    Ok(())
}

// verify-kernels

pub struct KernelSuite {
    pub rows: Vec<(Wavevector, f64, KernelBound)>,
}

impl KernelSuite {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|(_, _, b)| !b.ok).count()
    }

    pub fn min_slack(&self) -> f64 {
        self.rows.iter().map(|(_, _, b)| b.slack).fold(f64::INFINITY, f64::min)
    }
}

pub fn verify_kernels(b_tilde: &[f64], band: usize, times: &[f64]) -> Result<KernelSuite> {
    let n = b_tilde.len();
    let mut rows = Vec::new();
    for k in ball(n, band) {
        for &t in times {
            rows.push((k, t, kernel_bound_check(&k[..n], b_tilde, t)?));
        }
    }
    Ok(KernelSuite { rows })
}

fn report_kernels(cfg: &ExperimentConfig, dir: &Path, report: &mut Report) -> Result<()> {
    let suite = verify_kernels(&cfg.b_tilde, cfg.band, &cfg.times)?;
    let mut header = k_columns(cfg.n);
    header.extend(["region", "t", "L1", "L2", "slack"].map(String::from));
    let rows = suite.rows.iter().map(|(k, t, b)| {
        let mut row: Vec<String> = k[..cfg.n].iter().map(i64::to_string).collect();
        row.push(b.region.to_string());
        row.extend([*t, b.l1, b.l2, b.slack].map(fmt_value));
        row
    });
    write_csv(BufWriter::new(File::create(dir.join("kernels.csv"))?), &header, rows)?;
    report.put("band", cfg.band);
    report.put("evaluations", suite.rows.len());
    report.put("min_slack", fmt_value(suite.min_slack()));
    report.checks.push(Check::new(
        "kernel_bounds",
        suite.failures() == 0,
        format!("{} of {} evaluations violate a bound", suite.failures(), suite.rows.len()),
    ));
    Ok(())
}

// linear-decay

pub struct LinearDecayOutcome {
    pub times: Vec<f64>,
    pub alpha: Vec<f64>,
    /// Predicted rate `p = (s − α)/(2 + 2r)` per index.
    pub rates: Vec<f64>,
    pub series: Vec<NormSeries>,
    pub fits: Vec<DecayFit>,
    pub bounds: Vec<(f64, bool)>,
}

/// `t = 0` followed by `samples − 1` log-spaced times ending at `t_max`.
pub fn log_times(t_max: f64, samples: usize) -> Vec<f64> {
    let lo = (t_max * 1e-6).log10();
    let hi = t_max.log10();
    let mut times = vec![0.0];
    for i in 0..samples - 1 {
        times.push(10f64.powf(lo + (hi - lo) * i as f64 / (samples - 2) as f64));
    }
    times
}

/// Solenoidal data with `|Û₀(k)| = |B̂₀(k)| = |k|^{-(s + n/2 + 0.1)}` on `|k|_∞ ≤ band`.
pub fn linear_decay_data(n: usize, band: usize, s: f64, seed: u64) -> Result<(SpectralField, SpectralField)> {
    let grid = TorusGrid::new(n, 2 * band + 2)?;
    let slope = s + n as f64 / 2.0 + 0.1;
    let b = band as i64;
    let keep = |k: &Wavevector| k.iter().all(|x| x.abs() <= b);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u0 = random_solenoidal(grid, keep, slope, &mut rng)?;
    let b0 = random_solenoidal(grid, keep, slope, &mut rng)?;
    Ok((u0, b0))
}

pub fn linear_decay(cfg: &ExperimentConfig) -> Result<LinearDecayOutcome> {
    let bg = BackgroundField::certify(&cfg.b_tilde, cfg.r, cfg.k_max)?;
    let (u0, b0) = linear_decay_data(cfg.n, cfg.band, cfg.s, cfg.seed)?;
    let times = log_times(cfg.t_max, cfg.samples);
    let mut values = vec![Vec::with_capacity(times.len()); cfg.alpha.len()];
    for &t in &times {
        let (u, b) = propagate_linear(&u0, &b0, &bg, t, cfg.case)?;
        for (a, vals) in cfg.alpha.iter().zip(values.iter_mut()) {
            vals.push(combined_norm(&u, &b, *a));
        }
    }
    let mut series = Vec::new();
    let mut fits = Vec::new();
    let mut bounds = Vec::new();
    let mut rates = Vec::new();
    for (a, vals) in cfg.alpha.iter().zip(values) {
        let p = (cfg.s - a) / (2.0 + 2.0 * cfg.r);
        let ser = NormSeries::new(format!("H^{a}"), times.clone(), vals)?;
        fits.push(fit_decay_exponent(&ser, cfg.fit_window)?);
        bounds.push(decay_bound_check(&ser, p)?);
        series.push(ser);
        rates.push(p);
    }
    Ok(LinearDecayOutcome {
        times,
        alpha: cfg.alpha.clone(),
        rates,
        series,
        fits,
        bounds,
    })
}

fn report_linear(cfg: &ExperimentConfig, dir: &Path, report: &mut Report) -> Result<()> {
    let out = linear_decay(cfg)?;
    let mut header = vec!["t".to_string()];
    header.extend(out.alpha.iter().map(|a| format!("norm_H{a}")));
    let rows = (0..out.times.len()).map(|i| {
        let mut row = vec![fmt_value(out.times[i])];
        row.extend(out.series.iter().map(|s| fmt_value(s.values()[i])));
        row
    });
    write_csv(BufWriter::new(File::create(dir.join("linear_decay.csv"))?), &header, rows)?;
    report.put("seed", cfg.seed);
    report.put("band", cfg.band);
    report.put("s", cfg.s);
    for (i, a) in out.alpha.iter().enumerate() {
        let (p, fit, (c, ok)) = (out.rates[i], &out.fits[i], out.bounds[i]);
        report.put(&format!("alpha_{a}.predicted_exponent"), fmt_value(-p));
        report.put(&format!("alpha_{a}.fitted_exponent"), fmt_value(fit.exponent));
        report.put(&format!("alpha_{a}.fit_window"), format!("[{}, {}]", fit.window.0, fit.window.1));
        report.put(&format!("alpha_{a}.fit_residual"), fmt_value(fit.residual));
        report.put(&format!("alpha_{a}.super_algebraic"), fit.super_algebraic);
        report.put(&format!("alpha_{a}.c_observed"), fmt_value(c));
        report.checks.push(Check::new(format!("alpha_{a}.bound"), ok, format!("C = {c:e}")));
        report.checks.push(Check::new(
            format!("alpha_{a}.tail_exponent"),
            fit.exponent <= -0.9 * p,
            format!("fitted {:.6} vs required <= {:.6}", fit.exponent, -0.9 * p),
        ));
    }
    Ok(())
}

// nonlinear-run

pub struct NonlinearOutcome {
    pub monitor: Monitor,
    pub summary: RunSummary,
    pub budget_residual: f64,
    pub initial_norm: f64,
    pub max_norm: f64,
    pub final_norm: f64,
    pub max_divergence: f64,
    pub max_mean: f64,
    /// Largest relative per-sample increase of `F` after 5% of the horizon.
    pub functional_increase: f64,
}

impl NonlinearOutcome {
    pub fn checks(&self) -> Vec<Check> {
        vec![
            Check::new(
                "energy_budget",
                self.budget_residual <= 1e-6,
                format!("max relative residual {:e}", self.budget_residual),
            ),
            Check::new(
                "invariants",
                self.max_divergence <= 1e-12 && self.max_mean <= 1e-12,
                format!("divergence {:e}, mean {:e}", self.max_divergence, self.max_mean),
            ),
            Check::new(
                "no_growth",
                self.max_norm <= 2.0 * self.initial_norm,
                format!("max {:e} vs initial {:e}", self.max_norm, self.initial_norm),
            ),
            Check::new(
                "final_below_initial",
                self.final_norm < self.initial_norm,
                format!("final {:e} vs initial {:e}", self.final_norm, self.initial_norm),
            ),
            Check::new(
                "functional_monotone",
                self.functional_increase <= 1e-4,
                format!("largest relative increase {:e}", self.functional_increase),
            ),
        ]
    }
}

pub fn initial_state(cfg: &ExperimentConfig) -> Result<SimState> {
    let grid = TorusGrid::new(cfg.n, cfg.grid_points)?;
    let bg = BackgroundField::certify(&cfg.b_tilde, cfg.r, cfg.k_max)?;
    let data = InitialData {
        amplitude: cfg.amplitude,
        shell_max: cfg.shell_max,
        slope: cfg.slope,
        sobolev_index: cfg.m,
        seed: cfg.seed,
    };
    random_state(grid, cfg.case, bg, &data)
}

pub fn solver_config(cfg: &ExperimentConfig) -> SolverConfig {
    SolverConfig {
        dt: cfg.dt,
        horizon: cfg.horizon,
        cfl_guard: cfg.cfl_guard,
        project_b: cfg.project_b,
        record_stride: cfg.record_stride,
        inviscid: false,
    }
}

pub fn nonlinear_run(cfg: &ExperimentConfig) -> Result<NonlinearOutcome> {
    let state0 = initial_state(cfg)?;
    let lyapunov = LyapunovConfig::with_s(&state0.bg, cfg.lyapunov_s)?;
    let mut monitor = Monitor::new(lyapunov, cfg.r + 1.0);
    let mut solver = Solver::new(*state0.grid(), solver_config(cfg))?;
    let summary = solver.run(&state0, &mut |s| {
        monitor.record(s);
        Ok(())
    })?;
    let residual = budget_residual(&summary.budget)?;
    let functional = monitor.functional_series()?;
    let increase = max_relative_increase(&functional, 0.05 * cfg.horizon).max(0.0);
    Ok(NonlinearOutcome {
        initial_norm: monitor.norm[0],
        max_norm: monitor.norm.iter().copied().fold(0.0, f64::max),
        final_norm: *monitor.norm.last().unwrap_or(&0.0),
        max_divergence: monitor.divergence.iter().copied().fold(0.0, f64::max),
        max_mean: monitor.mean.iter().copied().fold(0.0, f64::max),
        functional_increase: increase,
        budget_residual: residual,
        monitor,
        summary,
    })
}

fn report_nonlinear(cfg: &ExperimentConfig, dir: &Path, report: &mut Report) -> Result<()> {
    let out = nonlinear_run(cfg)?;
    out.monitor.write_csv(BufWriter::new(File::create(dir.join("nonlinear.csv"))?))?;
    write_snapshot(&out.summary.final_state, BufWriter::new(File::create(dir.join("final.snap"))?))?;
    report.put("seed", cfg.seed);
    report.put("steps", out.summary.steps);
    report.put("max_courant", fmt_value(out.summary.max_courant));
    report.put("c_hat", fmt_value(out.summary.final_state.bg.c_hat()));
    report.put("k_cert", cfg.k_max);
    report.put("energy_residual", fmt_value(out.budget_residual));
    report.put("norm_index", cfg.r + 1.0);
    report.put("initial_norm", fmt_value(out.initial_norm));
    report.put("max_norm", fmt_value(out.max_norm));
    report.put("final_norm", fmt_value(out.final_norm));
    report.put("functional_increase", fmt_value(out.functional_increase));
    if let Ok(fit) = out.monitor.norm_series().and_then(|s| fit_decay_exponent(&s, cfg.fit_window)) {
        report.put("fitted_exponent", fmt_value(fit.exponent));
    }
    report.checks.extend(out.checks());
    Ok(())
}

/// Runs the configured experiment inside `cfg.out`, writing the config echo,
/// CSV tables and `summary.txt`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    let dir = &cfg.out;
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.txt"), cfg.echo())?;
    let mut report = Report::default();
    report.put("kind", cfg.kind.name());
    report.put("b_tilde", format!("{:?}", cfg.b_tilde));
    report.put("r", cfg.r);
    report.put("case", cfg.case);
    let result = match cfg.kind {
        ExperimentKind::CheckDiophantine => report_diophantine(cfg, dir, &mut report),
        ExperimentKind::ClassifySpectrum => report_spectrum(cfg, dir, &mut report),
        ExperimentKind::VerifyKernels => report_kernels(cfg, dir, &mut report),
        ExperimentKind::LinearDecay => report_linear(cfg, dir, &mut report),
        ExperimentKind::NonlinearRun => report_nonlinear(cfg, dir, &mut report),
    };
    if let Err(e) = &result {
        report.put("error", e);
    }
    fs::write(dir.join("summary.txt"), report.render())?;
    result.map(|()| report)
}

/// Process exit code for an experiment result.
pub fn exit_code(result: &Result<Report>) -> i32 {
    match result {
        Ok(r) if r.passed() => 0,
        Ok(_) => 4,
        Err(Error::Config(_)) => 2,
        Err(Error::Divergence { .. } | Error::Cfl { .. }) => 3,
        Err(_) => 1,
    }
}
