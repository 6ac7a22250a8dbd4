//! Flat `key = value` experiment configuration.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Unknown keys, duplicate keys and malformed values are rejected with the
//! offending key named.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::diophantine::golden_vector;
use crate::error::{Error, Result};
use crate::propagator::Case;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    CheckDiophantine,
    ClassifySpectrum,
    VerifyKernels,
    LinearDecay,
    NonlinearRun,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::CheckDiophantine,
        ExperimentKind::ClassifySpectrum,
        ExperimentKind::VerifyKernels,
        ExperimentKind::LinearDecay,
        ExperimentKind::NonlinearRun,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::CheckDiophantine => "check-diophantine",
            ExperimentKind::ClassifySpectrum => "classify-spectrum",
            ExperimentKind::VerifyKernels => "verify-kernels",
            ExperimentKind::LinearDecay => "linear-decay",
            ExperimentKind::NonlinearRun => "nonlinear-run",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::config(format!("kind: unknown experiment {s:?}")))
    }
}

/// How the background vector was specified.
#[derive(Debug, Clone, PartialEq)]
pub enum BackgroundSpec {
    Golden,
    Explicit(Vec<f64>),
}

/// Validated configuration with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Spatial dimension.
    pub n: usize,
    /// Grid points per axis (nonlinear runs).
    pub grid_points: usize,
    pub background: BackgroundSpec,
    pub b_tilde: Vec<f64>,
    pub r: f64,
    /// Radius `|k|_∞ ≤ k_max` of the Diophantine certification.
    pub k_max: usize,
    pub case: Case,
    pub dt: f64,
    pub horizon: f64,
    pub record_stride: usize,
    pub cfl_guard: f64,
    pub project_b: bool,
    pub amplitude: f64,
    pub shell_max: f64,
    pub slope: f64,
    /// Sobolev index of the amplitude normalization.
    pub m: f64,
    /// Sobolev indices of the tracked norms.
    pub alpha: Vec<f64>,
    /// Regularity of the linear-decay initial spectrum.
    pub s: f64,
    pub lyapunov_s: f64,
    /// `|k|_∞` band of the linear-decay data and of spectrum/kernel tables.
    pub band: usize,
    pub samples: usize,
    pub times: Vec<f64>,
    pub t_max: f64,
    pub fit_window: Option<(f64, f64)>,
    pub seed: u64,
    pub out: PathBuf,
}

const KEYS: &[&str] = &[
    "kind",
    "n",
    "N",
    "b",
    "r",
    "k_max",
    "case",
    "dt",
    "T",
    "record_stride",
    "cfl_guard",
    "project_b",
    "amplitude",
    "shell_max",
    "slope",
    "m",
    "alpha",
    "s",
    "lyapunov_s",
    "band",
    "samples",
    "times",
    "t_max",
    "fit_min",
    "fit_max",
    "seed",
    "out",
];

fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(format!("line {}: expected key = value, got {raw:?}", lineno + 1)))?;
        let key = key.trim();
        let value = value.trim();
        if !KEYS.contains(&key) {
            return Err(Error::config(format!("{key}: unknown key (line {})", lineno + 1)));
        }
        if value.is_empty() {
            return Err(Error::config(format!("{key}: empty value (line {})", lineno + 1)));
        }
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return Err(Error::config(format!("{key}: given more than once")));
        }
    }
    Ok(map)
}

fn scalar<T: FromStr>(map: &BTreeMap<String, String>, key: &str, default: T) -> Result<T> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|_| Error::config(format!("{key}: cannot parse {v:?}"))),
    }
}

fn list(map: &BTreeMap<String, String>, key: &str, default: &[f64]) -> Result<Vec<f64>> {
    match map.get(key) {
        None => Ok(default.to_vec()),
        Some(v) => v
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| Error::config(format!("{key}: cannot parse {x:?}"))))
            .collect(),
    }
}

fn check(ok: bool, key: &str, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(format!("{key}: {}", msg())))
    }
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let map = parse_pairs(text)?;
        let kind: ExperimentKind = map
            .get("kind")
            .ok_or_else(|| Error::config("kind: missing required key"))?
            .parse()?;

        let n: usize = scalar(&map, "n", 2)?;
        check(n == 2 || n == 3, "n", || format!("dimension must be 2 or 3, got {n}"))?;

        let grid_points: usize = scalar(&map, "N", 0)?;
        if kind == ExperimentKind::NonlinearRun {
            check(map.contains_key("N"), "N", || "missing required key for nonlinear-run".into())?;
            check(grid_points >= 8 && grid_points.is_multiple_of(2), "N", || {
                format!("grid size must be even and at least 8, got {grid_points}")
            })?;
        }

        let (background, b_tilde) = match map.get("b").map(String::as_str) {
            None | Some("golden") => (BackgroundSpec::Golden, golden_vector(n)?),
            Some(v) => {
                let b = list(&map, "b", &[])?;
                check(b.len() == n, "b", || format!("{v:?} has {} components, expected {n}", b.len()))?;
                check(b.iter().all(|x| x.is_finite()), "b", || "components must be finite".into())?;
                (BackgroundSpec::Explicit(b.clone()), b)
            }
        };

        let r: f64 = scalar(&map, "r", 1.1)?;
        check(r > (n - 1) as f64 && r.is_finite(), "r", || format!("r = {r} must exceed n - 1 = {}", n - 1))?;

        let k_max: usize = scalar(&map, "k_max", 64)?;
        check(k_max >= 1, "k_max", || "must be at least 1".into())?;

        let case = match map.get("case").map(String::as_str) {
            None => Case::MagneticDiffusion,
            Some(v) => {
                let c = list(&map, "case", &[])?;
                check(c.len() == 2, "case", || format!("expected mu,nu, got {v:?}"))?;
                Case::from_coefficients(c[0], c[1]).map_err(|_| Error::config(format!("case: {v:?} is neither 0,1 nor 1,0")))?
            }
        };

        let dt: f64 = scalar(&map, "dt", 1e-3)?;
        check(dt > 0.0 && dt.is_finite(), "dt", || format!("must be positive, got {dt}"))?;
        let horizon: f64 = scalar(&map, "T", 1.0)?;
        check(horizon >= 0.0 && horizon.is_finite(), "T", || format!("must be nonnegative, got {horizon}"))?;
        let record_stride: usize = scalar(&map, "record_stride", 100)?;
        check(record_stride >= 1, "record_stride", || "must be at least 1".into())?;
        let cfl_guard: f64 = scalar(&map, "cfl_guard", 1.0)?;
        check(cfl_guard > 0.0, "cfl_guard", || format!("must be positive, got {cfl_guard}"))?;
        let project_b: bool = scalar(&map, "project_b", true)?;

        let amplitude: f64 = scalar(&map, "amplitude", 1e-2)?;
        check(amplitude >= 0.0 && amplitude.is_finite(), "amplitude", || format!("must be nonnegative, got {amplitude}"))?;
        let shell_max: f64 = scalar(&map, "shell_max", 4.0)?;
        check(shell_max >= 1.0, "shell_max", || format!("must be at least 1, got {shell_max}"))?;
        if kind == ExperimentKind::NonlinearRun {
            let cutoff = (grid_points / 3) as f64;
            check(shell_max <= cutoff, "shell_max", || format!("{shell_max} exceeds the dealiasing cutoff {cutoff}"))?;
        }
        let slope: f64 = scalar(&map, "slope", 3.0)?;
        let m: f64 = scalar(&map, "m", (3.0 * (r + 1.0)).floor() + 1.0)?;
        check(m >= 0.0, "m", || format!("must be nonnegative, got {m}"))?;

        let alpha = list(&map, "alpha", &[2.0])?;
        check(!alpha.is_empty() && alpha.iter().all(|a| *a >= 0.0), "alpha", || "indices must be nonnegative".into())?;
        let s: f64 = scalar(&map, "s", 5.0)?;
        if kind == ExperimentKind::LinearDecay {
            check(alpha.iter().all(|a| *a <= s), "alpha", || format!("indices must not exceed s = {s}"))?;
        }
        let lyapunov_s: f64 = scalar(&map, "lyapunov_s", 2.0 * r)?;
        check(lyapunov_s >= 0.0, "lyapunov_s", || "must be nonnegative".into())?;

        let band: usize = scalar(
            &map,
            "band",
            match kind {
                ExperimentKind::LinearDecay => 512,
                _ => 32,
            },
        )?;
        check(band >= 1, "band", || "must be at least 1".into())?;
        let samples: usize = scalar(&map, "samples", 161)?;
        check(samples >= 8, "samples", || format!("need at least 8, got {samples}"))?;
        let times = list(&map, "times", &[0.0, 0.01, 0.1, 1.0, 10.0, 100.0])?;
        check(times.iter().all(|t| *t >= 0.0 && t.is_finite()), "times", || "must be finite and nonnegative".into())?;
        let t_max: f64 = scalar(&map, "t_max", 1e4)?;
        check(t_max > 0.0 && t_max.is_finite(), "t_max", || format!("must be positive, got {t_max}"))?;

        let fit_window = match (map.get("fit_min"), map.get("fit_max")) {
            (None, None) => None,
            (Some(_), Some(_)) => {
                let lo: f64 = scalar(&map, "fit_min", 0.0)?;
                let hi: f64 = scalar(&map, "fit_max", 0.0)?;
                check(lo >= 0.0 && hi > lo, "fit_max", || format!("window [{lo}, {hi}] is empty"))?;
                Some((lo, hi))
            }
            (Some(_), None) => return Err(Error::config("fit_max: required when fit_min is given")),
            (None, Some(_)) => return Err(Error::config("fit_min: required when fit_max is given")),
        };

        let seed: u64 = scalar(&map, "seed", 0)?;
        let out = PathBuf::from(map.get("out").cloned().unwrap_or_else(|| format!("out/{}", kind.name())));

        Ok(Self {
            kind,
            n,
            grid_points,
            background,
            b_tilde,
            r,
            k_max,
            case,
            dt,
            horizon,
            record_stride,
            cfl_guard,
            project_b,
            amplitude,
            shell_max,
            slope,
            m,
            alpha,
            s,
            lyapunov_s,
            band,
            samples,
            times,
            t_max,
            fit_window,
            seed,
            out,
        })
    }

    /// Effective configuration in the input format; parsing it gives `self` back.
    pub fn echo(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",");
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("kind", self.kind.name().into());
        put("n", self.n.to_string());
        if self.grid_points > 0 {
            put("N", self.grid_points.to_string());
        }
        put(
            "b",
            match &self.background {
                BackgroundSpec::Golden => "golden".into(),
                BackgroundSpec::Explicit(b) => join(b),
            },
        );
        put("r", format!("{:?}", self.r));
        put("k_max", self.k_max.to_string());
        put("case", format!("{},{}", self.case.mu(), self.case.nu()));
        put("dt", format!("{:?}", self.dt));
        put("T", format!("{:?}", self.horizon));
        put("record_stride", self.record_stride.to_string());
        put("cfl_guard", format!("{:?}", self.cfl_guard));
        put("project_b", self.project_b.to_string());
        put("amplitude", format!("{:?}", self.amplitude));
        put("shell_max", format!("{:?}", self.shell_max));
        put("slope", format!("{:?}", self.slope));
        put("m", format!("{:?}", self.m));
        put("alpha", join(&self.alpha));
        put("s", format!("{:?}", self.s));
        put("lyapunov_s", format!("{:?}", self.lyapunov_s));
        put("band", self.band.to_string());
        put("samples", self.samples.to_string());
        put("times", join(&self.times));
        put("t_max", format!("{:?}", self.t_max));
        if let Some((lo, hi)) = self.fit_window {
            put("fit_min", format!("{lo:?}"));
            put("fit_max", format!("{hi:?}"));
        }
        put("seed", self.seed.to_string());
        put("out", self.out.display().to_string());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = ExperimentConfig::parse("kind = nonlinear-run\nN = 32\n").unwrap();
        assert_eq!(cfg.dt, 1e-3);
        assert_eq!(cfg.r, 1.1);
        assert_eq!(cfg.background, BackgroundSpec::Golden);
        assert!((cfg.b_tilde[1] - 1.618_033_988_7).abs() < 1e-10);
        assert_eq!(cfg.b_tilde[0], 1.0);
        assert_eq!(cfg.case, Case::MagneticDiffusion);
        assert_eq!(cfg.seed, 0);
    }

    #[test]
    fn small_exponent_is_rejected() {
        let err = ExperimentConfig::parse("kind = check-diophantine\nr = 0.5\n").unwrap_err();
        assert!(matches!(&err, Error::Config(m) if m.starts_with("r:")), "{err}");
    }

    #[test]
    fn errors_name_the_key() {
        for (text, key) in [
            ("kind = linear-decay\nbogus = 1\n", "bogus"),
            ("kind = linear-decay\ndt = fast\n", "dt"),
            ("kind = nonlinear-run\n", "N"),
            ("n = 2\n", "kind"),
            ("kind = verify-kernels\ncase = 1,1\n", "case"),
            ("kind = verify-kernels\nb = 1,2,3\n", "b"),
            ("kind = verify-kernels\ndt = 1\ndt = 2\n", "dt"),
        ] {
            match ExperimentConfig::parse(text) {
                Err(Error::Config(m)) => assert!(m.starts_with(&format!("{key}:")), "{m}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
        assert!(ExperimentConfig::parse("kind = linear-decay\njust text\n").is_err());
    }

    #[test]
    fn comments_and_explicit_background() {
        let cfg = ExperimentConfig::parse("# header\nkind = check-diophantine # trailing\n\nb = 1, 1\nr = 1.5\n").unwrap();
        assert_eq!(cfg.b_tilde, vec![1.0, 1.0]);
        let golden3 = ExperimentConfig::parse("kind = verify-kernels\nn = 3\nr = 2.5\n").unwrap();
        assert_eq!(golden3.b_tilde.len(), 3);
    }

    #[test]
    fn echo_round_trips() {
        let cfg = ExperimentConfig::parse(
            "kind = linear-decay\nalpha = 1,2\nfit_min = 100\nfit_max = 1000\nb = 1,1.5\ncase = 1,0\nseed = 9\n",
        )
        .unwrap();
        assert_eq!(ExperimentConfig::parse(&cfg.echo()).unwrap(), cfg);
        let golden = ExperimentConfig::parse("kind = nonlinear-run\nN = 16\n").unwrap();
        assert_eq!(ExperimentConfig::parse(&golden.echo()).unwrap(), golden);
    }
}
