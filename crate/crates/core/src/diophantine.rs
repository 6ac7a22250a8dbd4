//! Diophantine background fields: certification of the constant in
//! `|b̃·k| ≥ c / |k|^r`, the three-way frequency partition, and the
//! Poincaré-type inequality it implies.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::spectral::{dot, norm_sq, SpectralField, Wavevector};

/// Exhaustive minimum of `|b̃·k| |k|^r` over a finite frequency ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub c_hat: f64,
    /// Witnessing mode, in the half-space whose first nonzero entry is positive.
    pub argmin: Vec<i64>,
}

/// Minimum of the weighted small divisor on one shell `|k|_∞ = radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellMinimum {
    pub radius: usize,
    pub k: Vec<i64>,
    pub dot_abs: f64,
    pub norm: f64,
    pub weighted: f64,
}

/// Equilibrium magnetic vector with its exponent and empirically certified
/// Diophantine constant.
#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundField {
    b_tilde: Vec<f64>,
    r: f64,
    c_hat: f64,
    argmin: Vec<i64>,
    k_cert: usize,
}

impl BackgroundField {
    /// Certifies `b_tilde` over `0 < |k|_∞ ≤ k_cert`.
    pub fn certify(b_tilde: &[f64], r: f64, k_cert: usize) -> Result<Self> {
        let n = b_tilde.len();
        if !(r > n.saturating_sub(1) as f64) {
            return Err(Error::config(format!("Diophantine exponent r = {r} must exceed n - 1 = {}", n.saturating_sub(1))));
        }
        let cert = estimate_constant(b_tilde, r, k_cert)?;
        Ok(Self {
            b_tilde: b_tilde.to_vec(),
            r,
            c_hat: cert.c_hat,
            argmin: cert.argmin,
            k_cert,
        })
    }

    pub fn b_tilde(&self) -> &[f64] {
        &self.b_tilde
    }

    pub fn dim(&self) -> usize {
        self.b_tilde.len()
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn c_hat(&self) -> f64 {
        self.c_hat
    }

    pub fn argmin(&self) -> &[i64] {
        &self.argmin
    }

    pub fn k_cert(&self) -> usize {
        self.k_cert
    }

    /// Euclidean length `|b̃|`.
    pub fn magnitude(&self) -> f64 {
        self.b_tilde.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Errors unless the certified constant is strictly positive.
    pub fn require_diophantine(&self) -> Result<()> {
        if self.c_hat > 0.0 {
            Ok(())
        } else {
            Err(Error::contract(format!(
                "background {:?} is not Diophantine on |k|_inf <= {} (c_hat = 0 at {:?})",
                self.b_tilde, self.k_cert, self.argmin
            )))
        }
    }
}

fn validate(b_tilde: &[f64], r: f64) -> Result<()> {
    let n = b_tilde.len();
    if !(2..=3).contains(&n) {
        return Err(Error::config(format!("background must have 2 or 3 components, got {n}")));
    }
    if b_tilde.iter().any(|x| !x.is_finite()) {
        return Err(Error::config("background components must be finite"));
    }
    // the borderline r = n - 1 is allowed here: badly approximable vectors
    // such as the golden one have a positive constant there
    if !(r >= (n - 1) as f64) || !r.is_finite() {
        return Err(Error::config(format!("Diophantine exponent r = {r} must be at least n - 1 = {}", n - 1)));
    }
    Ok(())
}

/// Visits every `k` with `0 < |k|_∞ ≤ k_max` whose first nonzero entry is
/// positive, in lexicographic order. The weighted divisor is even in `k`, so
/// this half covers the ball.
fn for_each_half_space(dim: usize, k_max: i64, mut visit: impl FnMut(&Wavevector)) {
    let mut k = [0i64; 3];
    match dim {
        2 => {
            for k0 in 0..=k_max {
                for k1 in -k_max..=k_max {
                    if k0 == 0 && k1 <= 0 {
                        continue;
                    }
                    k[0] = k0;
                    k[1] = k1;
                    visit(&k);
                }
            }
        }
        3 => {
            for k0 in 0..=k_max {
                for k1 in -k_max..=k_max {
                    if k0 == 0 && k1 < 0 {
                        continue;
                    }
                    for k2 in -k_max..=k_max {
                        if k0 == 0 && k1 == 0 && k2 <= 0 {
                            continue;
                        }
                        k[0] = k0;
                        k[1] = k1;
                        k[2] = k2;
                        visit(&k);
                    }
                }
            }
        }
        _ => unreachable!("dimension validated by caller"),
    }
}

/// Minimum of the weighted divisor on every shell `1..=k_max`.
pub fn shell_minima(b_tilde: &[f64], r: f64, k_max: usize) -> Result<Vec<ShellMinimum>> {
    validate(b_tilde, r)?;
    if k_max < 1 {
        return Err(Error::config("K_max must be at least 1"));
    }
    let dim = b_tilde.len();
    let mut best: Vec<Option<(f64, Wavevector)>> = vec![None; k_max + 1];
    for_each_half_space(dim, k_max as i64, |k| {
        let radius = k[..dim].iter().map(|x| x.unsigned_abs() as usize).max().unwrap_or(0);
        let weighted = dot(b_tilde, k).abs() * norm_sq(k).powf(0.5 * r);
        let slot = &mut best[radius];
        // visiting order is lexicographic, so strict `<` keeps the smallest k on ties
        if slot.is_none_or(|(v, _)| weighted < v) {
            *slot = Some((weighted, *k));
        }
    });
    Ok(best
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(radius, slot)| {
            let (weighted, k) = slot.expect("every shell holds a half-space mode");
            ShellMinimum {
                radius,
                k: k[..dim].to_vec(),
                dot_abs: dot(b_tilde, &k).abs(),
                norm: norm_sq(&k).sqrt(),
                weighted,
            }
        })
        .collect())
}

/// `ĉ = min |b̃·k| |k|^r` over `0 < |k|_∞ ≤ k_max` (Euclidean `|k|`), with the
/// lexicographically smallest witness among modes normalized so that their
/// first nonzero entry is positive.
pub fn estimate_constant(b_tilde: &[f64], r: f64, k_max: usize) -> Result<Certificate> {
    let shells = shell_minima(b_tilde, r, k_max)?;
    let best = shells
        .into_iter()
        .min_by(|a, b| match a.weighted.partial_cmp(&b.weighted) {
            Some(Ordering::Equal) | None => a.k.cmp(&b.k),
            Some(ord) => ord,
        })
        .expect("k_max >= 1 yields at least one shell");
    Ok(Certificate {
        c_hat: best.weighted,
        argmin: best.k,
    })
}

/// Frequency regions by the discriminant `D = 1 - 4 (b̃·k)² / |k|⁴`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// `D ≤ 0`: oscillatory, both roots share real part `-|k|²/2`.
    S1,
    /// `0 < D ≤ 1/4`
    S2,
    /// `D > 1/4`: one root may approach zero.
    S3,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::S1 => "S1",
            Region::S2 => "S2",
            Region::S3 => "S3",
        })
    }
}

pub fn discriminant(k: &Wavevector, b_tilde: &[f64]) -> f64 {
    let k2 = norm_sq(k);
    let bk = dot(b_tilde, k);
    1.0 - 4.0 * bk * bk / (k2 * k2)
}

pub(crate) fn to_wavevector(k: &[i64], dim: usize) -> Result<Wavevector> {
    if k.len() != dim {
        return Err(Error::config(format!(
            "wavevector {k:?} does not have {dim} components"
        )));
    }
    let mut out = [0i64; 3];
    out[..dim].copy_from_slice(k);
    Ok(out)
}

/// Region of a nonzero frequency. Ties: `D = 0 → S1`, `D = 1/4 → S2`.
pub fn classify_mode(k: &[i64], b_tilde: &[f64]) -> Result<Region> {
    let kv = to_wavevector(k, b_tilde.len())?;
    if kv == [0; 3] {
        return Err(Error::contract("the zero frequency has no region"));
    }
    Ok(region_of(&kv, b_tilde))
}

pub(crate) fn region_of(k: &Wavevector, b_tilde: &[f64]) -> Region {
    let d = discriminant(k, b_tilde);
    if d <= 0.0 {
        Region::S1
    } else if d <= 0.25 {
        Region::S2
    } else {
        Region::S3
    }
}

/// Outcome of the Poincaré-type check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincareCheck {
    pub holds: bool,
    /// `‖f‖_{Ḣ^s} / ‖b̃·∇f‖_{Ḣ^{s+r}}`
    pub ratio: f64,
}

/// Checks `‖f‖_{Ḣ^s} ≤ ĉ^{-1} ‖b̃·∇f‖_{Ḣ^{s+r}}` on a mean-zero field whose
/// support lies inside the certification ball.
pub fn verify_poincare(field: &SpectralField, bg: &BackgroundField, s: f64) -> Result<PoincareCheck> {
    let grid = field.grid();
    if grid.dim() != bg.dim() {
        return Err(Error::config("field and background dimensions differ"));
    }
    if field.mean_mode_magnitude() != 0.0 {
        return Err(Error::contract("Poincaré check needs a mean-zero field"));
    }
    let kc = bg.k_cert() as i64;
    let mut num = 0.0;
    let mut den = 0.0;
    for c in 0..field.components() {
        for (idx, z) in field.component(c).iter().enumerate().skip(1) {
            let a2 = z.norm_sqr();
            if a2 == 0.0 {
                continue;
            }
            let k = grid.wavevector(idx);
            if k.iter().any(|x| x.abs() > kc) {
                return Err(Error::contract(format!(
                    "mode {:?} lies outside the certification ball |k|_inf <= {kc}",
                    &k[..grid.dim()]
                )));
            }
            let k2 = norm_sq(&k);
            let bk = dot(bg.b_tilde(), &k);
            num += k2.powf(s) * a2;
            den += k2.powf(s + bg.r()) * bk * bk * a2;
        }
    }
    if num == 0.0 {
        return Err(Error::contract("Poincaré ratio undefined for the zero field"));
    }
    if den == 0.0 {
        return Ok(PoincareCheck {
            holds: false,
            ratio: f64::INFINITY,
        });
    }
    let ratio = (num / den).sqrt();
    let holds = bg.c_hat() > 0.0 && ratio * bg.c_hat() <= 1.0 + 1e-12;
    Ok(PoincareCheck { holds, ratio })
}

/// Candidate Diophantine vectors: `(1, φ)` in 2D and `(1, 2^{1/3}, 2^{2/3})` in 3D.
pub fn golden_vector(n: usize) -> Result<Vec<f64>> {
    match n {
        2 => Ok(vec![1.0, 0.5 * (1.0 + 5f64.sqrt())]),
        3 => Ok(vec![1.0, 2f64.cbrt(), 4f64.cbrt()]),
        _ => Err(Error::contract(format!("no golden vector in dimension {n}"))),
    }
}
