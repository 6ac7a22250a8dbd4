use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SimState;
use crate::diophantine::BackgroundField;
use crate::error::{Error, Result};
use crate::propagator::Case;
use crate::spectral::{
    leray_project_in_place, norm_sq, sobolev_norm, Sobolev, SpectralField, TorusGrid, Wavevector,
};

/// Random solenoidal data on the ball `0 < |k| ≤ shell_max`.
///
/// Each mode gets a random complex vector with independent uniform phases,
/// projected onto `k^⊥` and rescaled to magnitude `|k|^{-slope}`. Both fields
/// are then scaled so that `‖u‖_{H^m} + ‖b‖_{H^m} = amplitude`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub amplitude: f64,
    pub shell_max: f64,
    pub slope: f64,
    pub sobolev_index: f64,
    pub seed: u64,
}

impl Default for InitialData {
    fn default() -> Self {
        Self {
            amplitude: 1e-2,
            shell_max: 4.0,
            slope: 3.0,
            sobolev_index: 7.0,
            seed: 0,
        }
    }
}

/// Random solenoidal field with `|v̂(k)| = |k|^{-slope}` on the modes selected by `keep`.
pub(crate) fn random_solenoidal(
    grid: TorusGrid,
    keep: impl Fn(&Wavevector) -> bool,
    slope: f64,
    rng: &mut ChaCha8Rng,
) -> Result<SpectralField> {
    let dim = grid.dim();
    let mut f = SpectralField::zeros_vector(grid);
    let len = grid.len();
    for idx in 1..len {
        let k = grid.wavevector(idx);
        let neg = grid.negated_index(idx);
        // one representative per ±k pair
        if neg <= idx || grid.is_nyquist(&k) || !grid.is_retained(&k) {
            continue;
        }
        if !keep(&k) {
            continue;
        }
        let k2 = norm_sq(&k);
        let mut v = [Complex64::new(0.0, 0.0); 3];
        for z in v.iter_mut().take(dim) {
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            let mag: f64 = rng.gen_range(0.5..1.0);
            *z = Complex64::from_polar(mag, phase);
        }
        let mut kv = Complex64::new(0.0, 0.0);
        for c in 0..dim {
            kv += v[c] * k[c] as f64;
        }
        for c in 0..dim {
            v[c] -= kv * (k[c] as f64 / k2);
        }
        let norm = v[..dim].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let scale = k2.sqrt().powf(-slope) / norm;
        for (c, vc) in v.iter().enumerate().take(dim) {
            let z = vc * scale;
            f.component_mut(c)[idx] = z;
            f.component_mut(c)[neg] = z.conj();
        }
    }
    leray_project_in_place(&mut f)?;
    Ok(f)
}

/// Deterministic random initial state at `t = 0`.
pub fn random_state(grid: TorusGrid, case: Case, bg: BackgroundField, data: &InitialData) -> Result<SimState> {
    if !(data.amplitude >= 0.0 && data.amplitude.is_finite()) {
        return Err(Error::config(format!("amplitude must be nonnegative, got {}", data.amplitude)));
    }
    if !(data.shell_max >= 1.0) {
        return Err(Error::config(format!("shell radius must be at least 1, got {}", data.shell_max)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(data.seed);
    let keep = |k: &Wavevector| norm_sq(k).sqrt() <= data.shell_max;
    let mut u = random_solenoidal(grid, keep, data.slope, &mut rng)?;
    let mut b = random_solenoidal(grid, keep, data.slope, &mut rng)?;
    let total = sobolev_norm(&u, data.sobolev_index, Sobolev::Inhomogeneous)
        + sobolev_norm(&b, data.sobolev_index, Sobolev::Inhomogeneous);
    if total > 0.0 {
        u.scale(data.amplitude / total);
        b.scale(data.amplitude / total);
    }
    let mut state = SimState::new(0.0, u, b, case, bg)?;
    state.enforce_invariants(true);
    Ok(state)
}
