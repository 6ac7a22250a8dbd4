//! Binary snapshots for restarts.
//!
//! All values are little-endian:
//!
//! ```text
//! magic  b"TMHDSNP1"
//! u32    dimension n
//! u32    points per axis N
//! f64    time t
//! u32    case (0: μ=0,ν=1; 1: μ=1,ν=0)
//! u32    certification radius K_cert
//! f64×n  background b̃
//! f64    exponent r
//! f64×2  (re, im) per coefficient: u components, then b components,
//!        each in grid storage order
//! ```
//!
//! The background constant is recertified on load, which reproduces it exactly.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::SimState;
use crate::diophantine::BackgroundField;
use crate::error::{Error, Result};
use crate::propagator::Case;
use crate::spectral::{SpectralField, TorusGrid};

const MAGIC: &[u8; 8] = b"TMHDSNP1";

pub fn write_snapshot(state: &SimState, mut out: impl Write) -> Result<()> {
    let grid = state.grid();
    out.write_all(MAGIC)?;
    out.write_all(&(grid.dim() as u32).to_le_bytes())?;
    out.write_all(&(grid.points() as u32).to_le_bytes())?;
    out.write_all(&state.t.to_le_bytes())?;
    out.write_all(&u32::from(state.case.code()).to_le_bytes())?;
    out.write_all(&(state.bg.k_cert() as u32).to_le_bytes())?;
    for x in state.bg.b_tilde() {
        out.write_all(&x.to_le_bytes())?;
    }
    out.write_all(&state.bg.r().to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * (state.u_hat.coeffs().len() + state.b_hat.coeffs().len()));
    for z in state.u_hat.coeffs().iter().chain(state.b_hat.coeffs()) {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

fn take<const L: usize>(input: &mut impl Read, what: &str) -> Result<[u8; L]> {
    let mut b = [0u8; L];
    input
        .read_exact(&mut b)
        .map_err(|e| Error::Snapshot(format!("truncated while reading {what}: {e}")))?;
    Ok(b)
}

pub fn read_snapshot(mut input: impl Read) -> Result<SimState> {
    if &take::<8>(&mut input, "magic")? != MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let dim = u32::from_le_bytes(take(&mut input, "dimension")?) as usize;
    let points = u32::from_le_bytes(take(&mut input, "grid size")?) as usize;
    let grid = TorusGrid::new(dim, points).map_err(|e| Error::Snapshot(e.to_string()))?;
    let t = f64::from_le_bytes(take(&mut input, "time")?);
    let code = u32::from_le_bytes(take(&mut input, "case")?);
    let case = u8::try_from(code)
        .ok()
        .and_then(Case::from_code)
        .ok_or_else(|| Error::Snapshot(format!("unknown case code {code}")))?;
    let k_cert = u32::from_le_bytes(take(&mut input, "certification radius")?) as usize;
    let mut b_tilde = Vec::with_capacity(dim);
    for _ in 0..dim {
        b_tilde.push(f64::from_le_bytes(take(&mut input, "background")?));
    }
    let r = f64::from_le_bytes(take(&mut input, "exponent")?);
    let bg = BackgroundField::certify(&b_tilde, r, k_cert).map_err(|e| Error::Snapshot(e.to_string()))?;
    let count = grid.len() * dim;
    let mut raw = vec![0u8; 2 * count * 16];
    input
        .read_exact(&mut raw)
        .map_err(|e| Error::Snapshot(format!("truncated coefficient block: {e}")))?;
    let mut coeffs = raw.chunks_exact(16).map(|c| {
        let re = f64::from_le_bytes(c[..8].try_into().unwrap_or([0; 8]));
        let im = f64::from_le_bytes(c[8..].try_into().unwrap_or([0; 8]));
        Complex64::new(re, im)
    });
    let u: Vec<Complex64> = coeffs.by_ref().take(count).collect();
    let b: Vec<Complex64> = coeffs.collect();
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(Error::Snapshot("trailing bytes after coefficient block".into()));
    }
    SimState::new(
        t,
        SpectralField::from_coeffs(grid, dim, u)?,
        SpectralField::from_coeffs(grid, dim, b)?,
        case,
        bg,
    )
}
