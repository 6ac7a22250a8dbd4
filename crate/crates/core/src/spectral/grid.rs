use crate::error::{Error, Result};

/// Integer wavevector; unused trailing components are zero when `dim < 3`.
pub type Wavevector = [i64; 3];

/// Uniform periodic grid on the torus `[0, 2π)^n` with `N` points per axis.
///
/// Spectral storage uses the FFT ordering along every axis: storage index `j`
/// holds wavenumber `j` for `j < N/2` and `j - N` otherwise, so the Nyquist
/// index `N/2` stands for `-N/2`. Indices are row-major with axis 0 slowest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusGrid {
    dim: usize,
    points: usize,
    cutoff: usize,
}

impl TorusGrid {
    pub fn new(dim: usize, points: usize) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::config(format!("grid dimension must be 2 or 3, got {dim}")));
        }
        if points < 8 || !points.is_multiple_of(2) {
            return Err(Error::config(format!(
                "grid points per axis must be even and at least 8, got {points}"
            )));
        }
        Ok(Self {
            dim,
            points,
            cutoff: points / 3,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Grid points per axis.
    #[inline]
    pub fn points(&self) -> usize {
        self.points
    }

    /// Largest retained `|k_i|` under the 2/3 rule.
    #[inline]
    pub fn dealias_cutoff(&self) -> usize {
        self.cutoff
    }

    /// Total number of stored modes (and physical points) per component.
    #[inline]
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical grid spacing `2π/N`.
    pub fn spacing(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.points as f64
    }

    #[inline]
    fn axis_wavenumber(&self, j: usize) -> i64 {
        if j < self.points / 2 {
            j as i64
        } else {
            j as i64 - self.points as i64
        }
    }

    #[inline]
    fn axis_index(&self, k: i64) -> Option<usize> {
        let half = (self.points / 2) as i64;
        if k.abs() > half {
            return None;
        }
        Some(k.rem_euclid(self.points as i64) as usize)
    }

    /// Wavevector stored at `idx`.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> Wavevector {
        let n = self.points;
        let mut k = [0i64; 3];
        let mut rest = idx;
        for axis in (0..self.dim).rev() {
            k[axis] = self.axis_wavenumber(rest % n);
            rest /= n;
        }
        k
    }

    /// Storage index of `k`, or `None` if some `|k_i| > N/2` or the length is wrong.
    pub fn index_of(&self, k: &[i64]) -> Option<usize> {
        if k.len() != self.dim {
            return None;
        }
        let mut idx = 0;
        for &ki in k {
            idx = idx * self.points + self.axis_index(ki)?;
        }
        Some(idx)
    }

    /// Storage index of `-k` where `k` is the wavevector at `idx`.
    #[inline]
    pub fn negated_index(&self, idx: usize) -> usize {
        let n = self.points;
        let mut out = 0;
        let mut stride = 1;
        let mut rest = idx;
        for _ in 0..self.dim {
            let j = rest % n;
            rest /= n;
            out += ((n - j) % n) * stride;
            stride *= n;
        }
        out
    }

    /// True when some component sits on the Nyquist index, where odd
    /// multipliers cannot preserve conjugate symmetry.
    #[inline]
    pub fn is_nyquist(&self, k: &Wavevector) -> bool {
        let half = (self.points / 2) as i64;
        k[..self.dim].iter().any(|&ki| ki == -half)
    }

    /// Wavevector seen by first derivatives: Nyquist components are zero,
    /// since `sin(N x / 2)` vanishes on the grid.
    #[inline]
    pub fn derivative_wavevector(&self, idx: usize) -> Wavevector {
        let half = (self.points / 2) as i64;
        let mut k = self.wavevector(idx);
        for ki in k.iter_mut().take(self.dim) {
            if *ki == -half {
                *ki = 0;
            }
        }
        k
    }

    /// True when the mode survives the 2/3-rule truncation.
    #[inline]
    pub fn is_retained(&self, k: &Wavevector) -> bool {
        let c = self.cutoff as i64;
        k[..self.dim].iter().all(|&ki| ki.abs() <= c)
    }

    /// `(index, wavevector)` pairs for every stored mode.
    pub fn modes(&self) -> impl Iterator<Item = (usize, Wavevector)> + '_ {
        (0..self.len()).map(move |i| (i, self.wavevector(i)))
    }
}

#[inline]
pub fn norm_sq(k: &Wavevector) -> f64 {
    (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64
}

#[inline]
pub fn dot(b: &[f64], k: &Wavevector) -> f64 {
    b.iter().zip(k.iter()).map(|(&bi, &ki)| bi * ki as f64).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(TorusGrid::new(1, 16).is_err());
        assert!(TorusGrid::new(4, 16).is_err());
        assert!(TorusGrid::new(2, 6).is_err());
        assert!(TorusGrid::new(2, 15).is_err());
        let g = TorusGrid::new(2, 8).unwrap();
        assert_eq!(g.dealias_cutoff(), 2);
        assert!(g.dealias_cutoff() >= 1 && 2 * g.dealias_cutoff() < g.points());
    }

    #[test]
    fn index_roundtrip() {
        for dim in [2, 3] {
            let g = TorusGrid::new(dim, 8).unwrap();
            for (idx, k) in g.modes() {
                assert_eq!(g.index_of(&k[..dim]), Some(idx));
                let neg: Vec<i64> = k[..dim].iter().map(|x| -x).collect();
                assert_eq!(g.index_of(&neg), Some(g.negated_index(idx)));
            }
        }
    }

    #[test]
    fn nyquist_aliases_to_negative_half() {
        let g = TorusGrid::new(2, 8).unwrap();
        assert_eq!(g.index_of(&[4, 0]), g.index_of(&[-4, 0]));
        assert_eq!(g.wavevector(g.index_of(&[4, 0]).unwrap()), [-4, 0, 0]);
        assert!(g.index_of(&[5, 0]).is_none());
    }
}
