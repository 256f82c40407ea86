use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid on the torus `[0, L)^d`, `d` in {1, 2}, `n` points per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    pub dim: usize,
    pub n: usize,
    pub length: f64,
}

impl TorusGrid {
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        Self::with_length(dim, n, 1.0)
    }

    pub fn with_length(dim: usize, n: usize, length: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in {{1, 2}}")));
        }
        if n < 32 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("n = {n} must be a power of two >= 32")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length {length} must be positive")));
        }
        Ok(Self { dim, n, length })
    }

    /// Number of grid points, `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Volume of a grid cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Index of the highest dyadic block, `floor(log2(n/2)) - 1`.
    pub fn i_max(&self) -> i32 {
        (self.n / 2).trailing_zeros() as i32 - 1
    }

    /// Number of blocks `Delta_{-1} .. Delta_{i_max}`.
    pub fn block_count(&self) -> usize {
        (self.i_max() + 2) as usize
    }

    /// Multi-index of a flat (row-major) position.
    pub fn unravel(&self, idx: usize) -> [usize; 2] {
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx / self.n, idx % self.n]
        }
    }

    pub fn ravel(&self, i: [usize; 2]) -> usize {
        if self.dim == 1 {
            i[0]
        } else {
            i[0] * self.n + i[1]
        }
    }

    /// Physical coordinates of a flat position.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let h = self.spacing();
        let i = self.unravel(idx);
        [i[0] as f64 * h, i[1] as f64 * h]
    }

    /// Signed integer wavenumber of one FFT index; Nyquist maps to `+n/2`.
    pub fn signed(&self, j: usize) -> i64 {
        if j <= self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// Integer wavenumber of a flat spectral position (second entry 0 in 1D).
    pub fn wavenumber(&self, idx: usize) -> [i64; 2] {
        let i = self.unravel(idx);
        if self.dim == 1 {
            [self.signed(i[0]), 0]
        } else {
            [self.signed(i[0]), self.signed(i[1])]
        }
    }

    pub fn is_nyquist(&self, j: usize) -> bool {
        j == self.n / 2
    }

    /// `|k|_inf` of a flat spectral position.
    pub fn kinf(&self, idx: usize) -> u64 {
        let k = self.wavenumber(idx);
        k[0].unsigned_abs().max(k[1].unsigned_abs())
    }

    /// Squared Euclidean integer wavenumber.
    pub fn k2(&self, idx: usize) -> f64 {
        let k = self.wavenumber(idx);
        (k[0] * k[0] + k[1] * k[1]) as f64
    }

    /// Eigenvalue of `-Delta` on the mode, `4 pi^2 |k|^2 / L^2`.
    pub fn neg_laplacian_symbol(&self, idx: usize) -> f64 {
        let w = 2.0 * std::f64::consts::PI / self.length;
        w * w * self.k2(idx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_count_matches_log2() {
        for (n, count) in [(32, 5), (64, 6), (256, 8), (4096, 12)] {
            let g = TorusGrid::new(1, n).unwrap();
            assert_eq!(g.block_count(), count);
            assert_eq!(g.i_max() as usize + 2, count);
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(TorusGrid::new(1, 12).is_err());
        assert!(TorusGrid::new(3, 16).is_err());
        assert!(TorusGrid::new(2, 16).is_err());
        assert!(TorusGrid::new(1, 100).is_err());
        assert!(TorusGrid::with_length(1, 16, 0.0).is_err());
    }

    #[test]
    fn wavenumbers_are_signed() {
        let g = TorusGrid::new(2, 32).unwrap();
        assert_eq!(g.wavenumber(g.ravel([31, 16])), [-1, 16]);
        assert_eq!(g.kinf(g.ravel([3, 30])), 3);
    }
}
