use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::ops::TimeField;
use crate::spectral::{Field, TorusGrid};

/// Mollifier family, given by its Fourier symbol `rho_hat(eps k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mollifier {
    /// `exp(-(eps |k|)^2 / 2)`
    Gaussian,
    /// Tensor Fejer symbol `prod_j (1 - eps |k_j|)_+`, compactly supported.
    Fejer,
}

impl Mollifier {
    /// Symbol at a flat spectral index; wavenumbers are measured in cycles per unit length.
    pub fn symbol(&self, grid: &TorusGrid, idx: usize, eps: f64) -> f64 {
        if eps == 0.0 {
            return 1.0;
        }
        let k = grid.wavenumber(idx);
        let s = eps / grid.length;
        match self {
            Mollifier::Gaussian => {
                let k2 = (k[0] * k[0] + k[1] * k[1]) as f64;
                (-0.5 * s * s * k2).exp()
            }
            Mollifier::Fejer => {
                let a = (1.0 - s * k[0].abs() as f64).max(0.0);
                let b = (1.0 - s * k[1].abs() as f64).max(0.0);
                a * b
            }
        }
    }
}

impl fmt::Display for Mollifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mollifier::Gaussian => write!(f, "gaussian"),
            Mollifier::Fejer => write!(f, "fejer"),
        }
    }
}

impl FromStr for Mollifier {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "gaussian" => Ok(Mollifier::Gaussian),
            "fejer" => Ok(Mollifier::Fejer),
            other => Err(Error::Unknown { kind: "mollifier", name: other.into() }),
        }
    }
}

pub fn mollify(f: &Field, eps: f64, kernel: Mollifier) -> Field {
    let g = *f.grid();
    f.apply_multiplier(|i| kernel.symbol(&g, i, eps))
}

/// Mollify every frame in space.
pub fn mollify_time(f: &TimeField, eps: f64, kernel: Mollifier) -> TimeField {
    TimeField {
        grid: f.grid,
        times: f.times.clone(),
        frames: f.frames.iter().map(|fr| mollify(fr, eps, kernel)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbols_are_bounded_and_even() {
        let g = TorusGrid::new(2, 32).unwrap();
        for kernel in [Mollifier::Gaussian, Mollifier::Fejer] {
            assert_eq!(kernel.symbol(&g, 0, 0.1), 1.0);
            for idx in 0..g.len() {
                let s = kernel.symbol(&g, idx, 0.1);
                assert!((0.0..=1.0).contains(&s));
                let i = g.unravel(idx);
                let mirror = g.ravel([(g.n - i[0]) % g.n, (g.n - i[1]) % g.n]);
                assert_eq!(s, kernel.symbol(&g, mirror, 0.1));
            }
        }
    }

    #[test]
    fn gaussian_single_mode() {
        let g = TorusGrid::new(1, 64).unwrap();
        let f = Field::mode(g, [5, 0], 2.0, 0.0);
        let m = mollify(&f, 0.1, Mollifier::Gaussian);
        let expect = f.scale((-0.5f64 * 0.25).exp());
        assert!((&m - &expect).sup_norm() < 1e-13);
    }
}
