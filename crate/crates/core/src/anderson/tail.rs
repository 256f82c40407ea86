//! Monte-Carlo upper tail of the top eigenvalue.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eigen::{eigensolve, EigenConfig};
use super::hamiltonian::ApplyMode;
use crate::error::{Error, Result};
use crate::ops::Paracalc;
use crate::spectral::{linear_fit, slope_stderr, TorusGrid};
use crate::stochastic::{derive_seed, enhance_gpam, Mollifier};

pub const MIN_TAIL_SAMPLES: usize = 200;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TailReport {
    /// Ascending.
    pub lambda1: Vec<f64>,
    /// Plotting positions `(N - i) / (N + 1)` of the sorted samples, `i = 0..N`.
    pub survival: Vec<f64>,
    /// Fit of `log S` against `lambda_1` over the upper quartile.
    pub slope: f64,
    pub slope_halfwidth: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub fit_points: usize,
    pub mean: f64,
    pub c_eps: f64,
}

/// Fits the empirical log-survival curve of `samples` over its upper quartile.
pub fn survival_fit(samples: &[f64]) -> Result<TailReport> {
    let n = samples.len();
    if n < 8 {
        return Err(Error::InvalidArgument(format!("{n} samples are too few for a tail fit")));
    }
    let mut lambda1 = samples.to_vec();
    lambda1.sort_by(f64::total_cmp);
    let survival: Vec<f64> = (0..n).map(|i| (n - i) as f64 / (n + 1) as f64).collect();
    let start = (3 * n) / 4;
    let xs = &lambda1[start..];
    let ys: Vec<f64> = survival[start..].iter().map(|s| s.ln()).collect();
    let (slope, intercept, r_squared) = linear_fit(xs, &ys);
    let se = slope_stderr(xs, &ys, slope, intercept);
    Ok(TailReport {
        mean: lambda1.iter().sum::<f64>() / n as f64,
        lambda1,
        survival,
        slope,
        slope_halfwidth: 1.96 * se,
        intercept,
        r_squared,
        fit_points: n - start,
        c_eps: f64::NAN,
    })
}

/// `lambda_1` of `Delta + xi_eps - c_eps` for the noise of one seed.
pub fn lambda1_of(grid: TorusGrid, eps: f64, kernel: Mollifier, seed: u64) -> Result<f64> {
    let cfg = EigenConfig { tol: 1e-8, ..EigenConfig::new(1).with_mode(ApplyMode::Classical) };
    let e = enhance_gpam(grid, eps, kernel, seed)?;
    Ok(eigensolve(&Paracalc::default(), &e, &cfg)?.eigenvalues[0])
}

/// [`lambda1_of`] for `samples` seeds derived from `seed`, in parallel on the current
/// rayon pool.
pub fn lambda1_samples(grid: TorusGrid, eps: f64, kernel: Mollifier, samples: usize, seed: u64) -> Result<Vec<f64>> {
    (0..samples).into_par_iter().map(|i| lambda1_of(grid, eps, kernel, derive_seed(seed, i as u64))).collect()
}

pub fn lambda1_tail(grid: TorusGrid, eps: f64, kernel: Mollifier, samples: usize, seed: u64) -> Result<TailReport> {
    if samples < MIN_TAIL_SAMPLES {
        return Err(Error::InvalidArgument(format!("need at least {MIN_TAIL_SAMPLES} samples, got {samples}")));
    }
    let s = lambda1_samples(grid, eps, kernel, samples, seed)?;
    let mut r = survival_fit(&s)?;
    r.c_eps =
        crate::stochastic::renormalization_constant(&grid, eps, kernel, crate::stochastic::RenormKind::GpamResonant);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_samples_fit_their_rate() {
        // quantiles of an Exp(2) law
        let n = 400;
        let s: Vec<f64> = (0..n).map(|i| -((n - i) as f64 / (n + 1) as f64).ln() / 2.0).collect();
        let r = survival_fit(&s).unwrap();
        assert!((r.slope + 2.0).abs() < 1e-9);
        assert!(r.r_squared > 0.999_999);
    }

    #[test]
    fn too_few_samples_rejected() {
        let g = TorusGrid::new(2, 32).unwrap();
        assert!(lambda1_tail(g, 0.1, Mollifier::Gaussian, 10, 0).is_err());
    }
}
