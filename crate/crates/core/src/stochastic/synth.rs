//! Random fields of prescribed regularity.

use rand::Rng;
use rand_distr::StandardNormal;

use super::noise::white_noise_from;
use super::seed::rng_from_seed;
use crate::spectral::{Field, TorusGrid};

/// Gaussian field with `E|c_k|^2 ~ |k|^{-2 alpha - d}`, so that `||Delta_i f||_inf ~ 2^{-i alpha}`
/// up to a logarithmic factor.
pub fn synthesize_gaussian(grid: TorusGrid, alpha: f64, seed: u64) -> Field {
    let w = white_noise_from(grid, &mut rng_from_seed(seed));
    let d = grid.dim as f64;
    let vol = grid.volume().sqrt();
    w.apply_multiplier(|i| {
        let k2 = grid.k2(i);
        if k2 == 0.0 {
            0.0
        } else {
            vol * k2.powf(-(alpha + 0.5 * d) / 2.0)
        }
    })
}

/// Lacunary series `sum_i 2^{-i alpha} cos(2 pi 2^i e_i . x + phi_i)`, one mode per block
/// `0..=i_max`, random phases and (in 2D) random axis. Holder-Besov regularity exactly `alpha`, without log factors.
pub fn synthesize_lacunary(grid: TorusGrid, alpha: f64, seed: u64) -> Field {
    let mut rng = rng_from_seed(seed);
    let mut f = Field::zeros(grid);
    for i in 0..=grid.i_max() {
        let phase = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
        let axis = if grid.dim == 2 { rng.random_range(0..2usize) } else { 0 };
        let mut k = [0i64; 2];
        k[axis] = 1 << i;
        let m = Field::mode(grid, k, 2f64.powf(-alpha * i as f64), phase);
        f.axpy(1.0, &m).expect("same grid");
    }
    f
}

/// Smooth mean-zero field supported on `1 <= |k|_inf <= kmax`, unit sup norm.
pub fn band_limited(grid: TorusGrid, kmax: u64, seed: u64) -> Field {
    let mut rng = rng_from_seed(seed);
    let mut f = Field::zeros(grid);
    let kmax = kmax as i64;
    let ky_range = if grid.dim == 2 { -kmax..=kmax } else { 0..=0 };
    for kx in 0..=kmax {
        for ky in ky_range.clone() {
            if (kx == 0 && ky <= 0) || (kx, ky) == (0, 0) {
                continue;
            }
            let a: f64 = rng.sample(StandardNormal);
            let phase = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
            let decay = 1.0 / (1.0 + (kx * kx + ky * ky) as f64);
            f.axpy(1.0, &Field::mode(grid, [kx, ky], a * decay, phase)).expect("same grid");
        }
    }
    let s = f.sup_norm();
    if s > 0.0 {
        f.scale(1.0 / s)
    } else {
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::estimate_regularity;

    #[test]
    fn lacunary_regularity_is_sharp() {
        let g = TorusGrid::new(1, 1024).unwrap();
        let f = synthesize_lacunary(g, 0.7, 3);
        let est = estimate_regularity(&f, None).unwrap();
        // grid sampling of a cosine can miss its peak by a factor cos(pi/4) at the top
        assert!((est.alpha_hat - 0.7).abs() < 0.02, "{}", est.alpha_hat);
    }

    #[test]
    fn band_limited_is_band_limited() {
        let g = TorusGrid::new(2, 32).unwrap();
        let f = band_limited(g, 3, 1);
        let s = f.spectrum();
        for (i, c) in s.coeffs.iter().enumerate() {
            if g.kinf(i) > 3 {
                assert!(c.norm() < 1e-14);
            }
        }
        assert!(f.mean().abs() < 1e-14);
    }
}
