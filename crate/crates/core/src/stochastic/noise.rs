use rand::Rng;
use rand_distr::StandardNormal;

use super::seed::rng_from_seed;
use crate::ops::TimeField;
use crate::spectral::{Field, TorusGrid};

/// Mean-zero spatial white noise: every nonzero Fourier coefficient has `E|c_k|^2 = 1 / L^d`,
/// so the point variance is about `1 / h^d`.
pub fn white_noise_from<R: Rng>(grid: TorusGrid, rng: &mut R) -> Field {
    let sigma = (1.0 / grid.cell_volume()).sqrt();
    let data: Vec<f64> = (0..grid.len()).map(|_| sigma * rng.sample::<f64, _>(StandardNormal)).collect();
    Field::from_vec(grid, data).expect("length matches").centered()
}

pub fn sample_white_noise(grid: TorusGrid, seed: u64) -> Field {
    white_noise_from(grid, &mut rng_from_seed(seed))
}

/// Space-time white noise, piecewise constant on each time slice and scaled by `dt^{-1/2}`.
/// Frame `m` drives the step `[t_m, t_{m+1})`; the last frame is never integrated.
pub fn sample_spacetime_white_noise(grid: TorusGrid, dt: f64, steps: usize, seed: u64) -> TimeField {
    let mut rng = rng_from_seed(seed);
    let s = dt.powf(-0.5);
    let frames = (0..=steps).map(|_| white_noise_from(grid, &mut rng).scale(s)).collect();
    TimeField { grid, times: TimeField::uniform_times(dt, steps), frames }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn white_noise_is_mean_zero_and_deterministic() {
        let g = TorusGrid::new(2, 32).unwrap();
        let a = sample_white_noise(g, 7);
        let b = sample_white_noise(g, 7);
        assert_eq!(a, b);
        assert!(a.mean().abs() < 1e-12);
        let var = a.data().iter().map(|v| v * v).sum::<f64>() / g.len() as f64;
        assert!((var / 1024.0 - 1.0).abs() < 0.1);
    }
}
