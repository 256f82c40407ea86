//! Noise and Wick powers for the dynamical Phi^4_2 model.
//!
//! Each step carries the exact stochastic-convolution increments of one Brownian path
//! for two linear operators: `d/dt - Delta` (used by the direct solver) and
//! `d/dt - Delta + 1` (the stationary Ornstein-Uhlenbeck process `X`). The pair is
//! sampled jointly per mode, so both solvers see the same noise, and two steps can be
//! merged exactly, which keeps the path fixed under time refinement.

use num_complex::Complex64;

use super::enhance::NoiseInfo;
use super::noise::white_noise_from;
use super::seed::rng_from_seed;
use super::{renormalization_constant, Mollifier, RenormKind};
use crate::error::{Error, Result};
use crate::ops::TimeField;
use crate::spectral::{Field, Spectrum, TorusGrid};

/// Mass of the Ornstein-Uhlenbeck reference process.
pub const OU_MASS: f64 = 1.0;

#[derive(Clone, Debug)]
pub struct Phi42Noise {
    pub grid: TorusGrid,
    pub dt: f64,
    pub eps: f64,
    pub kernel: Mollifier,
    pub seed: u64,
    /// `int P^{(0)}_{t_{m+1} - s} xi_eps(ds)` per step, spectral.
    pub heat: Vec<Vec<Complex64>>,
    /// `int P^{(1)}_{t_{m+1} - s} xi_eps(ds)` per step, spectral.
    pub ou: Vec<Vec<Complex64>>,
    /// Stationary initial value of `X`, spectral.
    pub x0: Vec<Complex64>,
}

fn unit_spectrum<R: rand::Rng>(grid: TorusGrid, rng: &mut R) -> Vec<Complex64> {
    let vol = grid.volume().sqrt();
    white_noise_from(grid, rng).spectrum().coeffs.into_iter().map(|c| c * vol).collect()
}

fn var_exact(lam: f64, h: f64) -> f64 {
    if lam == 0.0 {
        h
    } else {
        -(-2.0 * lam * h).exp_m1() / (2.0 * lam)
    }
}

impl Phi42Noise {
    pub fn sample(grid: TorusGrid, dt: f64, steps: usize, eps: f64, kernel: Mollifier, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let vol = grid.volume().sqrt();
        let n = grid.len();
        let mut a = vec![0.0; n];
        let mut b1 = vec![0.0; n];
        let mut b2 = vec![0.0; n];
        let mut stat = vec![0.0; n];
        for idx in 0..n {
            let rho = kernel.symbol(&grid, idx, eps) / vol;
            let lam = grid.neg_laplacian_symbol(idx);
            let mu = lam + OU_MASS;
            let va = var_exact(lam, dt);
            let vb = var_exact(mu, dt);
            let cov = -(-(lam + mu) * dt).exp_m1() / (lam + mu);
            a[idx] = rho * va.sqrt();
            b1[idx] = rho * cov / va.sqrt();
            b2[idx] = rho * (vb - cov * cov / va).max(0.0).sqrt();
            stat[idx] = rho * (0.5 / mu).sqrt();
        }
        let z0 = unit_spectrum(grid, &mut rng);
        let x0 = z0.iter().zip(&stat).map(|(z, s)| z * s).collect();
        let mut heat = Vec::with_capacity(steps);
        let mut ou = Vec::with_capacity(steps);
        for _ in 0..steps {
            let z1 = unit_spectrum(grid, &mut rng);
            let z2 = unit_spectrum(grid, &mut rng);
            heat.push((0..n).map(|i| z1[i] * a[i]).collect());
            ou.push((0..n).map(|i| z1[i] * b1[i] + z2[i] * b2[i]).collect());
        }
        Self { grid, dt, eps, kernel, seed, heat, ou, x0 }
    }

    /// All increments and the initial value set to zero. [`Phi42Noise::c1`] still reports the
    /// unmollified grid constant; the matching Wick data is [`WickData::zero`].
    pub fn silent(grid: TorusGrid, dt: f64, steps: usize) -> Self {
        let zero = vec![Complex64::default(); grid.len()];
        Self {
            grid,
            dt,
            eps: 0.0,
            kernel: Mollifier::Gaussian,
            seed: 0,
            heat: vec![zero.clone(); steps],
            ou: vec![zero.clone(); steps],
            x0: zero,
        }
    }

    pub fn steps(&self) -> usize {
        self.heat.len()
    }

    pub fn info(&self) -> NoiseInfo {
        NoiseInfo { eps: self.eps, kernel: Some(self.kernel), seed: Some(self.seed), translation: 0.0 }
    }

    /// Same path on a mesh twice as coarse.
    pub fn coarsen(&self) -> Result<Self> {
        if !self.steps().is_multiple_of(2) {
            return Err(Error::InvalidArgument("odd number of steps cannot be coarsened".into()));
        }
        let grid = self.grid;
        let dl: Vec<f64> = (0..grid.len()).map(|i| (-grid.neg_laplacian_symbol(i) * self.dt).exp()).collect();
        let dm: Vec<f64> =
            (0..grid.len()).map(|i| (-(grid.neg_laplacian_symbol(i) + OU_MASS) * self.dt).exp()).collect();
        let merge = |v: &[Vec<Complex64>], d: &[f64]| -> Vec<Vec<Complex64>> {
            v.chunks(2).map(|p| p[0].iter().zip(&p[1]).zip(d).map(|((a, b), e)| a * e + b).collect()).collect()
        };
        Ok(Self {
            grid,
            dt: 2.0 * self.dt,
            eps: self.eps,
            kernel: self.kernel,
            seed: self.seed,
            heat: merge(&self.heat, &dl),
            ou: merge(&self.ou, &dm),
            x0: self.x0.clone(),
        })
    }

    pub fn c1(&self) -> f64 {
        renormalization_constant(&self.grid, self.eps, self.kernel, RenormKind::Phi42Wick)
    }

    pub fn times(&self) -> Vec<f64> {
        TimeField::uniform_times(self.dt, self.steps())
    }
}

/// `X`, `X^{:2:} = X^2 - c1`, `X^{:3:} = X^3 - 3 c1 X` on the noise mesh.
#[derive(Clone, Debug)]
pub struct WickData {
    pub x: TimeField,
    pub x2: TimeField,
    pub x3: TimeField,
    pub c1: f64,
    pub info: NoiseInfo,
}

impl WickData {
    /// Zero noise: every component vanishes and `c1 = 0`.
    pub fn zero(grid: TorusGrid, dt: f64, steps: usize) -> Self {
        let z = TimeField::constant_in_time(&Field::zeros(grid), TimeField::uniform_times(dt, steps))
            .expect("uniform mesh");
        Self { x: z.clone(), x2: z.clone(), x3: z, c1: 0.0, info: NoiseInfo::default() }
    }
}

/// Samples the noise on `[0, t_final]` and builds the Wick data; `d = 2` only.
pub fn wick_data(grid: TorusGrid, dt: f64, t_final: f64, eps: f64, kernel: Mollifier, seed: u64) -> Result<WickData> {
    if grid.dim != 2 {
        return Err(Error::InvalidGrid("Wick powers are built for the two-dimensional model".into()));
    }
    let steps = steps_for(dt, t_final)?;
    Ok(wick_data_from(&Phi42Noise::sample(grid, dt, steps, eps, kernel, seed)))
}

/// Number of uniform steps of size `dt` covering `[0, t_final]`.
pub fn steps_for(dt: f64, t_final: f64) -> Result<usize> {
    if !(dt > 0.0 && t_final > 0.0) {
        return Err(Error::InvalidArgument(format!("dt = {dt} and T = {t_final} must be positive")));
    }
    let steps = (t_final / dt).round();
    if (steps * dt - t_final).abs() > 1e-9 * t_final {
        return Err(Error::InvalidArgument(format!("T = {t_final} is not a multiple of dt = {dt}")));
    }
    Ok(steps as usize)
}

pub fn wick_data_from(noise: &Phi42Noise) -> WickData {
    let grid = noise.grid;
    let c1 = noise.c1();
    let decay: Vec<f64> =
        (0..grid.len()).map(|i| (-(grid.neg_laplacian_symbol(i) + OU_MASS) * noise.dt).exp()).collect();
    let mut s = Spectrum { grid, coeffs: noise.x0.clone() };
    let mut xs = vec![s.to_field()];
    for inc in &noise.ou {
        for ((c, d), b) in s.coeffs.iter_mut().zip(&decay).zip(inc) {
            *c = *c * d + b;
        }
        xs.push(s.to_field());
    }
    let x2: Vec<Field> = xs.iter().map(|x| x.map(|v| v * v - c1)).collect();
    let x3: Vec<Field> = xs.iter().map(|x| x.map(|v| v * v * v - 3.0 * c1 * v)).collect();
    let times = noise.times();
    WickData {
        x: TimeField { grid, times: times.clone(), frames: xs },
        x2: TimeField { grid, times: times.clone(), frames: x2 },
        x3: TimeField { grid, times, frames: x3 },
        c1,
        info: noise.info(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarsening_matches_direct_two_step_composition() {
        let g = TorusGrid::new(1, 32).unwrap();
        let n = Phi42Noise::sample(g, 1e-3, 4, 0.1, Mollifier::Gaussian, 5);
        let c = n.coarsen().unwrap();
        assert_eq!(c.steps(), 2);
        let fine = wick_data_from(&n);
        let coarse = wick_data_from(&c);
        assert!((&fine.x.frames[4] - &coarse.x.frames[2]).sup_norm() < 1e-12);
    }

    #[test]
    fn wick_square_identity() {
        let g = TorusGrid::new(2, 32).unwrap();
        let w = wick_data(g, 1e-3, 1e-3, 0.2, Mollifier::Gaussian, 1).unwrap();
        let x = &w.x.frames[1];
        let lhs = &w.x2.frames[1];
        assert!((lhs - &x.map(|v| v * v - w.c1)).sup_norm() < 1e-14);
    }
}
