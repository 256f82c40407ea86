//! Mesoscopic model `L v = eps^{1/2} d_y P(v) + d_y eta` on the large torus of period
//! `1/eps`, with finite-range noise `eta`, and its parabolic rescaling
//! `u(t, x) = eps^{-1/2} v(t / eps^2, x / eps)` back to the unit torus.
//!
//! The large torus carries `n / eps` points, so the rescaled field lives on a unit-torus
//! grid with the same number of points and the rescaling is a pure relabelling of
//! samples. Under it the macroscopic noise is `eps^{-3/2} eta`, which is returned along
//! with the solution so the limiting equation can be solved on the same sample.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bundle::{EtdState, Recorder};
use super::{Equation, ScalarFn, SolutionBundle, SolverConfig};
use crate::error::{Error, Result};
use crate::ops::{duhamel_j, phi1, TimeField};
use crate::spectral::{Field, TorusGrid};
use crate::stochastic::{sample_spacetime_white_noise, NoiseInfo};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniversalityConfig {
    pub p: ScalarFn,
    pub epsilon: f64,
    /// Width of the box filter applied to `eta`, in mesoscopic length units.
    #[serde(default = "default_range")]
    pub correlation_range: f64,
    #[serde(default)]
    pub a_eps: f64,
    pub seed: u64,
    #[serde(default = "default_max_points")]
    pub max_points: usize,
}

fn default_range() -> f64 {
    1.0
}

fn default_max_points() -> usize {
    1 << 16
}

impl UniversalityConfig {
    pub fn new(p: ScalarFn, epsilon: f64, seed: u64) -> Self {
        Self { p, epsilon, correlation_range: default_range(), a_eps: 0.0, seed, max_points: default_max_points() }
    }

    /// Points of the mesoscopic grid for a unit-torus resolution `n`.
    pub fn fine_points(&self, n: usize) -> Result<usize> {
        let e = self.epsilon;
        if !(e > 0.0 && e < 1.0) {
            return Err(Error::InvalidArgument(format!("epsilon = {e} outside (0, 1)")));
        }
        let nf = n as f64 / e;
        let r = nf.round();
        if (nf - r).abs() > 1e-9 * nf || !(r as usize).is_power_of_two() {
            return Err(Error::InvalidArgument(format!("n / epsilon = {nf} is not a power of two")));
        }
        let nf = r as usize;
        if nf > self.max_points {
            return Err(Error::InvalidArgument(format!("n / epsilon = {nf} exceeds {} points", self.max_points)));
        }
        let period = 1.0 / e;
        if !(self.correlation_range > 0.0 && self.correlation_range <= period / 4.0) {
            return Err(Error::InvalidArgument(format!(
                "correlation range {} must lie in (0, {}]",
                self.correlation_range,
                period / 4.0
            )));
        }
        Ok(nf)
    }

    /// Box-filter multiplier of the noise at integer wavenumber `k`, the same on both tori.
    pub fn filter(&self, k: i64) -> f64 {
        let x = PI * k as f64 * self.correlation_range * self.epsilon;
        if x == 0.0 {
            1.0
        } else {
            x.sin() / x
        }
    }
}

fn shift(f: &Field, a: f64) -> Field {
    let g = *f.grid();
    let mut s = f.spectrum();
    for (i, c) in s.coeffs.iter_mut().enumerate() {
        let j = g.unravel(i)[0];
        if g.is_nyquist(j) {
            *c = Complex64::default();
        } else {
            *c *= Complex64::from_polar(1.0, 2.0 * PI * g.signed(j) as f64 * a / g.length);
        }
    }
    s.to_field()
}

/// Runs the mesoscopic model and rescales it. Returns the bundle (solution on the unit
/// torus, components `xi` for the macroscopic noise and `X` for `J(d_x xi)`) together with
/// `chi_eps = P''(eps^{1/2} X)`.
///
/// `cfg.n` is the unit-torus resolution before refinement; the initial condition, if any,
/// must live on the refined grid of `n / eps` points.
pub fn simulate_mesoscopic(ucfg: &UniversalityConfig, cfg: &SolverConfig) -> Result<(SolutionBundle, TimeField)> {
    cfg.validate()?;
    let e = ucfg.epsilon;
    let nf = ucfg.fine_points(cfg.n)?;
    if cfg.dt * nf as f64 > 1.0 {
        return Err(Error::InvalidArgument(format!("dt = {} too large for {nf} points (need dt <= 1/{nf})", cfg.dt)));
    }
    let steps = cfg.steps()?;
    let macro_grid = TorusGrid::new(1, nf)?;
    let meso_grid = TorusGrid::with_length(1, nf, 1.0 / e)?;
    let dt_meso = cfg.dt / (e * e);
    let se = e.sqrt();

    let eta = sample_spacetime_white_noise(meso_grid, dt_meso, steps, ucfg.seed)
        .map_frames(|f| Ok(f.apply_multiplier(|i| ucfg.filter(meso_grid.wavenumber(i)[0]))))?;

    let u0 = match &cfg.initial_condition {
        None => Field::zeros(macro_grid),
        Some(f) if *f.grid() == macro_grid => f.clone(),
        Some(f) => return Err(Error::GridMismatch { left: macro_grid, right: *f.grid() }),
    };
    let relabel = |f: &Field, grid: TorusGrid, c: f64| Field::from_vec(grid, f.data().iter().map(|v| c * v).collect());
    let mut v = relabel(&u0, meso_grid, se)?;
    let mut st = EtdState::new(&v, dt_meso, 0.0);
    let times = cfg.times()?;
    let mut rec = Recorder::new(times.clone(), 1, cfg.blowup_bound);
    rec.push(vec![u0]);
    for m in 0..steps {
        let src = ucfg.p.apply(&v).scale(se).try_add(&eta.frames[m])?.dx();
        st.advance(&src);
        v = st.field();
        if !rec.push(vec![relabel(&v, macro_grid, 1.0 / se)?]) {
            break;
        }
    }
    let (mut tracks, diagnostics) = rec.finish()?;
    let mut u = tracks.remove(0);
    if ucfg.a_eps != 0.0 {
        let frames = u.frames.iter().zip(&u.times).map(|(f, &t)| shift(f, ucfg.a_eps * t)).collect();
        u = TimeField::new(u.times.clone(), frames)?;
    }

    let xi_frames = eta.frames.iter().map(|f| relabel(f, macro_grid, e.powf(-1.5))).collect::<Result<Vec<_>>>()?;
    let xi = TimeField::new(times, xi_frames)?;
    let x = duhamel_j(&xi.map_frames(|f| Ok(f.dx()))?);
    let chi = x.map_frames(|f| Ok(ucfg.p.apply_d2(&f.scale(se))))?;

    let mut components = BTreeMap::new();
    components.insert("xi".to_string(), xi);
    components.insert("X".to_string(), x);
    let bundle = SolutionBundle {
        equation: Equation::Mesoscopic,
        solution: u,
        components,
        provenance: NoiseInfo { eps: e, kernel: None, seed: Some(ucfg.seed), translation: 0.0 },
        diagnostics,
    };
    Ok((bundle, chi))
}

/// Pointwise variance of `X = J(d_x xi)` after `steps` steps, for the filtered macroscopic
/// noise of `ucfg`, computed mode by mode for the discrete scheme.
pub fn mesoscopic_x_variance(ucfg: &UniversalityConfig, n: usize, dt: f64, steps: usize) -> Result<f64> {
    let nf = ucfg.fine_points(n)?;
    let g = TorusGrid::new(1, nf)?;
    let mut var = 0.0;
    for j in 0..nf {
        if g.is_nyquist(j) || j == 0 {
            continue;
        }
        let k = g.signed(j);
        let z = g.neg_laplacian_symbol(j) * dt;
        let w = dt * phi1(z);
        let rho = ucfg.filter(k);
        let per_step = w * w * (2.0 * PI * k as f64).powi(2) * rho * rho / dt;
        let decay = (-2.0 * z).exp();
        var += per_step * (1.0 - decay.powi(steps as i32)) / (1.0 - decay);
    }
    Ok(var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::solve_csbe_direct;

    #[test]
    fn quadratic_p_is_burgers() {
        let u = UniversalityConfig::new(ScalarFn::polynomial(&[0.0, 0.0, 1.0]), 0.25, 5);
        let cfg = SolverConfig::new(0.01, 0.001, 32);
        let (b, chi) = simulate_mesoscopic(&u, &cfg).unwrap();
        assert!(chi.frames.iter().all(|f| f.data().iter().all(|&c| c == 2.0)));
        let d = solve_csbe_direct(b.component("xi").unwrap(), 1.0, &SolverConfig::new(0.01, 0.001, 128)).unwrap();
        let gap = (b.final_state() - d.final_state()).sup_norm();
        assert!(gap < 1e-9 * d.final_state().sup_norm().max(1.0), "{gap}");
    }

    #[test]
    fn rejects_bad_epsilon() {
        let u = UniversalityConfig::new(ScalarFn::identity(), 0.3, 1);
        assert!(u.fine_points(32).is_err());
        let u = UniversalityConfig { correlation_range: 3.0, ..UniversalityConfig::new(ScalarFn::identity(), 0.5, 1) };
        assert!(u.fine_points(32).is_err());
    }

    #[test]
    fn shift_by_full_period_is_identity() {
        let g = TorusGrid::new(1, 32).unwrap();
        let f = Field::mode(g, [3, 0], 1.0, 0.2);
        assert!((&shift(&f, 1.0) - &f).sup_norm() < 1e-12);
        assert!((&shift(&f, 0.5) + &f).sup_norm() < 1e-12);
    }
}
