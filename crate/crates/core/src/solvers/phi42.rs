//! Dynamical Phi^4_2: `L phi = -phi^3 + 3 c1 phi + xi_eps` on the two-dimensional torus.

use std::collections::BTreeMap;

use super::bundle::{EtdState, Recorder};
use super::{Equation, SolutionBundle, SolverConfig};
use crate::error::{Error, Result};
use crate::spectral::{Field, Spectrum};
use crate::stochastic::{Phi42Noise, WickData, OU_MASS};

fn check_noise(noise: &Phi42Noise, cfg: &SolverConfig) -> Result<usize> {
    cfg.check_grid(&noise.grid)?;
    let steps = cfg.steps()?;
    if steps != noise.steps() || (noise.dt - cfg.dt).abs() > 1e-12 * cfg.dt {
        return Err(Error::TimeMismatch(format!(
            "noise has {} steps of {}, config wants {} of {}",
            noise.steps(),
            noise.dt,
            steps,
            cfg.dt
        )));
    }
    Ok(steps)
}

/// Classical renormalized solve. The initial value is `X(0) + psi0` with `psi0` the
/// configured initial condition, so that it matches [`solve_phi42_dd`] on the same noise.
pub fn solve_phi42_direct(noise: &Phi42Noise, c1: f64, cfg: &SolverConfig) -> Result<SolutionBundle> {
    let steps = check_noise(noise, cfg)?;
    let grid = noise.grid;
    let x0 = Spectrum { grid, coeffs: noise.x0.clone() }.to_field();
    let phi0 = x0.try_add(&cfg.initial(grid)?)?;
    let mut state = EtdState::new(&phi0, cfg.dt, 0.0);
    let mut rec = Recorder::new(noise.times(), 1, cfg.blowup_bound);
    let mut phi = phi0;
    rec.push(vec![phi.clone()]);
    for m in 0..steps {
        let source = phi.map(|p| -p * p * p + 3.0 * c1 * p);
        state.advance_with(&source.spectrum(), Some(&noise.heat[m]));
        phi = state.field();
        if !rec.push(vec![phi.clone()]) {
            break;
        }
    }
    let (mut tracks, diagnostics) = rec.finish()?;
    Ok(SolutionBundle {
        equation: Equation::Phi42,
        solution: tracks.remove(0),
        components: BTreeMap::new(),
        provenance: noise.info(),
        diagnostics,
    })
}

/// Da Prato-Debussche split `phi = X + psi` with the stationary mass-one field `X`:
/// `L psi = -X3 - 3 X2 psi - 3 X psi^2 - psi^3 + X`, the last term compensating the mass
/// of `X`.
pub fn solve_phi42_dd(wick: &WickData, cfg: &SolverConfig) -> Result<SolutionBundle> {
    cfg.check_mesh(&wick.x)?;
    let grid = wick.x.grid;
    let steps = cfg.steps()?;
    let psi0 = cfg.initial(grid)?;
    let mut state = EtdState::new(&psi0, cfg.dt, 0.0);
    let mut rec = Recorder::new(wick.x.times.clone(), 3, cfg.blowup_bound);
    let mut psi = psi0;
    let phi0 = wick.x.frames[0].try_add(&psi)?;
    rec.push(vec![phi0, psi.clone(), wick.x.frames[0].clone()]);
    for m in 0..steps {
        let x = wick.x.frames[m].data();
        let x2 = wick.x2.frames[m].data();
        let x3 = wick.x3.frames[m].data();
        let src: Vec<f64> = psi
            .data()
            .iter()
            .enumerate()
            .map(|(j, &p)| -x3[j] - 3.0 * x2[j] * p - 3.0 * x[j] * p * p - p * p * p + OU_MASS * x[j])
            .collect();
        state.advance(&Field::from_vec(grid, src)?);
        psi = state.field();
        let xm = &wick.x.frames[m + 1];
        if !rec.push(vec![xm.try_add(&psi)?, psi.clone(), xm.clone()]) {
            break;
        }
    }
    let (mut tracks, mut diagnostics) = rec.finish()?;
    let x = tracks.pop().expect("three tracks");
    let psi = tracks.pop().expect("three tracks");
    let phi = tracks.pop().expect("three tracks");
    let defect = phi
        .frames
        .iter()
        .zip(x.frames.iter().zip(&psi.frames))
        .map(|(p, (a, b))| (p - &(a + b)).sup_norm())
        .fold(0.0, f64::max);
    diagnostics.residuals.insert("reconstruction".into(), defect);
    let mut components = BTreeMap::new();
    components.insert("X".to_string(), x);
    components.insert("psi".to_string(), psi);
    Ok(SolutionBundle {
        equation: Equation::Phi42,
        solution: phi,
        components,
        provenance: wick.info.clone(),
        diagnostics,
    })
}

/// Deterministic reference for the zero-noise constant-data case: `psi' = -psi^3`.
pub fn cubic_decay(c: f64, t: f64) -> f64 {
    c / (1.0 + 2.0 * c * c * t).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;

    #[test]
    fn zero_noise_zero_data_stays_zero() {
        let g = TorusGrid::new(2, 32).unwrap();
        let cfg = SolverConfig::new(0.1, 0.01, 32);
        let b = solve_phi42_dd(&WickData::zero(g, 0.01, 10), &cfg).unwrap();
        assert_eq!(b.solution.sup_norm(), 0.0);
        let d = solve_phi42_direct(&Phi42Noise::silent(g, 0.01, 10), 0.0, &cfg).unwrap();
        assert_eq!(d.solution.sup_norm(), 0.0);
    }

    #[test]
    fn constant_data_follows_cubic_decay() {
        let g = TorusGrid::new(2, 32).unwrap();
        let cfg = SolverConfig::new(1.0, 1e-3, 32).with_initial_condition(Field::constant(g, 1.5));
        let b = solve_phi42_dd(&WickData::zero(g, 1e-3, 1000), &cfg).unwrap();
        let got = b.final_state().mean();
        assert!((got - cubic_decay(1.5, 1.0)).abs() < 5e-3, "{got}");
    }
}
