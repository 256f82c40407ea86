//! Linear PAM `L u = u xi` in one dimension with a rough time-independent potential
//! `xi` of regularity `alpha - 2`, solved through the two-level ansatz
//! `u = u ⊘ X1 + u ⊘ X2 + u#`, where `L X1 = xi` and `L X2 = X1 xi - X1 < xi`.
//!
//! The product `u xi` is expanded as
//!
//! ```text
//! u xi = u < xi + T(xi, u, X1) + u < (xi < X1) + xi < u1
//!      + C2(u, X1, X1, xi) + u C(X1, X1, xi) + C(u1, X1, xi) + u (X1 o xi)
//!      + C(u, X2, xi) + u (X2 o xi) + u2 o xi
//! ```
//!
//! with `u1 = u - u < X1` and `u2 = u1 - u < X2`, so that `u#` is driven by
//! `u xi - u < xi - u < L X2`.

use std::collections::BTreeMap;

use super::bundle::{EtdState, Recorder};
use super::{Equation, SolutionBundle, SolverConfig};
use crate::error::{Error, Result};
use crate::ops::{duhamel_j, Paracalc, TimeField};
use crate::spectral::{Field, TorusGrid};
use crate::stochastic::{synthesize_gaussian, NoiseInfo};

/// Trees and products of the two-level scheme on a fixed time mesh.
#[derive(Clone, Debug)]
pub struct PamHoEnhancement {
    pub xi: Field,
    pub x1: TimeField,
    pub x2: TimeField,
    /// `L X2 = X1 o xi + X1 > xi`
    pub lx2: TimeField,
    pub x1_res_xi: TimeField,
    pub x2_res_xi: TimeField,
    /// `C(X1, X1, xi)`
    pub c_x1: TimeField,
    pub alpha: Option<f64>,
    pub info: NoiseInfo,
}

impl PamHoEnhancement {
    pub fn from_noise(pc: &Paracalc, xi: Field, times: Vec<f64>) -> Result<Self> {
        if xi.grid().dim != 1 {
            return Err(Error::InvalidGrid("the two-level PAM scheme is one-dimensional".into()));
        }
        let xi_t = TimeField::constant_in_time(&xi, times)?;
        let x1 = duhamel_j(&xi_t);
        let lx2 = x1.map_frames(|a| a.try_mul(&xi)?.try_sub(&pc.para_less(a, &xi)?))?;
        let x2 = duhamel_j(&lx2);
        let x1_res_xi = x1.map_frames(|a| pc.resonant(a, &xi))?;
        let x2_res_xi = x2.map_frames(|a| pc.resonant(a, &xi))?;
        let c_x1 = x1.map_frames(|a| pc.commutator_c(a, a, &xi))?;
        Ok(Self { xi, x1, x2, lx2, x1_res_xi, x2_res_xi, c_x1, alpha: None, info: NoiseInfo::default() })
    }
}

/// Synthesizes `xi` of regularity `alpha - 2` and builds the trees on the mesh of `cfg`.
pub fn enhance_pam_ho(grid: TorusGrid, alpha: f64, seed: u64, cfg: &SolverConfig) -> Result<PamHoEnhancement> {
    if !(0.5..2.0 / 3.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} outside [1/2, 2/3)")));
    }
    let xi = synthesize_gaussian(grid, alpha - 2.0, seed);
    let mut e = PamHoEnhancement::from_noise(&Paracalc::default(), xi, cfg.times()?)?;
    e.alpha = Some(alpha);
    e.info = NoiseInfo { eps: 0.0, kernel: None, seed: Some(seed), translation: 0.0 };
    Ok(e)
}

/// `u xi` through the expansion in the module docs.
pub fn pam_product_expansion(pc: &Paracalc, e: &PamHoEnhancement, m: usize, u: &Field) -> Result<Field> {
    let xi = &e.xi;
    let x1 = &e.x1.frames[m];
    let x2 = &e.x2.frames[m];
    let u1 = u.try_sub(&pc.para_less(u, x1)?)?;
    let u2 = u1.try_sub(&pc.para_less(u, x2)?)?;
    let mut p = pc.para_less(u, xi)?;
    p.axpy(1.0, &pc.commutator_t(xi, u, x1)?)?;
    p.axpy(1.0, &pc.para_less(u, &pc.para_less(xi, x1)?)?)?;
    p.axpy(1.0, &pc.para_less(xi, &u1)?)?;
    p.axpy(1.0, &pc.commutator_c2(u, x1, x1, xi)?)?;
    p.axpy(1.0, &u.try_mul(&e.c_x1.frames[m])?)?;
    p.axpy(1.0, &pc.commutator_c(&u1, x1, xi)?)?;
    p.axpy(1.0, &u.try_mul(&e.x1_res_xi.frames[m])?)?;
    p.axpy(1.0, &pc.commutator_c(u, x2, xi)?)?;
    p.axpy(1.0, &u.try_mul(&e.x2_res_xi.frames[m])?)?;
    p.axpy(1.0, &pc.resonant(&u2, xi)?)?;
    Ok(p)
}

/// Paracontrolled solve; the initial condition is carried by `u#`.
pub fn solve_pam_ho(enh: &PamHoEnhancement, cfg: &SolverConfig) -> Result<SolutionBundle> {
    cfg.check_mesh(&enh.x1)?;
    let grid = enh.x1.grid;
    let pc = Paracalc::new(cfg.partition);
    let mut sharp = cfg.initial(grid)?;
    let mut ss = EtdState::new(&sharp, cfg.dt, 0.0);
    let mut as_ = EtdState::zeros(grid, cfg.dt, 0.0);
    let mut bs = EtdState::zeros(grid, cfg.dt, 0.0);
    let (mut a, mut b) = (Field::zeros(grid), Field::zeros(grid));
    let mut rec = Recorder::new(enh.x1.times.clone(), 4, cfg.blowup_bound);
    rec.push(vec![sharp.clone(), a.clone(), b.clone(), sharp.clone()]);
    for m in 0..enh.x1.steps() {
        let u = a.try_add(&b)?.try_add(&sharp)?;
        let a_src = pc.para_less(&u, &enh.xi)?;
        let b_src = pc.para_less(&u, &enh.lx2.frames[m])?;
        let s_src = pam_product_expansion(&pc, enh, m, &u)?.try_sub(&a_src)?.try_sub(&b_src)?;
        as_.advance(&a_src);
        bs.advance(&b_src);
        ss.advance(&s_src);
        a = as_.field();
        b = bs.field();
        sharp = ss.field();
        rec.diagnostics.iterations += 1;
        let u = a.try_add(&b)?.try_add(&sharp)?;
        if !rec.push(vec![u, a.clone(), b.clone(), sharp.clone()]) {
            break;
        }
    }
    let (mut tracks, mut diagnostics) = rec.finish()?;
    let sharp = tracks.pop().expect("tracks");
    let b = tracks.pop().expect("tracks");
    let a = tracks.pop().expect("tracks");
    let u = tracks.pop().expect("tracks");
    let defect = (0..u.len())
        .map(|m| (&u.frames[m] - &(&(&a.frames[m] + &b.frames[m]) + &sharp.frames[m])).sup_norm())
        .fold(0.0, f64::max);
    diagnostics.residuals.insert("reconstruction".into(), defect);
    let mut components = BTreeMap::new();
    components.insert("u_para_X1".to_string(), a);
    components.insert("u_para_X2".to_string(), b);
    components.insert("u_sharp".to_string(), sharp);
    Ok(SolutionBundle { equation: Equation::PamHo, solution: u, components, provenance: enh.info.clone(), diagnostics })
}

/// Classical solve of `L u = u xi`.
pub fn solve_pam_direct(xi: &Field, cfg: &SolverConfig) -> Result<SolutionBundle> {
    let grid = *xi.grid();
    cfg.check_grid(&grid)?;
    let steps = cfg.steps()?;
    let mut u = cfg.initial(grid)?;
    let mut st = EtdState::new(&u, cfg.dt, 0.0);
    let mut rec = Recorder::new(cfg.times()?, 1, cfg.blowup_bound);
    rec.push(vec![u.clone()]);
    for _ in 0..steps {
        st.advance(&u.try_mul(xi)?);
        u = st.field();
        if !rec.push(vec![u.clone()]) {
            break;
        }
    }
    let (mut tracks, diagnostics) = rec.finish()?;
    Ok(SolutionBundle {
        equation: Equation::PamHo,
        solution: tracks.remove(0),
        components: BTreeMap::new(),
        provenance: NoiseInfo::default(),
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::heat_propagate;
    use crate::stochastic::band_limited;

    #[test]
    fn zero_noise_is_heat_flow() {
        let g = TorusGrid::new(1, 64).unwrap();
        let u0 = Field::mode(g, [3, 0], 1.0, 0.4);
        let cfg = SolverConfig::new(0.01, 0.001, 64).with_initial_condition(u0.clone());
        let e = PamHoEnhancement::from_noise(&Paracalc::default(), Field::zeros(g), cfg.times().unwrap()).unwrap();
        let b = solve_pam_ho(&e, &cfg).unwrap();
        assert!((b.final_state() - &heat_propagate(&u0, 0.01, 0.0)).sup_norm() < 1e-12);
    }

    #[test]
    fn matches_classical_on_smooth_noise() {
        let g = TorusGrid::new(1, 64).unwrap();
        let xi = band_limited(g, 6, 11).scale(5.0);
        let cfg = SolverConfig::new(0.05, 0.001, 64).with_initial_condition(Field::constant(g, 1.0));
        let e = PamHoEnhancement::from_noise(&Paracalc::default(), xi.clone(), cfg.times().unwrap()).unwrap();
        let a = solve_pam_ho(&e, &cfg).unwrap();
        let b = solve_pam_direct(&xi, &cfg).unwrap();
        assert!((a.final_state() - b.final_state()).sup_norm() < 1e-10);
        assert!(a.diagnostics.residuals["reconstruction"] == 0.0);
    }

    #[test]
    fn rejects_alpha_outside_range() {
        let g = TorusGrid::new(1, 64).unwrap();
        assert!(enhance_pam_ho(g, 0.8, 1, &SolverConfig::new(0.01, 0.001, 64)).is_err());
    }
}
