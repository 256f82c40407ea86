//! Conservative stochastic Burgers equation `L u = chi d_x(u^2) + d_x xi` and the KPZ
//! equation `L h = (d_x h)^2 - c + xi`, whose derivative solves the former with `chi = 1`.
//!
//! The paracontrolled solver expands
//!
//! ```text
//! u   = X + chi X1 + 2 chi^2 X2 + uQ
//! uQ  = u' ⊘ Q + chi^3 X4 + 4 chi^3 X34 + u#,     u' = 2 chi uQ + 4 chi^3 X2
//! ```
//!
//! and steps `u#` with
//!
//! ```text
//! L u# = 4 chi^3 [d(X2 < X) - X2 < dX] + 4 chi^3 d(X2 > X)
//!      + 2 chi d(uQ o X + uQ > X) + 2 chi [d(uQ < X) - uQ < dX]
//!      + chi d(2 chi X1 R + R^2),                      R = 2 chi^2 X2 + uQ,
//! uQ o X = C(u', Q, X) + u' (Q o X) + (u' ⊘ Q - u' < Q) o X + (chi^3 X4 + 4 chi^3 X34 + u#) o X.
//! ```
//!
//! The heat commutator of `u' ⊘ Q` vanishes in continuous time and is only reported.

use std::collections::BTreeMap;

use super::bundle::{EtdState, Recorder};
use super::{Equation, SolutionBundle, SolverConfig};
use crate::error::{Error, Result};
use crate::ops::{Paracalc, TimeField};
use crate::spectral::Field;
use crate::stochastic::{CsbeEnhancement, NoiseInfo};

fn require_1d(tf: &TimeField) -> Result<()> {
    if tf.grid.dim != 1 {
        return Err(Error::InvalidGrid("the Burgers-type equations are one-dimensional".into()));
    }
    Ok(())
}

/// `d(f < g) - f < dg`
fn dx_commutator(pc: &Paracalc, f: &Field, g: &Field, dg: &Field) -> Result<Field> {
    pc.para_less(f, g)?.dx().try_sub(&pc.para_less(f, dg)?)
}

struct Frame<'a> {
    x: &'a Field,
    dx: &'a Field,
    x1: &'a Field,
    x2: &'a Field,
    x34: &'a Field,
    x4: &'a Field,
    q: &'a Field,
    q_res_x: &'a Field,
}

impl<'a> Frame<'a> {
    fn at(e: &'a CsbeEnhancement, dx: &'a TimeField, m: usize) -> Self {
        Self {
            x: &e.x.frames[m],
            dx: &dx.frames[m],
            x1: &e.x1.frames[m],
            x2: &e.x2.frames[m],
            x34: &e.x34.frames[m],
            x4: &e.x4.frames[m],
            q: &e.q.frames[m],
            q_res_x: &e.q_res_x.frames[m],
        }
    }

    /// `chi^3 X4 + 4 chi^3 X34`
    fn high_trees(&self, chi: f64) -> Result<Field> {
        let c3 = chi.powi(3);
        self.x4.scale(c3).try_add(&self.x34.scale(4.0 * c3))
    }

    /// `X + chi X1 + 2 chi^2 X2`
    fn low_trees(&self, chi: f64) -> Result<Field> {
        let mut s = self.x.clone();
        s.axpy(chi, self.x1)?;
        s.axpy(2.0 * chi * chi, self.x2)?;
        Ok(s)
    }
}

/// `(u^Q, u')` from the states.
fn u_q(f: &Frame, chi: f64, w: &Field, sharp: &Field) -> Result<(Field, Field)> {
    let uq = w.try_add(&f.high_trees(chi)?)?.try_add(sharp)?;
    let mut up = uq.scale(2.0 * chi);
    up.axpy(4.0 * chi.powi(3), f.x2)?;
    Ok((uq, up))
}

fn sharp_source(pc: &Paracalc, f: &Frame, chi: f64, w: &Field, sharp: &Field) -> Result<Field> {
    let c3 = chi.powi(3);
    let (uq, up) = u_q(f, chi, w, sharp)?;
    let mut rhs = dx_commutator(pc, f.x2, f.x, f.dx)?.scale(4.0 * c3);
    rhs.axpy(4.0 * c3, &pc.para_greater(f.x2, f.x)?.dx())?;

    let mut uq_res_x = pc.commutator_c(&up, f.q, f.x)?;
    uq_res_x.axpy(1.0, &up.try_mul(f.q_res_x)?)?;
    uq_res_x.axpy(1.0, &pc.resonant(&w.try_sub(&pc.para_less(&up, f.q)?)?, f.x)?)?;
    uq_res_x.axpy(1.0, &pc.resonant(&f.high_trees(chi)?.try_add(sharp)?, f.x)?)?;
    let inner = uq_res_x.try_add(&pc.para_greater(&uq, f.x)?)?;
    rhs.axpy(2.0 * chi, &inner.dx())?;
    rhs.axpy(2.0 * chi, &dx_commutator(pc, &uq, f.x, f.dx)?)?;

    let mut r = uq;
    r.axpy(2.0 * chi * chi, f.x2)?;
    let quad = f.x1.try_mul(&r)?.scale(2.0 * chi).try_add(&r.try_mul(&r)?)?;
    rhs.axpy(chi, &quad.dx())?;
    Ok(rhs)
}

/// Paracontrolled solve; the initial condition is carried by `u#`.
pub fn solve_csbe(enh: &CsbeEnhancement, chi: f64, cfg: &SolverConfig) -> Result<SolutionBundle> {
    require_1d(&enh.x)?;
    cfg.check_mesh(&enh.x)?;
    let grid = enh.x.grid;
    let pc = Paracalc::new(cfg.partition);
    let dx = enh.x.map_frames(|f| Ok(f.dx()))?;
    let mut sharp = cfg.initial(grid)?;
    let mut ss = EtdState::new(&sharp, cfg.dt, 0.0);
    let mut ws = EtdState::zeros(grid, cfg.dt, 0.0);
    let mut w = Field::zeros(grid);
    let assemble = |m: usize, w: &Field, sharp: &Field| -> Result<(Field, Field)> {
        let f = Frame::at(enh, &dx, m);
        let (uq, up) = u_q(&f, chi, w, sharp)?;
        Ok((f.low_trees(chi)?.try_add(&uq)?, up))
    };
    let mut rec = Recorder::new(enh.x.times.clone(), 4, cfg.blowup_bound);
    let (u0, up0) = assemble(0, &w, &sharp)?;
    rec.push(vec![u0, up0, w.clone(), sharp.clone()]);
    for m in 0..enh.x.steps() {
        let f = Frame::at(enh, &dx, m);
        let (_, up) = u_q(&f, chi, &w, &sharp)?;
        let w_src = pc.para_less(&up, f.dx)?;
        let s_src = sharp_source(&pc, &f, chi, &w, &sharp)?;
        ws.advance(&w_src);
        ss.advance(&s_src);
        w = ws.field();
        sharp = ss.field();
        rec.diagnostics.iterations += 1;
        let (u, up) = assemble(m + 1, &w, &sharp)?;
        if !rec.push(vec![u, up, w.clone(), sharp.clone()]) {
            break;
        }
    }
    let (mut tracks, mut diagnostics) = rec.finish()?;
    let sharp = tracks.pop().expect("tracks");
    let w = tracks.pop().expect("tracks");
    let up = tracks.pop().expect("tracks");
    let u = tracks.pop().expect("tracks");
    if up.len() >= 2 {
        let q = TimeField::new(up.times.clone(), enh.q.frames[..up.len()].to_vec())?;
        let lq = TimeField::new(up.times.clone(), dx.frames[..up.len()].to_vec())?;
        let h = pc.heat_commutator_h(&up, &q, Some(&lq))?;
        diagnostics.residuals.insert("heat_commutator".into(), h.sup_norm());
    }
    let mut components = BTreeMap::new();
    components.insert("u_prime".to_string(), up);
    components.insert("u_prime_para_Q".to_string(), w);
    components.insert("u_sharp".to_string(), sharp);
    Ok(SolutionBundle { equation: Equation::Csbe, solution: u, components, provenance: enh.info.clone(), diagnostics })
}

/// Classical solve of `L u = chi d_x(u^2) + d_x xi`.
pub fn solve_csbe_direct(xi: &TimeField, chi: f64, cfg: &SolverConfig) -> Result<SolutionBundle> {
    require_1d(xi)?;
    cfg.check_mesh(xi)?;
    let grid = xi.grid;
    let mut u = cfg.initial(grid)?;
    let mut st = EtdState::new(&u, cfg.dt, 0.0);
    let mut rec = Recorder::new(xi.times.clone(), 1, cfg.blowup_bound);
    rec.push(vec![u.clone()]);
    for m in 0..xi.steps() {
        let src = u.map(|v| chi * v * v).try_add(&xi.frames[m])?.dx();
        st.advance(&src);
        u = st.field();
        if !rec.push(vec![u.clone()]) {
            break;
        }
    }
    let (mut tracks, diagnostics) = rec.finish()?;
    Ok(SolutionBundle {
        equation: Equation::Csbe,
        solution: tracks.remove(0),
        components: BTreeMap::new(),
        provenance: NoiseInfo::default(),
        diagnostics,
    })
}

/// Classical solve of `L h = (d_x h)^2 - c + xi`.
pub fn solve_kpz(xi: &TimeField, c: f64, cfg: &SolverConfig) -> Result<SolutionBundle> {
    require_1d(xi)?;
    cfg.check_mesh(xi)?;
    let grid = xi.grid;
    let mut h = cfg.initial(grid)?;
    let mut st = EtdState::new(&h, cfg.dt, 0.0);
    let mut rec = Recorder::new(xi.times.clone(), 1, cfg.blowup_bound);
    rec.push(vec![h.clone()]);
    for m in 0..xi.steps() {
        let src = h.dx().map(|s| s * s - c).try_add(&xi.frames[m])?;
        st.advance(&src);
        h = st.field();
        if !rec.push(vec![h.clone()]) {
            break;
        }
    }
    let (mut tracks, diagnostics) = rec.finish()?;
    Ok(SolutionBundle {
        equation: Equation::Kpz,
        solution: tracks.remove(0),
        components: BTreeMap::new(),
        provenance: NoiseInfo { translation: -c, ..NoiseInfo::default() },
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;
    use crate::stochastic::band_limited;

    fn smooth_noise(g: TorusGrid, dt: f64, steps: usize) -> TimeField {
        TimeField::from_fn(g, TimeField::uniform_times(dt, steps), |t| {
            band_limited(g, 5, 7).scale(2.0 + t).try_add(&band_limited(g, 3, 8).scale(10.0 * t)).unwrap()
        })
        .unwrap()
    }

    #[test]
    fn chi_zero_gives_x() {
        let g = TorusGrid::new(1, 64).unwrap();
        let xi = smooth_noise(g, 0.002, 8);
        let e = CsbeEnhancement::from_noise(&Paracalc::default(), xi).unwrap();
        let b = solve_csbe(&e, 0.0, &SolverConfig::new(0.016, 0.002, 64)).unwrap();
        assert_eq!((b.final_state() - e.x.last()).sup_norm(), 0.0);
    }

    #[test]
    fn matches_classical_on_smooth_noise() {
        let g = TorusGrid::new(1, 64).unwrap();
        let xi = smooth_noise(g, 0.002, 20);
        let e = CsbeEnhancement::from_noise(&Paracalc::default(), xi.clone()).unwrap();
        let cfg = SolverConfig::new(0.04, 0.002, 64).with_initial_condition(Field::mode(g, [1, 0], 0.5, 0.1));
        let a = solve_csbe(&e, 0.7, &cfg).unwrap();
        let b = solve_csbe_direct(&xi, 0.7, &cfg).unwrap();
        let gap = (a.final_state() - b.final_state()).sup_norm();
        assert!(gap < 1e-10, "{gap}");
    }

    #[test]
    fn kpz_slope_is_burgers() {
        let g = TorusGrid::new(1, 64).unwrap();
        let xi = smooth_noise(g, 0.002, 20);
        let cfg = SolverConfig::new(0.04, 0.002, 64);
        let h = solve_kpz(&xi, 3.0, &cfg).unwrap();
        let u = solve_csbe_direct(&xi, 1.0, &cfg).unwrap();
        assert!((&h.final_state().dx() - u.final_state()).sup_norm() < 1e-10);
    }
}
