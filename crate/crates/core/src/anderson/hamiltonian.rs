//! The renormalized Hamiltonian `H = Delta + xi - c` on the torus and its strongly
//! paracontrolled parametrization `u = u < X + Phi(u) + u##`.
//!
//! With `-Delta X = xi`, `res = X o xi - c` and
//!
//! ```text
//! S(u)   = [Delta(u < X) - u < Delta X] + u > xi + u res
//! Phi(u) = (1 - Delta)^{-1} S(u)
//! ```
//!
//! one has `H u = Delta u## + Phi(u) + (Phi(u) + u##) o xi + C(u, X, xi)` exactly. The
//! `+ Phi(u)` term is the price of inverting `1 - Delta` instead of `-Delta`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops::Paracalc;
use crate::spectral::Field;
use crate::stochastic::GpamEnhancement;

/// `(xi, X, X o xi - c)`; built exactly like the gPAM enhancement.
pub type AndersonEnhancement = GpamEnhancement;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ApplyMode {
    /// Through the strongly paracontrolled expansion.
    #[default]
    Paracontrolled,
    /// `Delta u + (xi - c) u` directly.
    Classical,
}

/// `xi - c`
pub fn potential(enh: &AndersonEnhancement) -> Field {
    enh.xi.map(|v| v - enh.c_eps)
}

fn inv_one_minus_laplacian(f: &Field) -> Field {
    let g = *f.grid();
    f.apply_multiplier(|i| 1.0 / (1.0 + g.neg_laplacian_symbol(i)))
}

pub fn build_phi(pc: &Paracalc, enh: &AndersonEnhancement, u: &Field) -> Result<Field> {
    let ux = pc.para_less(u, &enh.x)?;
    let lap_x = enh.x.laplacian();
    let mut s = ux.laplacian().try_sub(&pc.para_less(u, &lap_x)?)?;
    s.axpy(1.0, &pc.para_greater(u, &enh.xi)?)?;
    s.axpy(1.0, &u.try_mul(&enh.resonant)?)?;
    Ok(inv_one_minus_laplacian(&s))
}

#[derive(Clone, Debug)]
pub struct StronglyParacontrolled {
    pub u: Field,
    /// `u - u < X`
    pub u_sharp: Field,
    pub phi_u: Field,
    /// `u - u < X - Phi(u)`
    pub u_sharpsharp: Field,
}

impl StronglyParacontrolled {
    pub fn from_field(pc: &Paracalc, enh: &AndersonEnhancement, u: &Field) -> Result<Self> {
        let u_sharp = u.try_sub(&pc.para_less(u, &enh.x)?)?;
        let phi_u = build_phi(pc, enh, u)?;
        let u_sharpsharp = u_sharp.try_sub(&phi_u)?;
        Ok(Self { u: u.clone(), u_sharp, phi_u, u_sharpsharp })
    }

    pub fn reconstruct(&self, pc: &Paracalc, enh: &AndersonEnhancement) -> Result<Field> {
        pc.para_less(&self.u, &enh.x)?.try_add(&self.phi_u)?.try_add(&self.u_sharpsharp)
    }
}

pub fn apply_hamiltonian(pc: &Paracalc, sp: &StronglyParacontrolled, enh: &AndersonEnhancement) -> Result<Field> {
    let mut h = sp.u_sharpsharp.laplacian();
    h.axpy(1.0, &sp.phi_u)?;
    h.axpy(1.0, &pc.resonant(&sp.phi_u.try_add(&sp.u_sharpsharp)?, &enh.xi)?)?;
    h.axpy(1.0, &pc.commutator_c(&sp.u, &enh.x, &enh.xi)?)?;
    Ok(h)
}

pub fn apply_classical(enh: &AndersonEnhancement, u: &Field) -> Result<Field> {
    let c = enh.c_eps;
    let pot = u.zip_map(&enh.xi, |a, x| a * (x - c))?;
    u.laplacian().try_add(&pot)
}

pub fn apply(pc: &Paracalc, enh: &AndersonEnhancement, u: &Field, mode: ApplyMode) -> Result<Field> {
    match mode {
        ApplyMode::Paracontrolled => apply_hamiltonian(pc, &StronglyParacontrolled::from_field(pc, enh, u)?, enh),
        ApplyMode::Classical => apply_classical(enh, u),
    }
}

/// Solves `u = w + u < X + Phi(u)` by fixpoint iteration, so that `u## = w`.
pub fn domain_map(
    pc: &Paracalc,
    enh: &AndersonEnhancement,
    w: &Field,
    tol: f64,
    max_iter: usize,
) -> Result<StronglyParacontrolled> {
    let scale = w.l2_norm().max(f64::MIN_POSITIVE);
    let mut u = w.clone();
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let next = w.try_add(&pc.para_less(&u, &enh.x)?)?.try_add(&build_phi(pc, enh, &u)?)?;
        residual = (&next - &u).l2_norm() / scale;
        u = next;
        if !residual.is_finite() {
            break;
        }
        if residual <= tol {
            return StronglyParacontrolled::from_field(pc, enh, &u);
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, residual })
}

/// `|<Hu, v> - <u, Hv>| / (||u|| ||v||)`
pub fn symmetry_defect(pc: &Paracalc, enh: &AndersonEnhancement, u: &Field, v: &Field, mode: ApplyMode) -> Result<f64> {
    let hu = apply(pc, enh, u, mode)?;
    let hv = apply(pc, enh, v, mode)?;
    Ok((hu.inner(v)? - u.inner(&hv)?).abs() / (u.l2_norm() * v.l2_norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;
    use crate::stochastic::{band_limited, enhance_gpam, sample_white_noise, Mollifier};

    fn zero_enh(g: TorusGrid) -> AndersonEnhancement {
        GpamEnhancement::from_noise(&Paracalc::default(), Field::zeros(g), 0.0).unwrap()
    }

    #[test]
    fn zero_noise_phi_vanishes_and_h_is_laplacian() {
        let g = TorusGrid::new(2, 32).unwrap();
        let e = zero_enh(g);
        let u = sample_white_noise(g, 3);
        let pc = Paracalc::default();
        assert_eq!(build_phi(&pc, &e, &u).unwrap().sup_norm(), 0.0);
        let h = apply(&pc, &e, &u, ApplyMode::Paracontrolled).unwrap();
        assert!((&h - &u.laplacian()).sup_norm() <= 1e-12 * u.laplacian().sup_norm());
    }

    #[test]
    fn expansion_matches_classical_operator() {
        let g = TorusGrid::new(2, 32).unwrap();
        let pc = Paracalc::default();
        let e = enhance_gpam(g, 0.1, Mollifier::Gaussian, 4).unwrap();
        let u = band_limited(g, 6, 9);
        let a = apply(&pc, &e, &u, ApplyMode::Paracontrolled).unwrap();
        let b = apply(&pc, &e, &u, ApplyMode::Classical).unwrap();
        assert!((&a - &b).sup_norm() <= 1e-8 * b.sup_norm());
    }

    #[test]
    fn decomposition_is_exact() {
        let g = TorusGrid::new(2, 32).unwrap();
        let pc = Paracalc::default();
        let e = enhance_gpam(g, 0.1, Mollifier::Fejer, 5).unwrap();
        let u = sample_white_noise(g, 8);
        let sp = StronglyParacontrolled::from_field(&pc, &e, &u).unwrap();
        assert!((&sp.reconstruct(&pc, &e).unwrap() - &u).sup_norm() <= 1e-12 * u.sup_norm());
    }

    #[test]
    fn domain_map_returns_prescribed_remainder() {
        let g = TorusGrid::new(2, 32).unwrap();
        let pc = Paracalc::default();
        let e = GpamEnhancement::from_noise(&pc, band_limited(g, 4, 2).scale(3.0), 0.0).unwrap();
        let w = band_limited(g, 5, 6);
        let sp = domain_map(&pc, &e, &w, 1e-12, 200).unwrap();
        assert!((&sp.u_sharpsharp - &w).sup_norm() <= 1e-10 * w.sup_norm());
    }
}
