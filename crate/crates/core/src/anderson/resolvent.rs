//! Resolvent of the one-dimensional singular generator `G u = Delta u + xi d_x u`.
//!
//! `(G - lambda) u = phi` is rewritten as `(Delta - lambda) u = phi - xi d_x u` and solved
//! by Picard iteration. The product is evaluated through the ansatz
//! `u = u' < X + u#` with `u' = -d_x u` and `(Delta - lambda) X = xi`:
//!
//! ```text
//! xi d_x u = d_x u < xi + d_x u > xi + [d_x(u' < X) - u' < d_x X] o xi + C(u', d_x X, xi)
//!          + u' (d_x X o xi) + d_x u# o xi
//! ```
//!
//! `d_x X o xi` has mean zero, so no renormalization enters.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::ops::{Paracalc, ParacontrolledFunction};
use crate::spectral::Field;

/// Noise data of the resolvent at one `lambda`.
#[derive(Clone, Debug)]
pub struct ResolventData {
    pub xi: Field,
    pub lambda: f64,
    pub x: Field,
    pub dx: Field,
    /// `d_x X o xi`
    pub dx_res_xi: Field,
}

fn inv_shifted_laplacian(f: &Field, lambda: f64) -> Field {
    let g = *f.grid();
    f.apply_multiplier(|i| -1.0 / (g.neg_laplacian_symbol(i) + lambda))
}

impl ResolventData {
    pub fn new(pc: &Paracalc, xi: &Field, lambda: f64) -> Result<Self> {
        if xi.grid().dim != 1 {
            return Err(Error::InvalidGrid("the singular resolvent is one-dimensional".into()));
        }
        if !(lambda > 0.0) {
            return Err(Error::InvalidArgument(format!("lambda = {lambda} must be positive")));
        }
        let x = inv_shifted_laplacian(xi, lambda);
        let dx = x.dx();
        let dx_res_xi = pc.resonant(&dx, xi)?;
        Ok(Self { xi: xi.clone(), lambda, x, dx, dx_res_xi })
    }

    /// `xi d_x u` through the paracontrolled expansion.
    pub fn drift(&self, pc: &Paracalc, u: &Field) -> Result<Field> {
        let xi = &self.xi;
        let du = u.dx();
        let up = du.scale(-1.0);
        let sharp = u.try_sub(&pc.para_less(&up, &self.x)?)?;
        let mut p = pc.para_less(&du, xi)?;
        p.axpy(1.0, &pc.para_greater(&du, xi)?)?;
        let comm = pc.para_less(&up, &self.x)?.dx().try_sub(&pc.para_less(&up, &self.dx)?)?;
        p.axpy(1.0, &pc.resonant(&comm, xi)?)?;
        p.axpy(1.0, &pc.commutator_c(&up, &self.dx, xi)?)?;
        p.axpy(1.0, &up.try_mul(&self.dx_res_xi)?)?;
        p.axpy(1.0, &pc.resonant(&sharp.dx(), xi)?)?;
        Ok(p)
    }

    /// `(G - lambda) u` with the drift assembled paracontrolled.
    pub fn apply(&self, pc: &Paracalc, u: &Field) -> Result<Field> {
        let mut r = u.laplacian();
        r.axpy(-self.lambda, u)?;
        r.axpy(1.0, &self.drift(pc, u)?)?;
        Ok(r)
    }
}

#[derive(Clone, Debug)]
pub struct ResolventSolution {
    pub u: Field,
    pub controlled: ParacontrolledFunction,
    pub iterations: usize,
    /// `||(G - lambda) u - phi||_inf / ||phi||_inf`
    pub residual: f64,
}

pub fn solve_resolvent_1d(
    pc: &Paracalc,
    xi: &Field,
    lambda: f64,
    phi: &Field,
    tol: f64,
    max_iter: usize,
) -> Result<ResolventSolution> {
    let data = ResolventData::new(pc, xi, lambda)?;
    solve_with(pc, &data, phi, tol, max_iter)
}

pub fn solve_with(
    pc: &Paracalc,
    data: &ResolventData,
    phi: &Field,
    tol: f64,
    max_iter: usize,
) -> Result<ResolventSolution> {
    let scale = phi.sup_norm().max(f64::MIN_POSITIVE);
    let mut u = inv_shifted_laplacian(phi, data.lambda);
    let mut change = f64::INFINITY;
    for it in 1..=max_iter {
        let rhs = phi.try_sub(&data.drift(pc, &u)?)?;
        let next = inv_shifted_laplacian(&rhs, data.lambda);
        change = (&next - &u).sup_norm() / scale;
        u = next;
        if !change.is_finite() {
            break;
        }
        if change <= tol {
            let residual = (&data.apply(pc, &u)? - phi).sup_norm() / scale;
            let controlled = ParacontrolledFunction::decompose(pc, &u, &u.dx().scale(-1.0), &data.x)?;
            return Ok(ResolventSolution { u, controlled, iterations: it, residual });
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, residual: change })
}

/// Dense LU solve of the classical discretization `Delta u + xi d_x u - lambda u = phi`.
pub fn dense_resolvent(xi: &Field, lambda: f64, phi: &Field) -> Result<Field> {
    let g = *xi.grid();
    let n = g.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let e = Field::from_vec(g, e)?;
        let col = e.laplacian().try_add(&xi.try_mul(&e.dx())?)?.try_sub(&e.scale(lambda))?;
        for (i, v) in col.data().iter().enumerate() {
            m[(i, j)] = *v;
        }
    }
    let b = nalgebra::DVector::from_column_slice(phi.data());
    let x = m.lu().solve(&b).ok_or_else(|| Error::Degenerate("singular resolvent matrix".into()))?;
    Field::from_vec(g, x.iter().cloned().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;
    use crate::stochastic::band_limited;

    #[test]
    fn zero_noise_is_diagonal() {
        let g = TorusGrid::new(1, 64).unwrap();
        let pc = Paracalc::default();
        let phi = Field::mode(g, [3, 0], 1.0, 0.0);
        let s = solve_resolvent_1d(&pc, &Field::zeros(g), 2.0, &phi, 1e-13, 10).unwrap();
        let want = phi.scale(-1.0 / (4.0 * std::f64::consts::PI.powi(2) * 9.0 + 2.0));
        assert!((&s.u - &want).sup_norm() < 1e-15);
    }

    #[test]
    fn smooth_noise_matches_dense_solve() {
        let g = TorusGrid::new(1, 128).unwrap();
        let pc = Paracalc::default();
        let xi = band_limited(g, 8, 3).scale(2.0);
        let phi = band_limited(g, 5, 4);
        let s = solve_resolvent_1d(&pc, &xi, 50.0, &phi, 1e-13, 200).unwrap();
        let d = dense_resolvent(&xi, 50.0, &phi).unwrap();
        assert!((&s.u - &d).sup_norm() <= 1e-8 * d.sup_norm());
        assert!(s.residual < 1e-10);
    }

    #[test]
    fn small_lambda_reports_no_convergence() {
        let g = TorusGrid::new(1, 64).unwrap();
        let pc = Paracalc::default();
        let xi = band_limited(g, 8, 3).scale(400.0);
        let phi = band_limited(g, 5, 4);
        assert!(matches!(solve_resolvent_1d(&pc, &xi, 0.1, &phi, 1e-12, 50), Err(Error::NoConvergence { .. })));
    }
}
