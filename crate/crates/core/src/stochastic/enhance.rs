//! Enhanced noise: the noise together with the stochastic objects a
//! paracontrolled solver needs, renormalized where required.

use serde::{Deserialize, Serialize};

use super::{
    mollify, mollify_time, renormalization_constant, sample_spacetime_white_noise, sample_white_noise, Mollifier,
    RenormKind,
};
use crate::error::{Error, Result};
use crate::ops::{duhamel_j, Paracalc, TimeField};
use crate::spectral::{Field, TorusGrid};

/// Where an enhancement came from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseInfo {
    pub eps: f64,
    pub kernel: Option<Mollifier>,
    pub seed: Option<u64>,
    /// Constant added by a translation `T_C`.
    pub translation: f64,
}

/// `(xi_eps, X, X o xi_eps - c_eps)` with `-Delta X = xi_eps`.
#[derive(Clone, Debug)]
pub struct GpamEnhancement {
    pub xi: Field,
    pub x: Field,
    pub resonant: Field,
    pub c_eps: f64,
    pub info: NoiseInfo,
}

/// Mean-zero solution of `-Delta X = f`.
pub fn inverse_neg_laplacian(f: &Field) -> Field {
    let g = *f.grid();
    f.apply_multiplier(|i| {
        let lam = g.neg_laplacian_symbol(i);
        if lam == 0.0 {
            0.0
        } else {
            1.0 / lam
        }
    })
}

impl GpamEnhancement {
    /// Builds the enhancement of an already mollified noise with counterterm `c`.
    pub fn from_noise(pc: &Paracalc, xi: Field, c: f64) -> Result<Self> {
        let x = inverse_neg_laplacian(&xi);
        let resonant = pc.resonant(&x, &xi)?.map(|v| v - c);
        Ok(Self { xi, x, resonant, c_eps: c, info: NoiseInfo::default() })
    }

    pub fn grid(&self) -> &TorusGrid {
        self.xi.grid()
    }

    /// `T_C (xi, X o xi) = (xi, X o xi + C)`
    pub fn translate(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.resonant = out.resonant.map(|v| v + c);
        out.info.translation += c;
        out
    }
}

pub fn enhance_gpam(grid: TorusGrid, eps: f64, kernel: Mollifier, seed: u64) -> Result<GpamEnhancement> {
    let xi = mollify(&sample_white_noise(grid, seed), eps, kernel);
    let c = renormalization_constant(&grid, eps, kernel, RenormKind::GpamResonant);
    let mut e = GpamEnhancement::from_noise(&Paracalc::default(), xi, c)?;
    e.info = NoiseInfo { eps, kernel: Some(kernel), seed: Some(seed), translation: 0.0 };
    Ok(e)
}

fn require_1d(grid: &TorusGrid, what: &str) -> Result<()> {
    if grid.dim != 1 {
        return Err(Error::InvalidGrid(format!("{what} is posed in one space dimension")));
    }
    Ok(())
}

/// `(xi_eps, X, d_x X, X o d_x X)` with `L X = xi_eps`, `X(0) = 0`.
#[derive(Clone, Debug)]
pub struct GsbeEnhancement {
    pub xi: TimeField,
    pub x: TimeField,
    pub dx: TimeField,
    pub x_res_dx: TimeField,
    pub info: NoiseInfo,
}

impl GsbeEnhancement {
    pub fn from_noise(pc: &Paracalc, xi: TimeField) -> Result<Self> {
        require_1d(&xi.grid, "the generalized Burgers equation")?;
        let x = duhamel_j(&xi);
        let dx = x.map_frames(|f| Ok(f.dx()))?;
        let x_res_dx = x.zip_frames(&dx, |a, b| pc.resonant(a, b))?;
        Ok(Self { xi, x, dx, x_res_dx, info: NoiseInfo::default() })
    }
}

pub fn enhance_gsbe(
    grid: TorusGrid,
    eps: f64,
    kernel: Mollifier,
    dt: f64,
    steps: usize,
    seed: u64,
) -> Result<GsbeEnhancement> {
    let xi = mollify_time(&sample_spacetime_white_noise(grid, dt, steps, seed), eps, kernel);
    let mut e = GsbeEnhancement::from_noise(&Paracalc::default(), xi)?;
    e.info = NoiseInfo { eps, kernel: Some(kernel), seed: Some(seed), translation: 0.0 };
    Ok(e)
}

/// The seven-component tree enhancement of the conservative Burgers equation
/// `L u = chi d_x(u^2) + d_x xi`:
/// `L X = d_x xi`, `L X1 = d_x(X^2)`, `L X2 = d_x(X X1)`, `L X34 = d_x(X2 o X)`,
/// `L X4 = d_x(X1^2)`, `L Q = d_x X`, and `Q o X`. All trees start from zero.
#[derive(Clone, Debug)]
pub struct CsbeEnhancement {
    pub xi: TimeField,
    pub x: TimeField,
    pub x1: TimeField,
    pub x2: TimeField,
    pub x34: TimeField,
    pub x4: TimeField,
    pub q: TimeField,
    pub q_res_x: TimeField,
    pub info: NoiseInfo,
}

fn tree(src: &TimeField) -> Result<TimeField> {
    Ok(duhamel_j(&src.map_frames(|f| Ok(f.dx()))?))
}

impl CsbeEnhancement {
    pub fn from_noise(pc: &Paracalc, xi: TimeField) -> Result<Self> {
        require_1d(&xi.grid, "the conservative Burgers equation")?;
        let x = tree(&xi)?;
        let x1 = tree(&x.zip_frames(&x, |a, b| a.try_mul(b))?)?;
        let x2 = tree(&x.zip_frames(&x1, |a, b| a.try_mul(b))?)?;
        let x34 = tree(&x2.zip_frames(&x, |a, b| pc.resonant(a, b))?)?;
        let x4 = tree(&x1.zip_frames(&x1, |a, b| a.try_mul(b))?)?;
        let q = tree(&x)?;
        let q_res_x = q.zip_frames(&x, |a, b| pc.resonant(a, b))?;
        Ok(Self { xi, x, x1, x2, x34, x4, q, q_res_x, info: NoiseInfo::default() })
    }

    pub fn components(&self) -> [(&'static str, &TimeField); 7] {
        [
            ("X", &self.x),
            ("X1", &self.x1),
            ("X2", &self.x2),
            ("X34", &self.x34),
            ("X4", &self.x4),
            ("Q", &self.q),
            ("QoX", &self.q_res_x),
        ]
    }
}

pub fn enhance_csbe(
    grid: TorusGrid,
    eps: f64,
    kernel: Mollifier,
    dt: f64,
    steps: usize,
    seed: u64,
) -> Result<CsbeEnhancement> {
    let xi = mollify_time(&sample_spacetime_white_noise(grid, dt, steps, seed), eps, kernel);
    let mut e = CsbeEnhancement::from_noise(&Paracalc::default(), xi)?;
    e.info = NoiseInfo { eps, kernel: Some(kernel), seed: Some(seed), translation: 0.0 };
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gpam_x_solves_poisson() {
        let g = TorusGrid::new(2, 32).unwrap();
        let e = enhance_gpam(g, 0.1, Mollifier::Gaussian, 1).unwrap();
        let lap = e.x.laplacian();
        assert!((&lap + &e.xi).sup_norm() < 1e-9 * e.xi.sup_norm());
    }

    #[test]
    fn translation_shifts_resonant_term() {
        let g = TorusGrid::new(2, 32).unwrap();
        let e = enhance_gpam(g, 0.2, Mollifier::Fejer, 2).unwrap();
        let t = e.translate(0.5);
        assert!((&t.resonant - &e.resonant).data().iter().all(|v| (v - 0.5).abs() < 1e-14));
    }

    #[test]
    fn trees_reject_2d() {
        let g = TorusGrid::new(2, 32).unwrap();
        assert!(enhance_csbe(g, 0.1, Mollifier::Gaussian, 1e-3, 2, 0).is_err());
    }
}
