//! One-call solves from a JSON run configuration: sample the noise, build the enhancement
//! and dispatch to the solver of the requested equation.

use serde::{Deserialize, Serialize};

use super::{
    enhance_pam_ho, simulate_mesoscopic, solve_csbe, solve_csbe_direct, solve_gpam_direct, solve_gpam_pc, solve_gsbe,
    solve_gsbe_direct, solve_kpz, solve_pam_direct, solve_pam_ho, solve_phi42_dd, solve_phi42_direct, Equation,
    ScalarFn, SolutionBundle, SolverConfig, UniversalityConfig,
};
use crate::error::{Error, Result};
use crate::spectral::TorusGrid;
use crate::stochastic::{
    enhance_csbe, enhance_gpam, enhance_gsbe, mollify_time, renormalization_constant, sample_spacetime_white_noise,
    wick_data_from, Mollifier, Phi42Noise, RenormKind,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Paracontrolled,
    /// The renormalized classical scheme on the mollified noise.
    Classical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub solver: SolverConfig,
    /// Space dimension for gPAM (1 or 2); the other equations have a fixed dimension.
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_kernel")]
    pub kernel: Mollifier,
    #[serde(default)]
    pub seed: u64,
    /// Nonlinearity of gPAM and gSBE.
    #[serde(default = "ScalarFn::identity")]
    pub g: ScalarFn,
    #[serde(default = "default_chi")]
    pub chi: f64,
    /// Noise regularity `alpha - 2` of the higher-order PAM.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub method: Method,
    /// Subtract the counterterm (gPAM only).
    #[serde(default = "default_true")]
    pub counterterm: bool,
    #[serde(default)]
    pub universality: Option<UniversalityConfig>,
}

fn default_eps() -> f64 {
    0.1
}

fn default_kernel() -> Mollifier {
    Mollifier::Gaussian
}

fn default_chi() -> f64 {
    1.0
}

fn default_alpha() -> f64 {
    0.6
}

fn default_true() -> bool {
    true
}

impl RunConfig {
    pub fn new(solver: SolverConfig) -> Self {
        Self {
            solver,
            dim: None,
            eps: default_eps(),
            kernel: default_kernel(),
            seed: 0,
            g: ScalarFn::identity(),
            chi: default_chi(),
            alpha: default_alpha(),
            method: Method::default(),
            counterterm: true,
            universality: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Solves `equation` as configured. Mesoscopic runs carry `chi_eps` as component `chi`.
pub fn solve(equation: Equation, rc: &RunConfig) -> Result<SolutionBundle> {
    let cfg = &rc.solver;
    let steps = cfg.steps()?;
    let pc = rc.method == Method::Paracontrolled;
    let fixed = |d: usize| -> Result<TorusGrid> {
        match rc.dim {
            Some(x) if x != d => Err(Error::InvalidGrid(format!("{equation} runs in dimension {d}, not {x}"))),
            _ => TorusGrid::new(d, cfg.n),
        }
    };
    match equation {
        Equation::Phi42 => {
            let noise = Phi42Noise::sample(fixed(2)?, cfg.dt, steps, rc.eps, rc.kernel, rc.seed);
            if pc {
                solve_phi42_dd(&wick_data_from(&noise), cfg)
            } else {
                solve_phi42_direct(&noise, noise.c1(), cfg)
            }
        }
        Equation::Gpam => {
            let grid = TorusGrid::new(rc.dim.unwrap_or(2), cfg.n)?;
            let e = enhance_gpam(grid, rc.eps, rc.kernel, rc.seed)?;
            let c = if rc.counterterm { e.c_eps } else { 0.0 };
            if pc {
                solve_gpam_pc(&e.translate(e.c_eps - c), &rc.g, cfg)
            } else {
                solve_gpam_direct(&e.xi, c, &rc.g, cfg)
            }
        }
        Equation::Gsbe => {
            let e = enhance_gsbe(fixed(1)?, rc.eps, rc.kernel, cfg.dt, steps, rc.seed)?;
            if pc {
                solve_gsbe(&e, &rc.g, cfg)
            } else {
                solve_gsbe_direct(&e.xi, &rc.g, cfg)
            }
        }
        Equation::Csbe => {
            let e = enhance_csbe(fixed(1)?, rc.eps, rc.kernel, cfg.dt, steps, rc.seed)?;
            if pc {
                solve_csbe(&e, rc.chi, cfg)
            } else {
                solve_csbe_direct(&e.xi, rc.chi, cfg)
            }
        }
        Equation::Kpz => {
            let grid = fixed(1)?;
            let xi = mollify_time(&sample_spacetime_white_noise(grid, cfg.dt, steps, rc.seed), rc.eps, rc.kernel);
            solve_kpz(&xi, renormalization_constant(&grid, rc.eps, rc.kernel, RenormKind::KpzSquare), cfg)
        }
        Equation::PamHo => {
            let e = enhance_pam_ho(fixed(1)?, rc.alpha, rc.seed, cfg)?;
            if pc {
                solve_pam_ho(&e, cfg)
            } else {
                solve_pam_direct(&e.xi, cfg)
            }
        }
        Equation::Mesoscopic => {
            let u = rc
                .universality
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("mesoscopic runs need a `universality` section".into()))?;
            let (mut b, chi) = simulate_mesoscopic(u, cfg)?;
            b.components.insert("chi".into(), chi);
            Ok(b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_from_minimal_json() {
        let rc = RunConfig::from_json(r#"{"t_final": 0.01, "dt": 0.001, "n": 32}"#).unwrap();
        assert_eq!(rc.eps, 0.1);
        assert_eq!(rc.method, Method::Paracontrolled);
        assert!(rc.counterterm);
    }

    #[test]
    fn methods_agree_for_gpam() {
        let mut rc = RunConfig::new(SolverConfig::new(0.01, 0.002, 32));
        rc.eps = 0.2;
        let a = solve(Equation::Gpam, &rc).unwrap();
        rc.method = Method::Classical;
        let b = solve(Equation::Gpam, &rc).unwrap();
        assert!((a.final_state() - b.final_state()).sup_norm() < 1e-10);
    }

    #[test]
    fn mesoscopic_needs_its_section() {
        let rc = RunConfig::new(SolverConfig::new(0.01, 0.001, 32));
        assert!(solve(Equation::Mesoscopic, &rc).is_err());
    }
}
